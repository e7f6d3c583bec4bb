#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "gossiplab/bounds.hpp"
#include "gossiplab/config.hpp"
#include "gossiplab/ensemble.hpp"
#include "gossiplab/report.hpp"
#include "gossiplab/verification.hpp"

namespace gossiplab {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitRuntime = 3,
  kExitVerification = 4,
  kExitInconclusive = 5,
};

/// Command-line overrides applied on top of the config file.
struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
  std::optional<Arithmetic> arithmetic;
  std::optional<std::int64_t> trials;
};

struct CommandContext {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  int workers = 1;
  std::optional<std::filesystem::path> out_dir;
};

/// Precedence: flag, then GOSSIPLAB_WORKERS, then config, then 1.
inline CommandContext resolve(ExperimentConfig cfg, const CommandOptions& opt) {
  CommandContext ctx;
  if (opt.arithmetic) cfg.arithmetic = *opt.arithmetic;
  if (opt.trials) {
    if (*opt.trials < 1) throw ConfigError("--trials must be at least 1");
    cfg.trials = *opt.trials;
  }
  ctx.seed = opt.seed.value_or(cfg.master_seed);
  cfg.master_seed = ctx.seed;
  if (opt.workers) {
    ctx.workers = *opt.workers;
  } else if (const char* env = std::getenv("GOSSIPLAB_WORKERS"); env && *env) {
    try {
      ctx.workers = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("GOSSIPLAB_WORKERS is not an integer: ") + env);
    }
  } else {
    ctx.workers = cfg.workers.value_or(1);
  }
  if (ctx.workers < 1) throw ConfigError("worker count must be at least 1");
  if (opt.out_dir) ctx.out_dir = *opt.out_dir;
  else if (cfg.output_dir) ctx.out_dir = *cfg.output_dir;
  ctx.config = std::move(cfg);
  return ctx;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  return f;
}

inline void emit(const CommandContext& ctx, const std::string& name, const Json& report, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (ctx.out_dir) open_output(*ctx.out_dir, name + ".json") << text;
  out << text;
}

}  // namespace detail

inline int cmd_analyze_graph(const CommandContext& ctx, std::ostream& out) {
  detail::emit(ctx, "analyze-graph", analyze_graph_report(ctx.config.require_selection()), out);
  return kExitOk;
}

inline int cmd_simulate(const CommandContext& ctx, std::ostream& out) {
  const TrialConfig cfg = trial_config(ctx.config);
  const auto stats = run_ensemble(cfg, {.trials = ctx.config.trials,
                                        .master_seed = ctx.seed,
                                        .workers = ctx.workers,
                                        .keep_results = ctx.out_dir ? ctx.config.traces : 0});
  Json report = to_json(stats, cfg, ctx.seed);
  if (ctx.out_dir) {
    Json traces = Json::array();
    for (std::size_t t = 0; t < stats.kept.size(); ++t) {
      const std::string name = "trace_" + std::to_string(t) + ".csv";
      auto f = detail::open_output(*ctx.out_dir, name);
      write_trace_csv(f, stats.kept[t]);
      traces.push_back(name);
    }
    report["traces"] = traces;
  }
  detail::emit(ctx, "simulate", report, out);
  return kExitOk;
}

/// Empirical T_com next to whichever closed-form bounds apply.
inline std::vector<TcomRow> tcom_table(const ExperimentConfig& c, std::uint64_t seed, int workers) {
  if (c.epsilons.empty()) throw ConfigError("tcom needs a nonempty \"epsilons\" list");
  TrialConfig cfg = trial_config(c);
  const auto estimates = estimate_tcom(cfg, c.epsilons, {.trials = c.trials, .master_seed = seed, .workers = workers});

  std::optional<StructuralConstants> sc;
  std::optional<LinearGrowthWitness> w;
  try {
    sc = structural_constants(cfg.selection);
  } catch (const ConnectivityError&) {
  } catch (const UndefinedDiameterError&) {
  }
  if (c.p_star && c.t_star) {
    w = LinearGrowthWitness{*c.p_star, *c.t_star};
  } else {
    w = c.model == CommunicationModel::dependent ? classify(cfg.plus).linear_growth_witness
                                                 : classify_sum(cfg.plus, cfg.minus).linear_growth_witness;
  }
  std::vector<TcomRow> rows;
  for (const auto& e : estimates) {
    TcomRow row{e, std::nullopt, std::nullopt};
    if (sc && w) {
      if (c.model == CommunicationModel::dependent)
        row.dependent = tcom_bound_dependent(*sc, w->p_star, w->t_star, cfg.n(), e.epsilon);
      else if (is_double_connected(cfg.selection.graph()))
        row.independent = tcom_bound_independent(*sc, w->p_star, w->t_star, cfg.n(), e.epsilon);
    }
    rows.push_back(row);
  }
  return rows;
}

inline int cmd_tcom(const CommandContext& ctx, std::ostream& out) {
  const auto rows = tcom_table(ctx.config, ctx.seed, ctx.workers);
  Json report;
  report["kind"] = "tcom";
  report["trials"] = ctx.config.trials;
  report["horizon"] = ctx.config.horizon;
  report["master_seed"] = ctx.seed;
  report["model"] = std::string(to_string(ctx.config.model));
  report["rows"] = to_json(rows);
  if (ctx.out_dir) {
    auto f = detail::open_output(*ctx.out_dir, "tcom.csv");
    write_tcom_csv(f, rows);
  }
  detail::emit(ctx, "tcom", report, out);
  return kExitOk;
}

/// Dyadic ensemble reporting exact average preservation and the mean limit.
inline int cmd_preserve_average(const CommandContext& ctx, std::ostream& out) {
  TrialConfig cfg = trial_config(ctx.config);
  cfg.arithmetic = Arithmetic::dyadic;
  const auto stats = run_ensemble(cfg, {.trials = ctx.config.trials, .master_seed = ctx.seed, .workers = ctx.workers});
  Json report = to_json(stats, cfg, ctx.seed);
  report["kind"] = "preserve-average";
  if (stats.mean_limit && stats.mean_limit_stderr) {
    const double gap = std::abs(*stats.mean_limit - stats.x_ave);
    report["mean_limit_gap"] = gap;
    report["mean_limit_within_3se"] = gap <= 3.0 * *stats.mean_limit_stderr;
  }
  report["asymmetric_unequal_always_changed_sum"] =
      stats.asymmetric_unequal_changed_sum == stats.asymmetric_unequal_trials;
  detail::emit(ctx, "preserve-average", report, out);
  return kExitOk;
}

/// Complete graph with uniform selection.
inline SelectionMatrix complete_uniform(int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(n, n, 1.0 / (n - 1));
  a.diagonal().setZero();
  return SelectionMatrix(a);
}

inline Json run_verify_suite(const ExperimentConfig& c, bool& failed, bool& inconclusive) {
  const VerifySpec& v = c.verify;
  Json report;
  report["kind"] = "verify";
  failed = inconclusive = false;

  EnumerationOptions eo;
  eo.ceiling = v.ceiling;
  std::vector<UpdateMatrix> members = family_members(v.n, v.family);
  std::vector<bool> labelled_symmetric;
  for (const auto& m : members) labelled_symmetric.push_back(m.kind() == UpdateMatrix::Kind::symmetric);
  if (v.inject_fault) {
    members.push_back(UpdateMatrix::asymmetric(0, 1, v.n));
    labelled_symmetric.push_back(true);
  }
  eo.members = members;

  const auto bad = audit_symmetric_members(members, labelled_symmetric);
  PropertyReport audit{"family-audit", static_cast<std::int64_t>(members.size()), static_cast<std::int64_t>(bad.size()), bad};
  report["family_audit"] = to_json(audit);
  failed |= audit.violations > 0;

  const auto en = enumerate_products(v.n, v.depth, v.family, eo);
  report["enumeration"] = to_json(en);
  failed |= !en.violations.empty();
  inconclusive |= en.inconclusive;

  const SelectionMatrix a = c.selection && is_double_connected(c.selection->graph()) ? *c.selection
                                                                                      : complete_uniform(v.n);
  RandomStream rng(v.seed, 0, StreamPurpose::verification);
  Json suites = Json::array();
  const auto add = [&](const PropertyReport& p) {
    suites.push_back(to_json(p));
    failed |= p.violations > 0;
  };
  add(check_delta_lambda_product(a.size(), v.chains, v.chain_length, rng));
  add(check_union_containment(a, v.chains, v.chain_length, rng));
  add(check_entry_floor(a, v.chains, v.chain_length, rng));
  const auto sb = scrambling_block_check(a, v.chains, rng);
  suites.push_back(to_json(sb));
  failed |= sb.violations + sb.floor_violations + sb.coverage_failures > 0;
  report["suites"] = suites;
  report["status"] = failed ? "fail" : inconclusive ? "inconclusive" : "pass";
  return report;
}

inline int cmd_verify(const CommandContext& ctx, std::ostream& out) {
  bool failed = false, inconclusive = false;
  const Json report = run_verify_suite(ctx.config, failed, inconclusive);
  detail::emit(ctx, "verify", report, out);
  if (failed) return kExitVerification;
  return inconclusive ? kExitInconclusive : kExitOk;
}

}  // namespace gossiplab
