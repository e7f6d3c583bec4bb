#pragma once

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gossiplab/bounds.hpp"
#include "gossiplab/ensemble.hpp"
#include "gossiplab/schedule.hpp"
#include "gossiplab/selection.hpp"
#include "gossiplab/verification.hpp"

namespace gossiplab {

using Json = nlohmann::json;

// ---- CSV ---------------------------------------------------------------------

/// Shortest round-trip decimal, independent of the global locale.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_number(std::int64_t v) { return std::to_string(v); }

/// RFC 4180 field: quoted when it holds a comma, quote or line break.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << csv_field(fields[i]);
  out << "\r\n";
}

/// Trace columns: slot, max state H, min state h, spread H - h, exact-sum flag.
inline void write_trace_csv(std::ostream& out, const TrialResult& r) {
  write_csv_row(out, {"k", "H", "h", "spread", "sum_exact"});
  for (const auto& p : r.spread_trace)
    write_csv_row(out, {format_number(p.k), format_number(p.max), format_number(p.min), format_number(p.spread),
                        p.sum_exact ? (*p.sum_exact ? "true" : "false") : ""});
}

struct TcomRow {
  TcomEstimate estimate;
  std::optional<TcomBound> dependent;
  std::optional<TcomBound> independent;

  // Bound slope term plus its additive constant.
  static double total(const TcomBound& b) { return b.value + b.offset; }

  bool exceeds_bound() const {
    if (!estimate.steps) return false;
    const auto s = static_cast<double>(*estimate.steps);
    return (dependent && s > total(*dependent)) || (independent && s > total(*independent));
  }
};

inline void write_tcom_csv(std::ostream& out, const std::vector<TcomRow>& rows) {
  write_csv_row(out, {"epsilon", "empirical", "one_hot", "split", "bound_dependent", "bound_independent",
                      "exceeds_bound", "horizon_exceeded"});
  const auto opt_steps = [](const std::optional<std::int64_t>& s) { return s ? format_number(*s) : std::string(); };
  const auto opt_bound = [](const std::optional<TcomBound>& b) {
    return b ? format_number(TcomRow::total(*b)) : std::string();
  };
  for (const auto& r : rows)
    write_csv_row(out, {format_number(r.estimate.epsilon), opt_steps(r.estimate.steps),
                        opt_steps(r.estimate.one_hot.steps), opt_steps(r.estimate.split.steps), opt_bound(r.dependent),
                        opt_bound(r.independent), r.exceeds_bound() ? "true" : "false",
                        r.estimate.horizon_exceeded ? "true" : "false"});
}

// ---- JSON ----------------------------------------------------------------------

inline Json to_json(const Schedule& s) {
  return std::visit(
      [](const auto& f) -> Json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, Schedule::Constant>) return {{"family", "constant"}, {"c", f.c}};
        else if constexpr (std::is_same_v<F, Schedule::Power>)
          return {{"family", "power"}, {"c", f.c}, {"gamma", f.gamma}};
        else if constexpr (std::is_same_v<F, Schedule::Periodic>) return {{"family", "periodic"}, {"values", f.values}};
        else return {{"family", "explicit"}, {"values", f.values}, {"tail", f.tail}};
      },
      s.family());
}

inline Json to_json(const Proportion& p) {
  return {{"successes", p.successes}, {"trials", p.trials}, {"value", p.value}, {"ci_lower", p.lower},
          {"ci_upper", p.upper}, {"standard_error", p.standard_error()}};
}

inline Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

/// Chains serialize as [kind, i, j] triples in time order.
inline Json to_json(const Chain& chain) {
  Json out = Json::array();
  for (const auto& u : chain) out.push_back({std::string(to_string(u.kind())), u.i(), u.j()});
  return out;
}

inline Chain chain_from_json(const Json& j, int n) {
  Chain c;
  for (const auto& t : j) {
    const auto kind = t.at(0).get<std::string>();
    const int a = t.at(1).get<int>(), b = t.at(2).get<int>();
    if (kind == "identity") c.push_back(UpdateMatrix::identity(n));
    else if (kind == "symmetric") c.push_back(UpdateMatrix::symmetric(a, b, n));
    else if (kind == "asymmetric") c.push_back(UpdateMatrix::asymmetric(a, b, n));
    else throw std::invalid_argument("unknown update kind " + kind);
  }
  return c;
}

/// Structural summary of a selection matrix. Constants that need weak
/// connectivity are omitted when it fails.
inline Json analyze_graph_report(const SelectionMatrix& a) {
  const Digraph g = a.graph();
  const Digraph gt = a.converse_graph();
  Json r;
  r["kind"] = "analyze-graph";
  r["n"] = a.size();
  r["matrix"] = to_json(a.matrix());
  Json arcs = Json::array();
  for (const auto& [u, v] : g.arcs()) arcs.push_back({u, v});
  r["arcs"] = arcs;
  const bool a1 = is_weakly_connected(g);
  const bool qsc = is_quasi_strongly_connected(g);
  const bool qsc_t = is_quasi_strongly_connected(gt);
  r["A1"] = a1;
  r["A4"] = qsc && qsc_t;
  r["graph_quasi_strongly_connected"] = qsc;
  r["converse_quasi_strongly_connected"] = qsc_t;
  r["strongly_connected"] = is_strongly_connected(g);
  if (!qsc && !qsc_t) r["A4_failing_direction"] = "both";
  else if (!qsc) r["A4_failing_direction"] = "graph";
  else if (!qsc_t) r["A4_failing_direction"] = "converse";
  else r["A4_failing_direction"] = nullptr;
  if (a1) {
    const auto sc = structural_constants(a);
    r["lambda2_star"] = sc.lambda2_star;
    r["diameter_graph"] = sc.diameter_a;
    r["diameter_converse"] = sc.diameter_at;
    r["d_star"] = sc.d_star;
    r["e_star"] = sc.e_star;
    r["a_star"] = sc.a_star;
    r["theta0"] = sc.theta0;
    r["h"] = sc.h;
  }
  return r;
}

inline Json to_json(const EnsembleStats& s, const TrialConfig& cfg, std::uint64_t master_seed) {
  Json r;
  r["kind"] = "simulate";
  r["n"] = cfg.n();
  r["model"] = std::string(to_string(cfg.model));
  r["schedule_plus"] = to_json(cfg.plus);
  r["schedule_minus"] = to_json(cfg.minus);
  r["arithmetic"] = std::string(to_string(cfg.arithmetic));
  r["horizon"] = cfg.horizon;
  r["k0"] = cfg.k0;
  r["master_seed"] = master_seed;
  r["trials"] = s.trials;
  r["x_ave"] = s.x_ave;
  r["consensus_fraction"] = to_json(s.consensus);
  r["mean_limit"] = s.mean_limit ? Json(*s.mean_limit) : Json(nullptr);
  r["mean_limit_stderr"] = s.mean_limit_stderr ? Json(*s.mean_limit_stderr) : Json(nullptr);
  r["limit_excluded"] = s.limit_excluded;
  r["preservation_fraction"] = s.preservation ? to_json(*s.preservation) : Json(nullptr);
  r["asymmetric_unequal_trials"] = s.asymmetric_unequal_trials;
  r["asymmetric_unequal_changed_sum"] = s.asymmetric_unequal_changed_sum;
  r["group_violations"] = s.group_violations;
  r["audit_violations"] = s.audit_violations;
  r["symmetric_updates"] = s.symmetric_updates;
  r["asymmetric_updates"] = s.asymmetric_updates;
  return r;
}

inline Json to_json(const TcomBound& b) { return {{"slope", b.slope}, {"value", b.value}, {"offset", b.offset}}; }

inline Json to_json(const std::vector<TcomRow>& rows) {
  Json out = Json::array();
  const auto steps = [](const std::optional<std::int64_t>& s) { return s ? Json(*s) : Json(nullptr); };
  for (const auto& r : rows) {
    Json row;
    row["epsilon"] = r.estimate.epsilon;
    row["empirical"] = steps(r.estimate.steps);
    row["one_hot"] = steps(r.estimate.one_hot.steps);
    row["split"] = steps(r.estimate.split.steps);
    row["fraction_at_horizon"] = r.estimate.achieved_fraction;
    row["bound_dependent"] = r.dependent ? to_json(*r.dependent) : Json(nullptr);
    row["bound_independent"] = r.independent ? to_json(*r.independent) : Json(nullptr);
    row["exceeds_bound"] = r.exceeds_bound();
    row["horizon_exceeded"] = r.estimate.horizon_exceeded;
    out.push_back(row);
  }
  return out;
}

inline Json to_json(const EnumerationReport& e) {
  Json r;
  r["n"] = e.n;
  r["depth"] = e.depth;
  r["depth_reached"] = e.depth_reached;
  r["family"] = std::string(to_string(e.family));
  r["chains_checked"] = e.chains_checked;
  r["distinct_products"] = e.distinct_products;
  r["min_delta_seen"] = e.min_delta_seen;
  r["inconclusive"] = e.inconclusive;
  Json v = Json::array(), w = Json::array();
  for (const auto& c : e.violations) v.push_back(to_json(c));
  for (const auto& c : e.witnesses) w.push_back(to_json(c));
  r["violations"] = v;
  r["witnesses"] = w;
  return r;
}

inline Json to_json(const PropertyReport& p) {
  Json chains = Json::array();
  for (const auto& c : p.violating_chains) chains.push_back(to_json(c));
  return {{"name", p.name}, {"cases", p.cases}, {"violations", p.violations}, {"violating_chains", chains}};
}

inline Json to_json(const ScramblingReport& s) {
  Json chains = Json::array();
  for (const auto& c : s.violating_chains) chains.push_back(to_json(c));
  return {{"name", "scrambling-after-covering-blocks"},
          {"cases", s.chains},
          {"blocks_per_chain", s.blocks_per_chain},
          {"violations", s.violations + s.floor_violations},
          {"lambda_one_observed", s.non_scrambling_observed},
          {"floor_violations", s.floor_violations},
          {"coverage_failures", s.coverage_failures},
          {"max_lambda", s.max_lambda},
          {"violating_chains", chains}};
}

}  // namespace gossiplab
