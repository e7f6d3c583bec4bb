#include <CLI11.hpp>

#include <iostream>

#include "gossiplab/commands.hpp"

using namespace gossiplab;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<std::string> arithmetic;
  std::optional<std::int64_t> trials;
};

void add_flags(CLI::App* sub, Flags& f, bool config_required) {
  auto* c = sub->add_option("--config", f.config, "experiment config (JSON)");
  if (config_required) c->required();
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--workers", f.workers, "worker threads (falls back to GOSSIPLAB_WORKERS)");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--arithmetic", f.arithmetic, "float or dyadic")->check(CLI::IsMember({"float", "dyadic"}));
  sub->add_option("--trials", f.trials, "number of trials");
}

int run(const std::string& command, const Flags& f) {
  const ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  CommandOptions opt;
  opt.seed = f.seed;
  opt.workers = f.workers;
  opt.out_dir = f.out;
  opt.trials = f.trials;
  if (f.arithmetic) opt.arithmetic = *f.arithmetic == "dyadic" ? Arithmetic::dyadic : Arithmetic::float64;
  const CommandContext ctx = resolve(cfg, opt);
  if (command == "analyze-graph") return cmd_analyze_graph(ctx, std::cout);
  if (command == "simulate") return cmd_simulate(ctx, std::cout);
  if (command == "tcom") return cmd_tcom(ctx, std::cout);
  if (command == "preserve-average") return cmd_preserve_average(ctx, std::cout);
  return cmd_verify(ctx, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gossiplab: randomized gossip averaging over unreliable links"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"analyze-graph", "structural constants and connectivity of the selection graph"},
      {"simulate", "seeded Monte Carlo ensemble with CSV traces"},
      {"tcom", "empirical epsilon-computation time against closed-form bounds"},
      {"preserve-average", "dyadic ensemble for exact average preservation"},
      {"verify", "exhaustive and randomized checks of the matrix lemmas"},
  };
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags, name != "verify");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
