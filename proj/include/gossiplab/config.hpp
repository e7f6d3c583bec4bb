#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gossiplab/digraph.hpp"
#include "gossiplab/ensemble.hpp"
#include "gossiplab/errors.hpp"
#include "gossiplab/schedule.hpp"
#include "gossiplab/selection.hpp"
#include "gossiplab/simulation.hpp"
#include "gossiplab/verification.hpp"

namespace gossiplab {

using Json = nlohmann::json;

struct InitialStateSpec {
  enum class Kind { explicit_values, extremal01, half_split, random_dyadic };
  Kind kind = Kind::extremal01;
  std::vector<double> values;
  std::uint64_t seed = 0;
};

struct VerifySpec {
  int n = 3;
  int depth = 10;
  Family family = Family::m2_star;
  std::uint64_t ceiling = 10'000'000;
  std::int64_t chains = 1000;
  int chain_length = 12;
  bool inject_fault = false;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  std::optional<SelectionMatrix> selection;
  CommunicationModel model = CommunicationModel::dependent;
  Schedule plus = Schedule::constant(1.0);
  Schedule minus = Schedule::constant(1.0);
  InitialStateSpec x0;
  std::int64_t trials = 100;
  std::int64_t horizon = 10'000;
  std::int64_t k0 = 0;
  std::vector<double> epsilons;
  double consensus_threshold = kDefaultConsensusThreshold;
  std::uint64_t master_seed = 0;
  Arithmetic arithmetic = Arithmetic::float64;
  std::optional<int> workers;
  std::optional<std::string> output_dir;
  std::int64_t traces = 1;
  std::optional<double> p_star;
  std::optional<std::int64_t> t_star;
  VerifySpec verify;

  const SelectionMatrix& require_selection() const {
    if (!selection) throw ConfigError("config needs a \"graph\" or \"matrix\" entry");
    return *selection;
  }
};

namespace detail {

inline int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of "key" in the raw text; 0 when absent.
inline int line_of_key(std::string_view text, std::string_view key) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  const auto pos = text.find(quoted);
  return pos == std::string_view::npos ? 0 : line_of_offset(text, pos);
}

class ConfigReader {
 public:
  explicit ConfigReader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(std::string_view key, const std::string& what) const {
    throw ConfigError(std::string(key) + ": " + what, line_of_key(text_, key));
  }

  void reject_unknown(const Json& obj, std::string_view where, const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [k, v] : obj.items())
      if (!allowed.contains(k)) fail(k, "unknown key");
  }

  double number(const Json& v, std::string_view key) const {
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const Json& v, std::string_view key) const {
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const Json& v, std::string_view key) const {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      fail(key, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const Json& v, std::string_view key) const {
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const Json& v, std::string_view key) const {
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, key));
    return out;
  }

  Schedule schedule(const Json& v, std::string_view key) const {
    reject_unknown(v, key, {"family", "c", "gamma", "values", "tail"});
    if (!v.contains("family")) fail(key, "schedule needs a \"family\"");
    const std::string family = string(v["family"], "family");
    try {
      if (family == "constant") return Schedule::constant(number(v.at("c"), "c"));
      if (family == "power") return Schedule::power(number(v.at("c"), "c"), number(v.value("gamma", Json(1.0)), "gamma"));
      if (family == "periodic") return Schedule::periodic(numbers(v.at("values"), "values"));
      if (family == "explicit")
        return Schedule::explicit_list(numbers(v.at("values"), "values"), number(v.value("tail", Json(0.0)), "tail"));
    } catch (const Json::out_of_range&) {
      fail(key, "schedule family \"" + family + "\" is missing a parameter");
    } catch (const std::invalid_argument& e) {
      fail(key, e.what());
    }
    fail("family", "unknown schedule family \"" + family + "\"");
  }

  SelectionMatrix graph(const Json& v, bool relaxed) const {
    reject_unknown(v, "graph", {"n", "arcs"});
    if (!v.contains("n") || !v.contains("arcs")) fail("graph", "graph needs \"n\" and \"arcs\"");
    const auto n = integer(v["n"], "n");
    if (n < 3) fail("n", "need at least 3 nodes");
    if (!v["arcs"].is_array()) fail("arcs", "expected an array of [from, to] pairs");
    std::vector<Arc> arcs;
    for (const auto& a : v["arcs"]) {
      if (!a.is_array() || a.size() != 2) fail("arcs", "each arc is a [from, to] pair");
      arcs.emplace_back(static_cast<int>(integer(a[0], "arcs")), static_cast<int>(integer(a[1], "arcs")));
    }
    try {
      const SelectionMatrix s = selection_from_digraph(Digraph(static_cast<int>(n), arcs));
      return relaxed ? SelectionMatrix(s.matrix(), RowSumMode::relaxed) : s;
    } catch (const std::exception& e) {
      fail("arcs", e.what());
    }
  }

  SelectionMatrix matrix(const Json& v, bool relaxed) const {
    if (!v.is_array() || v.empty()) fail("matrix", "expected a nonempty array of rows");
    const auto n = static_cast<Eigen::Index>(v.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto row = numbers(v[static_cast<std::size_t>(i)], "matrix");
      if (static_cast<Eigen::Index>(row.size()) != n) fail("matrix", "matrix must be square");
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
    }
    try {
      return SelectionMatrix(m, relaxed ? RowSumMode::relaxed : RowSumMode::strict);
    } catch (const std::exception& e) {
      fail("matrix", e.what());
    }
  }

 private:
  std::string_view text_;
};

inline Json read_json_file(const std::filesystem::path& p, std::string_view key, const ConfigReader& rd) {
  std::ifstream in(p);
  if (!in) rd.fail(key, "cannot open referenced file " + p.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    rd.fail(key, "referenced file " + p.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace detail

/// Parses and validates an experiment config. Relative file references are
/// resolved against `base_dir`.
inline ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), detail::line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  const detail::ConfigReader rd(text);
  rd.reject_unknown(root, "config",
                    {"graph", "matrix", "relaxed_rows", "model", "schedule", "schedule_plus", "schedule_minus", "x0",
                     "trials", "horizon", "k0", "epsilons", "consensus_threshold", "master_seed", "arithmetic",
                     "workers", "output", "tcom", "verify"});
  ExperimentConfig c;

  const bool relaxed = root.contains("relaxed_rows") && root["relaxed_rows"].is_boolean() && root["relaxed_rows"].get<bool>();
  if (root.contains("relaxed_rows") && !root["relaxed_rows"].is_boolean()) rd.fail("relaxed_rows", "expected a boolean");
  if (root.contains("graph") && root.contains("matrix")) rd.fail("matrix", "give either \"graph\" or \"matrix\", not both");
  for (const char* key : {"graph", "matrix"}) {
    if (!root.contains(key)) continue;
    Json v = root[key];
    if (v.is_string()) v = detail::read_json_file(base_dir / v.get<std::string>(), key, rd);
    c.selection = std::string_view(key) == "graph" ? rd.graph(v, relaxed) : rd.matrix(v, relaxed);
  }

  if (root.contains("model")) {
    const auto m = rd.string(root["model"], "model");
    if (m == "dependent") c.model = CommunicationModel::dependent;
    else if (m == "independent") c.model = CommunicationModel::independent;
    else rd.fail("model", "expected \"dependent\" or \"independent\"");
  }

  if (root.contains("schedule") && (root.contains("schedule_plus") || root.contains("schedule_minus")))
    rd.fail("schedule", "give \"schedule\" or the \"schedule_plus\"/\"schedule_minus\" pair, not both");
  if (root.contains("schedule")) c.plus = c.minus = rd.schedule(root["schedule"], "schedule");
  if (root.contains("schedule_plus") != root.contains("schedule_minus"))
    rd.fail(root.contains("schedule_plus") ? "schedule_plus" : "schedule_minus",
            "\"schedule_plus\" and \"schedule_minus\" go together");
  if (root.contains("schedule_plus")) {
    c.plus = rd.schedule(root["schedule_plus"], "schedule_plus");
    c.minus = rd.schedule(root["schedule_minus"], "schedule_minus");
  }
  if (c.model == CommunicationModel::dependent && !(c.plus == c.minus))
    rd.fail("model", "dependent communication requires identical P+ and P- schedules");

  if (root.contains("x0")) {
    const Json& v = root["x0"];
    if (v.is_array()) {
      c.x0.kind = InitialStateSpec::Kind::explicit_values;
      c.x0.values = rd.numbers(v, "x0");
    } else {
      rd.reject_unknown(v, "x0", {"kind", "values", "seed"});
      const auto kind = rd.string(v.value("kind", Json("")), "kind");
      if (kind == "explicit") {
        c.x0.kind = InitialStateSpec::Kind::explicit_values;
        if (!v.contains("values")) rd.fail("x0", "explicit x0 needs \"values\"");
        c.x0.values = rd.numbers(v["values"], "values");
      } else if (kind == "extremal-01") {
        c.x0.kind = InitialStateSpec::Kind::extremal01;
      } else if (kind == "half-split") {
        c.x0.kind = InitialStateSpec::Kind::half_split;
      } else if (kind == "random-dyadic") {
        c.x0.kind = InitialStateSpec::Kind::random_dyadic;
        c.x0.seed = v.contains("seed") ? rd.unsigned_integer(v["seed"], "seed") : 0;
      } else {
        rd.fail("kind", "expected explicit, extremal-01, half-split or random-dyadic");
      }
    }
    if (c.x0.kind == InitialStateSpec::Kind::explicit_values && c.selection &&
        static_cast<int>(c.x0.values.size()) != c.selection->size())
      rd.fail("x0", "expected " + std::to_string(c.selection->size()) + " initial values");
  }

  if (root.contains("trials")) {
    c.trials = rd.integer(root["trials"], "trials");
    if (c.trials < 1) rd.fail("trials", "must be at least 1");
  }
  if (root.contains("horizon")) {
    c.horizon = rd.integer(root["horizon"], "horizon");
    if (c.horizon < 1) rd.fail("horizon", "must be at least 1");
  }
  if (root.contains("k0")) {
    c.k0 = rd.integer(root["k0"], "k0");
    if (c.k0 < 0) rd.fail("k0", "must be nonnegative");
  }
  if (root.contains("epsilons")) {
    c.epsilons = rd.numbers(root["epsilons"], "epsilons");
    if (c.epsilons.empty()) rd.fail("epsilons", "must not be empty");
    for (double e : c.epsilons)
      if (!(e > 0.0 && e < 1.0)) rd.fail("epsilons", "values must lie in (0, 1)");
  }
  if (root.contains("consensus_threshold")) {
    c.consensus_threshold = rd.number(root["consensus_threshold"], "consensus_threshold");
    if (!(c.consensus_threshold > 0.0)) rd.fail("consensus_threshold", "must be positive");
  }
  if (root.contains("master_seed")) c.master_seed = rd.unsigned_integer(root["master_seed"], "master_seed");
  if (root.contains("arithmetic")) {
    const auto a = rd.string(root["arithmetic"], "arithmetic");
    if (a == "float") c.arithmetic = Arithmetic::float64;
    else if (a == "dyadic") c.arithmetic = Arithmetic::dyadic;
    else rd.fail("arithmetic", "expected \"float\" or \"dyadic\"");
  }
  if (root.contains("workers")) {
    const auto w = rd.integer(root["workers"], "workers");
    if (w < 1) rd.fail("workers", "must be at least 1");
    c.workers = static_cast<int>(w);
  }
  if (root.contains("output")) {
    const Json& o = root["output"];
    rd.reject_unknown(o, "output", {"dir", "traces"});
    if (o.contains("dir")) c.output_dir = rd.string(o["dir"], "dir");
    if (o.contains("traces")) {
      c.traces = rd.integer(o["traces"], "traces");
      if (c.traces < 0) rd.fail("traces", "must be nonnegative");
    }
  }
  if (root.contains("tcom")) {
    const Json& t = root["tcom"];
    rd.reject_unknown(t, "tcom", {"p_star", "t_star"});
    if (t.contains("p_star")) c.p_star = rd.number(t["p_star"], "p_star");
    if (t.contains("t_star")) c.t_star = rd.integer(t["t_star"], "t_star");
  }
  if (root.contains("verify")) {
    const Json& v = root["verify"];
    rd.reject_unknown(v, "verify", {"n", "depth", "family", "ceiling", "chains", "chain_length", "inject_fault", "seed"});
    VerifySpec& s = c.verify;
    if (v.contains("n")) s.n = static_cast<int>(rd.integer(v["n"], "n"));
    if (s.n < 3) rd.fail("verify", "n must be at least 3");
    if (v.contains("depth")) s.depth = static_cast<int>(rd.integer(v["depth"], "depth"));
    if (s.depth < 1) rd.fail("depth", "must be at least 1");
    if (v.contains("family")) {
      const auto f = rd.string(v["family"], "family");
      if (f == "M2*") s.family = Family::m2_star;
      else if (f == "M") s.family = Family::m;
      else if (f == "M1") s.family = Family::m1;
      else rd.fail("family", "expected \"M2*\", \"M\" or \"M1\"");
    }
    if (v.contains("ceiling")) s.ceiling = rd.unsigned_integer(v["ceiling"], "ceiling");
    if (v.contains("chains")) s.chains = rd.integer(v["chains"], "chains");
    if (s.chains < 1) rd.fail("chains", "must be at least 1");
    if (v.contains("chain_length")) s.chain_length = static_cast<int>(rd.integer(v["chain_length"], "chain_length"));
    if (s.chain_length < 1) rd.fail("chain_length", "must be at least 1");
    if (v.contains("inject_fault")) {
      if (!v["inject_fault"].is_boolean()) rd.fail("inject_fault", "expected a boolean");
      s.inject_fault = v["inject_fault"].get<bool>();
    }
    if (v.contains("seed")) s.seed = rd.unsigned_integer(v["seed"], "seed");
  }
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

/// Initial state for the config; empty when drawn per trial.
inline std::vector<Dyadic> initial_state(const ExperimentConfig& c) {
  const int n = c.require_selection().size();
  switch (c.x0.kind) {
    case InitialStateSpec::Kind::explicit_values: {
      std::vector<Dyadic> x;
      for (double v : c.x0.values) {
        if (!std::isfinite(v)) throw ConfigError("x0 values must be finite");
        x.push_back(Dyadic::from_double(v));
      }
      return x;
    }
    case InitialStateSpec::Kind::extremal01: return one_hot_probe(n);
    case InitialStateSpec::Kind::half_split: return split_probe(n);
    case InitialStateSpec::Kind::random_dyadic: return {};
  }
  return {};
}

inline TrialConfig trial_config(const ExperimentConfig& c) {
  TrialConfig t(c.require_selection());
  t.model = c.model;
  t.plus = c.plus;
  t.minus = c.minus;
  t.x0 = initial_state(c);
  if (c.x0.kind == InitialStateSpec::Kind::random_dyadic) t.random_x0_seed = c.x0.seed;
  t.k0 = c.k0;
  t.horizon = c.horizon;
  t.consensus_threshold = c.consensus_threshold;
  t.arithmetic = c.arithmetic;
  return t;
}

}  // namespace gossiplab
