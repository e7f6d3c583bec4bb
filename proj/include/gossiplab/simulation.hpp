#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gossiplab/dyadic.hpp"
#include "gossiplab/matrix_lab.hpp"
#include "gossiplab/sampling.hpp"
#include "gossiplab/schedule.hpp"
#include "gossiplab/selection.hpp"

namespace gossiplab {

enum class Arithmetic { float64, dyadic };

inline std::string_view to_string(Arithmetic a) { return a == Arithmetic::float64 ? "float" : "dyadic"; }

inline constexpr double kDefaultConsensusThreshold = 1e-9;

struct TrialConfig {
  explicit TrialConfig(SelectionMatrix a) : selection(std::move(a)) {}

  SelectionMatrix selection;
  CommunicationModel model = CommunicationModel::dependent;
  Schedule plus = Schedule::constant(1.0);
  Schedule minus = Schedule::constant(1.0);
  std::vector<Dyadic> x0;
  // When set, each trial replaces x0 with uniform 53-bit dyadics in [0, 1)
  // drawn from (seed, trial).
  std::optional<std::uint64_t> random_x0_seed;
  std::int64_t k0 = 0;
  std::int64_t horizon = 1;
  // Practical consensus: H(k) <= threshold * H(k0).
  double consensus_threshold = kDefaultConsensusThreshold;
  Arithmetic arithmetic = Arithmetic::float64;
  // Ends the trial once consensus and every passage level are reached.
  bool stop_at_consensus = true;
  // Ratios eps for which the first k with H(k)/H(k0) < eps is recorded.
  std::vector<double> passage_levels;
  // Node groups whose members must keep their initial values exactly.
  std::vector<std::vector<int>> invariant_groups;
  // Accumulate W(k-1)...W(k0) in float and check H(k) <= n delta H(k0).
  bool audit_products = false;

  int n() const { return selection.size(); }

  void validate() const {
    if (!random_x0_seed && static_cast<int>(x0.size()) != n())
      throw DimensionError("initial state length differs from n");
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (k0 < 0) throw std::invalid_argument("k0 must be nonnegative");
    if (!(consensus_threshold > 0.0)) throw std::invalid_argument("consensus threshold must be positive");
    if (model == CommunicationModel::dependent && !(plus == minus))
      throw ModelMismatchError("dependent communication requires identical P+ and P- schedules");
    for (double eps : passage_levels)
      if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("passage levels must lie in (0, 1)");
    for (const auto& g : invariant_groups)
      for (int v : g)
        if (v < 0 || v >= n()) throw std::invalid_argument("invariant group node outside [0, n)");
  }
};

struct TracePoint {
  std::int64_t k;
  double max;
  double min;
  double spread;
  std::optional<bool> sum_exact;
};

struct TrialResult {
  std::vector<double> final_state;
  std::int64_t steps_run = 0;
  std::optional<std::int64_t> consensus_step;
  std::optional<bool> sum_history_exact;
  std::vector<TracePoint> spread_trace;
  std::optional<double> limit_estimate;
  double initial_mean = 0.0;
  double initial_spread = 0.0;
  std::vector<std::optional<std::int64_t>> passage_steps;
  std::int64_t symmetric_updates = 0;
  std::int64_t asymmetric_updates = 0;
  // Asymmetric updates applied while the two states differed.
  std::int64_t asymmetric_unequal_updates = 0;
  std::optional<bool> groups_invariant;
  std::int64_t audit_violations = 0;
};

// ---- state application ------------------------------------------------------

inline void apply_update(const UpdateMatrix& u, std::vector<double>& x) {
  const auto i = static_cast<std::size_t>(u.i());
  const auto j = static_cast<std::size_t>(u.j());
  switch (u.kind()) {
    case UpdateMatrix::Kind::identity: return;
    case UpdateMatrix::Kind::symmetric: x[i] = x[j] = 0.5 * (x[i] + x[j]); return;
    case UpdateMatrix::Kind::asymmetric: x[i] = 0.5 * (x[i] + x[j]); return;
  }
}

inline void apply_update(const UpdateMatrix& u, DyadicVector& x) {
  const auto i = static_cast<std::size_t>(u.i());
  const auto j = static_cast<std::size_t>(u.j());
  switch (u.kind()) {
    case UpdateMatrix::Kind::identity: return;
    case UpdateMatrix::Kind::symmetric: x.average_pair(i, j); return;
    case UpdateMatrix::Kind::asymmetric: x.average_into(i, j); return;
  }
}

/// One slot of the gossip recursion on `state`; returns the realized update.
template <class State>
UpdateMatrix step(State& state, const SelectionMatrix& a, CommunicationModel model, double p_plus, double p_minus,
                  TrialStreams& streams) {
  const UpdateMatrix u = sample_update(a, model, p_plus, p_minus, streams);
  apply_update(u, state);
  return u;
}

/// Applies a fixed time-ordered list of updates exactly.
inline DyadicVector replay(std::span<const Dyadic> x0, std::span<const UpdateMatrix> updates) {
  DyadicVector x(x0);
  for (const auto& u : updates) {
    if (u.dim() != static_cast<int>(x.size())) throw DimensionError("update dimension differs from state length");
    apply_update(u, x);
  }
  return x;
}

inline std::vector<double> to_doubles(std::span<const Dyadic> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](const Dyadic& d) { return d.to_double(); });
  return out;
}

/// Uniform dyadic values k / 2^53 with k drawn from the initial-state stream.
inline std::vector<Dyadic> random_dyadic_state(int n, std::uint64_t seed, std::uint64_t trial) {
  RandomStream rng(seed, trial, StreamPurpose::initial_state);
  std::vector<Dyadic> x;
  x.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x.emplace_back(mpz_class(static_cast<unsigned long>(rng.next_u64() >> 11)), 53);
  return x;
}

namespace detail {

// Float trajectory; no exact bookkeeping.
class FloatTrajectory {
 public:
  explicit FloatTrajectory(std::span<const Dyadic> x0) : x_(to_doubles(x0)) {}
  void apply(const UpdateMatrix& u) { apply_update(u, x_); }
  const std::vector<double>& shadow() const { return x_; }
  bool equal(int i, int j) const { return x_[static_cast<std::size_t>(i)] == x_[static_cast<std::size_t>(j)]; }
  bool value_is(int i, const Dyadic& v) const { return x_[static_cast<std::size_t>(i)] == v.to_double(); }
  std::optional<bool> sum_exact() const { return std::nullopt; }
  double mean() const {
    double s = 0.0;
    for (double v : x_) s += v;
    return s / static_cast<double>(x_.size());
  }

 private:
  std::vector<double> x_;
};

// Exact trajectory with a double shadow for spread tracking. The sum check
// recomputes the exact total after every update.
class DyadicTrajectory {
 public:
  explicit DyadicTrajectory(std::span<const Dyadic> x0)
      : x_(x0), shadow_(to_doubles(x0)), initial_sum_(x_.sum()) {}

  void apply(const UpdateMatrix& u) {
    if (u.kind() == UpdateMatrix::Kind::identity) return;
    apply_update(u, x_);
    shadow_[static_cast<std::size_t>(u.i())] = x_.to_double(static_cast<std::size_t>(u.i()));
    shadow_[static_cast<std::size_t>(u.j())] = x_.to_double(static_cast<std::size_t>(u.j()));
    if (sum_exact_ && !(x_.sum() == initial_sum_)) sum_exact_ = false;
  }
  const std::vector<double>& shadow() const { return shadow_; }
  bool equal(int i, int j) const { return x_.equal(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); }
  bool value_is(int i, const Dyadic& v) const { return x_[static_cast<std::size_t>(i)] == v; }
  std::optional<bool> sum_exact() const { return sum_exact_; }
  double mean() const { return x_.sum().to_double() / static_cast<double>(x_.size()); }

 private:
  DyadicVector x_;
  std::vector<double> shadow_;
  Dyadic initial_sum_;
  bool sum_exact_ = true;
};

inline std::pair<double, double> extremes(const std::vector<double>& x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return {*hi, *lo};
}

template <class Trajectory>
TrialResult run_trial_impl(const TrialConfig& cfg, std::uint64_t master_seed, std::uint64_t trial) {
  const int n = cfg.n();
  TrialStreams streams(master_seed, trial);
  const std::vector<Dyadic> x0 = cfg.random_x0_seed ? random_dyadic_state(n, *cfg.random_x0_seed, trial) : cfg.x0;
  Trajectory traj(x0);
  TrialResult r;
  r.passage_steps.assign(cfg.passage_levels.size(), std::nullopt);
  if (!cfg.invariant_groups.empty()) r.groups_invariant = true;

  std::vector<int> group_of(static_cast<std::size_t>(n), -1);
  for (std::size_t g = 0; g < cfg.invariant_groups.size(); ++g)
    for (int v : cfg.invariant_groups[g]) group_of[static_cast<std::size_t>(v)] = static_cast<int>(g);

  auto [hi, lo] = extremes(traj.shadow());
  const double h0 = hi - lo;
  r.initial_spread = h0;
  r.initial_mean = traj.mean();
  const double target = cfg.consensus_threshold * h0;

  Eigen::MatrixXd product;
  if (cfg.audit_products) product = Eigen::MatrixXd::Identity(n, n);

  std::size_t unresolved = cfg.passage_levels.size();
  std::int64_t next_sample = 0;
  const auto record = [&](std::int64_t elapsed) {
    r.spread_trace.push_back({elapsed, hi, lo, hi - lo, traj.sum_exact()});
    if (cfg.audit_products && elapsed > 0) {
      if (hi - lo > n * delta_coefficient(product) * h0 + kFloatEqualityTolerance) ++r.audit_violations;
    }
  };
  const auto observe = [&](std::int64_t elapsed) {
    const double spread = hi - lo;
    if (!r.consensus_step && spread <= target) r.consensus_step = elapsed;
    if (unresolved > 0) {
      for (std::size_t e = 0; e < cfg.passage_levels.size(); ++e)
        if (!r.passage_steps[e] && spread < cfg.passage_levels[e] * h0) {
          r.passage_steps[e] = elapsed;
          --unresolved;
        }
    }
  };

  observe(0);
  record(0);
  next_sample = 1;
  std::int64_t elapsed = 0;
  const bool frozen = h0 == 0.0;
  while (elapsed < cfg.horizon) {
    if (cfg.stop_at_consensus && r.consensus_step && unresolved == 0) break;
    if (frozen && cfg.stop_at_consensus) break;
    const std::int64_t k = cfg.k0 + elapsed;
    const UpdateMatrix u =
        sample_update(cfg.selection, cfg.model, cfg.plus.value(k), cfg.minus.value(k), streams);
    switch (u.kind()) {
      case UpdateMatrix::Kind::identity: break;
      case UpdateMatrix::Kind::symmetric: ++r.symmetric_updates; break;
      case UpdateMatrix::Kind::asymmetric:
        ++r.asymmetric_updates;
        if (!traj.equal(u.i(), u.j())) ++r.asymmetric_unequal_updates;
        break;
    }
    traj.apply(u);
    if (cfg.audit_products) product = expand_real(u) * product;
    ++elapsed;
    if (u.kind() != UpdateMatrix::Kind::identity) {
      std::tie(hi, lo) = extremes(traj.shadow());
      observe(elapsed);
      if (r.groups_invariant && *r.groups_invariant) {
        for (int v : {u.i(), u.j()}) {
          const int g = group_of[static_cast<std::size_t>(v)];
          if (g >= 0 && !traj.value_is(v, x0[static_cast<std::size_t>(v)])) r.groups_invariant = false;
        }
      }
    }
    if (elapsed == next_sample) {
      record(elapsed);
      next_sample *= 2;
    }
  }
  if (r.spread_trace.back().k != elapsed) record(elapsed);

  r.steps_run = elapsed;
  r.final_state = traj.shadow();
  r.sum_history_exact = traj.sum_exact();
  if (r.consensus_step) r.limit_estimate = traj.mean();
  return r;
}

}  // namespace detail

/// Runs one trial from x(k0) for at most `horizon` slots. Streams derive from
/// (master_seed, trial).
inline TrialResult run_trial(const TrialConfig& cfg, std::uint64_t master_seed, std::uint64_t trial = 0) {
  cfg.validate();
  if (cfg.arithmetic == Arithmetic::dyadic)
    return detail::run_trial_impl<detail::DyadicTrajectory>(cfg, master_seed, trial);
  return detail::run_trial_impl<detail::FloatTrajectory>(cfg, master_seed, trial);
}

}  // namespace gossiplab
