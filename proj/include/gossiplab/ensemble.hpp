#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "gossiplab/simulation.hpp"

namespace gossiplab {

/// Binomial proportion with a 95% Wilson score interval.
struct Proportion {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  double value = 0.0;
  double lower = 0.0;
  double upper = 1.0;

  double standard_error() const {
    return trials > 0 ? std::sqrt(value * (1.0 - value) / static_cast<double>(trials)) : 0.0;
  }
};

inline Proportion wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054) {
  Proportion p{successes, trials, 0.0, 0.0, 1.0};
  if (trials <= 0) return p;
  const double nt = static_cast<double>(trials);
  p.value = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double centre = (p.value + z2 / (2.0 * nt)) / (1.0 + z2 / nt);
  const double half = z * std::sqrt(p.value * (1.0 - p.value) / nt + z2 / (4.0 * nt * nt)) / (1.0 + z2 / nt);
  p.lower = std::max(0.0, centre - half);
  p.upper = std::min(1.0, centre + half);
  return p;
}

struct EnsembleOptions {
  std::int64_t trials = 1;
  std::uint64_t master_seed = 0;
  int workers = 1;
  // Trials whose full result (with trace) is kept.
  std::int64_t keep_results = 0;
};

struct EnsembleStats {
  std::int64_t trials = 0;
  // Mean over trials of the initial node average.
  double x_ave = 0.0;
  Proportion consensus;
  // Mean of the final node average over trials that reached consensus.
  std::optional<double> mean_limit;
  std::optional<double> mean_limit_stderr;
  std::int64_t limit_excluded = 0;
  // Dyadic mode only.
  std::optional<Proportion> preservation;
  std::int64_t asymmetric_unequal_trials = 0;
  std::int64_t asymmetric_unequal_changed_sum = 0;
  std::int64_t group_violations = 0;
  std::int64_t audit_violations = 0;
  std::int64_t symmetric_updates = 0;
  std::int64_t asymmetric_updates = 0;
  std::vector<TrialResult> kept;
};

/// Runs `fn(trial)` for every trial index on a pool of workers. Output slots are
/// indexed by trial, so results do not depend on scheduling.
template <class Result, class Fn>
std::vector<Result> parallel_trials(std::int64_t trials, int workers, Fn fn) {
  std::vector<Result> out(static_cast<std::size_t>(trials));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&] {
    for (;;) {
      const std::int64_t t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        out[static_cast<std::size_t>(t)] = fn(t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };
  const int pool = static_cast<int>(std::clamp<std::int64_t>(workers, 1, std::max<std::int64_t>(trials, 1)));
  std::vector<std::thread> threads;
  for (int w = 1; w < pool; ++w) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline double initial_average(const TrialConfig& cfg) {
  Dyadic s;
  for (const auto& v : cfg.x0) s = s + v;
  return s.to_double() / static_cast<double>(cfg.x0.size());
}

inline EnsembleStats run_ensemble(const TrialConfig& cfg, const EnsembleOptions& opt) {
  if (opt.trials < 1) throw std::invalid_argument("ensemble needs at least one trial");
  cfg.validate();
  auto results = parallel_trials<TrialResult>(opt.trials, opt.workers, [&](std::int64_t t) {
    return run_trial(cfg, opt.master_seed, static_cast<std::uint64_t>(t));
  });

  EnsembleStats s;
  s.trials = opt.trials;
  std::int64_t reached = 0, preserved = 0;
  double sum = 0.0, sum_sq = 0.0, start = 0.0;
  for (const auto& r : results) {
    start += r.initial_mean;
    if (r.consensus_step) {
      ++reached;
      const double m = *r.limit_estimate;
      sum += m;
      sum_sq += m * m;
    }
    if (r.sum_history_exact.value_or(false)) ++preserved;
    if (r.asymmetric_unequal_updates > 0) {
      ++s.asymmetric_unequal_trials;
      if (r.sum_history_exact && !*r.sum_history_exact) ++s.asymmetric_unequal_changed_sum;
    }
    if (r.groups_invariant && !*r.groups_invariant) ++s.group_violations;
    s.audit_violations += r.audit_violations;
    s.symmetric_updates += r.symmetric_updates;
    s.asymmetric_updates += r.asymmetric_updates;
  }
  s.x_ave = start / static_cast<double>(opt.trials);
  s.consensus = wilson_interval(reached, opt.trials);
  s.limit_excluded = opt.trials - reached;
  if (reached > 0) {
    const double m = sum / static_cast<double>(reached);
    s.mean_limit = m;
    const double var = reached > 1 ? std::max(0.0, (sum_sq - reached * m * m) / static_cast<double>(reached - 1)) : 0.0;
    s.mean_limit_stderr = std::sqrt(var / static_cast<double>(reached));
  }
  if (cfg.arithmetic == Arithmetic::dyadic) s.preservation = wilson_interval(preserved, opt.trials);
  const auto keep = static_cast<std::size_t>(std::clamp<std::int64_t>(opt.keep_results, 0, opt.trials));
  s.kept.assign(std::make_move_iterator(results.begin()), std::make_move_iterator(results.begin() + static_cast<std::ptrdiff_t>(keep)));
  return s;
}

// ---- epsilon-computation time ------------------------------------------------

/// One node at 1, the rest at 0.
inline std::vector<Dyadic> one_hot_probe(int n) {
  std::vector<Dyadic> x(static_cast<std::size_t>(n), Dyadic(0));
  x[0] = Dyadic(1);
  return x;
}

/// First ceil(n/2) nodes at 0, the rest at 1.
inline std::vector<Dyadic> split_probe(int n) {
  std::vector<Dyadic> x(static_cast<std::size_t>(n), Dyadic(1));
  for (int i = 0; i < (n + 1) / 2; ++i) x[static_cast<std::size_t>(i)] = Dyadic(0);
  return x;
}

struct ProbeTcom {
  std::optional<std::int64_t> steps;
  // Fraction of trials with H(k)/H(k0) >= eps at the last slot run.
  double fraction_at_horizon = 0.0;
};

struct TcomEstimate {
  double epsilon = 0.0;
  ProbeTcom one_hot;
  ProbeTcom split;
  // Worst probe; empty when either probe ran out of horizon.
  std::optional<std::int64_t> steps;
  bool horizon_exceeded = false;
  double achieved_fraction = 0.0;
};

namespace detail {

// Smallest k with #{t : passage_t > k} <= eps * N, where an absent passage
// counts as beyond the horizon.
inline ProbeTcom scan_passages(std::vector<std::optional<std::int64_t>> passages, double eps) {
  const auto trials = static_cast<std::int64_t>(passages.size());
  const auto allowed = static_cast<std::int64_t>(std::floor(eps * static_cast<double>(trials)));
  std::int64_t missing = 0;
  std::vector<std::int64_t> times;
  for (const auto& p : passages) {
    if (p) times.push_back(*p);
    else ++missing;
  }
  ProbeTcom out;
  out.fraction_at_horizon = static_cast<double>(missing) / static_cast<double>(trials);
  if (missing > allowed) return out;
  std::sort(times.begin(), times.end());
  // Trials still above eps at slot k: missing + #{times > k}. Need <= allowed.
  const std::int64_t keep_above = allowed - missing;
  const auto idx = static_cast<std::int64_t>(times.size()) - keep_above - 1;
  out.steps = idx < 0 ? 0 : times[static_cast<std::size_t>(idx)];
  return out;
}

}  // namespace detail

/// Empirical epsilon-computation time for several epsilons on one shared
/// ensemble per probe. The supremum over initial states is approximated by
/// the one-hot and half-split probes; the worse of the two is reported.
inline std::vector<TcomEstimate> estimate_tcom(const TrialConfig& cfg, const std::vector<double>& epsilons,
                                               const EnsembleOptions& opt) {
  if (epsilons.empty()) throw std::invalid_argument("epsilon list is empty");
  for (double e : epsilons)
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (opt.trials < 1) throw std::invalid_argument("ensemble needs at least one trial");

  const auto run_probe = [&](std::vector<Dyadic> x0, std::uint64_t seed_offset) {
    TrialConfig c = cfg;
    c.x0 = std::move(x0);
    c.random_x0_seed.reset();
    c.passage_levels = epsilons;
    // Stop as soon as the smallest level is passed.
    c.consensus_threshold = *std::min_element(epsilons.begin(), epsilons.end());
    c.stop_at_consensus = true;
    c.validate();
    return parallel_trials<std::vector<std::optional<std::int64_t>>>(opt.trials, opt.workers, [&](std::int64_t t) {
      return run_trial(c, opt.master_seed + seed_offset, static_cast<std::uint64_t>(t)).passage_steps;
    });
  };
  const auto hot = run_probe(one_hot_probe(cfg.n()), 0);
  const auto split = run_probe(split_probe(cfg.n()), 0x5bd1e995ULL);

  std::vector<TcomEstimate> out;
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    std::vector<std::optional<std::int64_t>> a, b;
    for (const auto& p : hot) a.push_back(p[e]);
    for (const auto& p : split) b.push_back(p[e]);
    TcomEstimate est;
    est.epsilon = epsilons[e];
    est.one_hot = detail::scan_passages(std::move(a), epsilons[e]);
    est.split = detail::scan_passages(std::move(b), epsilons[e]);
    if (est.one_hot.steps && est.split.steps) {
      est.steps = std::max(*est.one_hot.steps, *est.split.steps);
    } else {
      est.horizon_exceeded = true;
    }
    est.achieved_fraction = std::max(est.one_hot.fraction_at_horizon, est.split.fraction_at_horizon);
    out.push_back(est);
  }
  return out;
}

inline TcomEstimate estimate_tcom(const TrialConfig& cfg, double epsilon, const EnsembleOptions& opt) {
  return estimate_tcom(cfg, std::vector<double>{epsilon}, opt).front();
}

struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
inline AffineFit fit_affine(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("affine fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
  AffineFit f;
  f.slope = cxy / cxx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r_squared = cyy > 0 ? (cxy * cxy) / (cxx * cyy) : 1.0;
  return f;
}

}  // namespace gossiplab
