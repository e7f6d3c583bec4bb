#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gossiplab {

/// Deterministic success-probability sequence k -> P_k in [0, 1].
class Schedule {
 public:
  struct Constant {
    double c;
  };
  // min(1, c / (k + 1)^gamma)
  struct Power {
    double c;
    double gamma;
  };
  struct Periodic {
    std::vector<double> values;
  };
  // values[k] for k < size, then tail forever.
  struct Explicit {
    std::vector<double> values;
    double tail;
  };
  using Family = std::variant<Constant, Power, Periodic, Explicit>;

  static Schedule constant(double c) { return Schedule(Constant{c}); }
  static Schedule power(double c, double gamma) { return Schedule(Power{c, gamma}); }
  static Schedule periodic(std::vector<double> values) { return Schedule(Periodic{std::move(values)}); }
  static Schedule explicit_list(std::vector<double> values, double tail) {
    return Schedule(Explicit{std::move(values), tail});
  }

  explicit Schedule(Family f) : family_(std::move(f)) { validate(); }

  const Family& family() const noexcept { return family_; }

  double value(std::int64_t k) const {
    if (k < 0) throw std::invalid_argument("schedule index must be nonnegative");
    return std::visit(
        [k](const auto& f) -> double {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Constant>) {
            return f.c;
          } else if constexpr (std::is_same_v<F, Power>) {
            if (f.gamma == 0.0) return std::min(1.0, f.c);
            return std::min(1.0, f.c / std::pow(static_cast<double>(k) + 1.0, f.gamma));
          } else if constexpr (std::is_same_v<F, Periodic>) {
            return f.values[static_cast<std::size_t>(k % static_cast<std::int64_t>(f.values.size()))];
          } else {
            return static_cast<std::size_t>(k) < f.values.size() ? f.values[static_cast<std::size_t>(k)] : f.tail;
          }
        },
        family_);
  }

  /// Upper bound on sum_{k >= from} P_k; infinity when the tail diverges.
  double tail_sum_bound(std::int64_t from) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        [from](const auto& f) -> double {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Constant>) {
            return f.c > 0.0 ? inf : 0.0;
          } else if constexpr (std::is_same_v<F, Power>) {
            if (f.c == 0.0) return 0.0;
            if (f.gamma <= 1.0) return inf;
            // sum_{m >= from+1} c m^-gamma <= c/(from+1)^gamma + c int_{from+1}^inf x^-gamma dx
            const double x = static_cast<double>(from) + 1.0;
            return f.c * std::pow(x, -f.gamma) + f.c * std::pow(x, 1.0 - f.gamma) / (f.gamma - 1.0);
          } else if constexpr (std::is_same_v<F, Periodic>) {
            return std::accumulate(f.values.begin(), f.values.end(), 0.0) > 0.0 ? inf : 0.0;
          } else {
            if (f.tail > 0.0) return inf;
            double s = 0.0;
            for (std::size_t k = static_cast<std::size_t>(std::max<std::int64_t>(from, 0)); k < f.values.size(); ++k)
              s += f.values[k];
            return s;
          }
        },
        family_);
  }

  std::string describe() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Constant>) return "constant(" + std::to_string(f.c) + ")";
          else if constexpr (std::is_same_v<F, Power>)
            return "power(" + std::to_string(f.c) + ", " + std::to_string(f.gamma) + ")";
          else if constexpr (std::is_same_v<F, Periodic>)
            return "periodic(" + std::to_string(f.values.size()) + " values)";
          else return "explicit(" + std::to_string(f.values.size()) + " values, tail " + std::to_string(f.tail) + ")";
        },
        family_);
  }

  friend bool operator==(const Schedule& a, const Schedule& b) { return same_family(a.family_, b.family_); }

 private:
  static bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

  static bool same_family(const Family& a, const Family& b) {
    if (a.index() != b.index()) return false;
    return std::visit(
        [&b](const auto& f) -> bool {
          using F = std::decay_t<decltype(f)>;
          const auto& g = std::get<F>(b);
          if constexpr (std::is_same_v<F, Constant>) return f.c == g.c;
          else if constexpr (std::is_same_v<F, Power>) return f.c == g.c && f.gamma == g.gamma;
          else if constexpr (std::is_same_v<F, Periodic>) return f.values == g.values;
          else return f.values == g.values && f.tail == g.tail;
        },
        a);
  }

  void validate() const {
    std::visit(
        [](const auto& f) {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, Constant>) {
            if (!in_unit(f.c)) throw std::invalid_argument("constant schedule value outside [0, 1]");
          } else if constexpr (std::is_same_v<F, Power>) {
            if (!(f.c >= 0.0) || !(f.gamma >= 0.0) || !std::isfinite(f.c) || !std::isfinite(f.gamma))
              throw std::invalid_argument("power schedule needs c >= 0 and gamma >= 0");
          } else if constexpr (std::is_same_v<F, Periodic>) {
            if (f.values.empty()) throw std::invalid_argument("periodic schedule needs at least one value");
            if (!std::all_of(f.values.begin(), f.values.end(), in_unit))
              throw std::invalid_argument("periodic schedule value outside [0, 1]");
          } else {
            if (!std::all_of(f.values.begin(), f.values.end(), in_unit) || !in_unit(f.tail))
              throw std::invalid_argument("explicit schedule value outside [0, 1]");
          }
        },
        family_);
  }

  Family family_;
};

struct LinearGrowthWitness {
  double p_star;
  std::int64_t t_star;
};

/// Every window of t_star consecutive slots carries at least p_star mass.
struct ScheduleClass {
  bool divergent_sum = false;
  std::optional<LinearGrowthWitness> linear_growth_witness;
};

inline ScheduleClass classify(const Schedule& s) {
  return std::visit(
      [](const auto& f) -> ScheduleClass {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, Schedule::Constant>) {
          if (f.c > 0.0) return {true, LinearGrowthWitness{f.c, 1}};
          return {};
        } else if constexpr (std::is_same_v<F, Schedule::Power>) {
          if (f.c == 0.0 || f.gamma > 1.0) return {};
          if (f.gamma == 0.0) return {true, LinearGrowthWitness{std::min(1.0, f.c), 1}};
          return {true, std::nullopt};
        } else if constexpr (std::is_same_v<F, Schedule::Periodic>) {
          const double per_period = std::accumulate(f.values.begin(), f.values.end(), 0.0);
          if (per_period > 0.0)
            return {true, LinearGrowthWitness{per_period, static_cast<std::int64_t>(f.values.size())}};
          return {};
        } else {
          // Any window of length size+1 reaches into the tail.
          if (f.tail > 0.0) return {true, LinearGrowthWitness{f.tail, static_cast<std::int64_t>(f.values.size()) + 1}};
          return {};
        }
      },
      s.family());
}

/// Class of the pointwise sum P+ + P-.
inline ScheduleClass classify_sum(const Schedule& plus, const Schedule& minus) {
  const auto a = classify(plus);
  const auto b = classify(minus);
  ScheduleClass out{a.divergent_sum || b.divergent_sum, std::nullopt};
  const auto rate = [](const std::optional<LinearGrowthWitness>& w) {
    return w ? w->p_star / static_cast<double>(w->t_star) : 0.0;
  };
  if (a.linear_growth_witness || b.linear_growth_witness)
    out.linear_growth_witness = rate(a.linear_growth_witness) >= rate(b.linear_growth_witness)
                                    ? a.linear_growth_witness
                                    : b.linear_growth_witness;
  if (a.linear_growth_witness && b.linear_growth_witness && a.linear_growth_witness->t_star == b.linear_growth_witness->t_star)
    out.linear_growth_witness =
        LinearGrowthWitness{a.linear_growth_witness->p_star + b.linear_growth_witness->p_star, a.linear_growth_witness->t_star};
  return out;
}

}  // namespace gossiplab
