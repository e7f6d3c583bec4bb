#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "gossiplab/errors.hpp"
#include "gossiplab/selection.hpp"

namespace gossiplab {

/// T_com(eps) <= slope * log(1/eps) + offset. `value` is slope * log(1/eps);
/// the offset is reported on its own.
struct TcomBound {
  double slope = 0.0;
  double value = 0.0;
  double offset = 0.0;
};

namespace detail {
inline void check_window(double p_star, std::int64_t t_star) {
  if (t_star < 1) throw InvalidConstantsError("T* must be at least 1");
  if (!(p_star > 0.0) || p_star > static_cast<double>(t_star))
    throw InvalidConstantsError("p* must lie in (0, T*]");
}
inline void check_epsilon(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
}
}  // namespace detail

/// Dependent communication: slope 3 / log(1 / (1 - lambda2* p* / (2 n T*))).
inline TcomBound tcom_bound_dependent(const StructuralConstants& sc, double p_star, std::int64_t t_star, int n,
                                      double epsilon) {
  detail::check_window(p_star, t_star);
  detail::check_epsilon(epsilon);
  if (!(sc.lambda2_star > 0.0)) throw InvalidConstantsError("lambda2* must be positive");
  const double rate = sc.lambda2_star * p_star / (2.0 * n * static_cast<double>(t_star));
  if (rate >= 1.0) throw InvalidConstantsError("lambda2* p* / (2 n T*) = " + std::to_string(rate) + " >= 1");
  const double per_slot = -std::log1p(-rate);
  const double t = static_cast<double>(t_star);
  TcomBound b;
  b.slope = 3.0 / per_slot;
  b.value = b.slope * std::log(1.0 / epsilon);
  // c* = (1 - rate)^T*; offset T* log(2(n-1)/(c* n)) / log(1/c*).
  const double log_inv_c = t * per_slot;
  b.offset = t * (std::log(2.0 * (n - 1) / n) + log_inv_c) / log_inv_c;
  return b;
}

/// Independent communication: slope (4 T* theta0 / p*) / log(1 / (1 - (a*/(4n))^theta0)).
inline TcomBound tcom_bound_independent(const StructuralConstants& sc, double p_star, std::int64_t t_star, int n,
                                        double epsilon) {
  if (!(p_star > 0.0)) throw InvalidConstantsError("p* must be positive");
  if (t_star < 1) throw InvalidConstantsError("T* must be at least 1");
  detail::check_epsilon(epsilon);
  const double theta0 = static_cast<double>(sc.theta0);
  const double gain = std::pow(sc.a_star / (4.0 * n), theta0);
  const double per_block = -std::log1p(-gain);
  const double t = static_cast<double>(t_star);
  TcomBound b;
  b.slope = 4.0 * t * theta0 / p_star / per_block;
  b.value = b.slope * std::log(1.0 / epsilon);
  b.offset = 2.0 * theta0 * t / p_star * (std::log(static_cast<double>(n)) / per_block + 2.0);
  return b;
}

}  // namespace gossiplab
