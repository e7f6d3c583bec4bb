#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "gossiplab/dyadic.hpp"
#include "gossiplab/errors.hpp"
#include "gossiplab/selection.hpp"

namespace gossiplab {

inline constexpr double kFloatEqualityTolerance = 1e-12;

enum class CommunicationModel { dependent, independent };

inline std::string_view to_string(CommunicationModel m) {
  return m == CommunicationModel::dependent ? "dependent" : "independent";
}

/// One realized gossip update.
///   symmetric(i, j):  I - (e_i - e_j)(e_i - e_j)^T / 2, both nodes move to the midpoint.
///   asymmetric(i, j): I - e_i (e_i - e_j)^T / 2, node i (receiver) averages with j.
///   identity:         nothing moves.
class UpdateMatrix {
 public:
  enum class Kind { identity, symmetric, asymmetric };

  static UpdateMatrix identity(int n) { return UpdateMatrix(Kind::identity, -1, -1, n); }
  static UpdateMatrix symmetric(int i, int j, int n) {
    check_pair(i, j, n);
    return UpdateMatrix(Kind::symmetric, std::min(i, j), std::max(i, j), n);
  }
  static UpdateMatrix asymmetric(int receiver, int source, int n) {
    check_pair(receiver, source, n);
    return UpdateMatrix(Kind::asymmetric, receiver, source, n);
  }

  Kind kind() const noexcept { return kind_; }
  int i() const noexcept { return i_; }
  int j() const noexcept { return j_; }
  int dim() const noexcept { return n_; }

  friend bool operator==(const UpdateMatrix&, const UpdateMatrix&) = default;
  friend auto operator<=>(const UpdateMatrix& a, const UpdateMatrix& b) {
    return std::tie(a.kind_, a.i_, a.j_, a.n_) <=> std::tie(b.kind_, b.i_, b.j_, b.n_);
  }

 private:
  UpdateMatrix(Kind k, int i, int j, int n) : kind_(k), i_(i), j_(j), n_(n) {}

  static void check_pair(int i, int j, int n) {
    if (i == j) throw std::invalid_argument("update matrix needs two distinct nodes");
    if (i < 0 || j < 0 || i >= n || j >= n) throw DimensionError("update matrix node outside [0, n)");
  }

  Kind kind_;
  int i_;
  int j_;
  int n_;
};

inline std::string_view to_string(UpdateMatrix::Kind k) {
  switch (k) {
    case UpdateMatrix::Kind::identity: return "identity";
    case UpdateMatrix::Kind::symmetric: return "symmetric";
    case UpdateMatrix::Kind::asymmetric: return "asymmetric";
  }
  return "?";
}

/// Exact expansion with denominator 2.
inline DyadicMatrix expand(const UpdateMatrix& u) {
  const int n = u.dim();
  DyadicMatrix m(n, 1);
  for (int r = 0; r < n; ++r) m.numerator(r, r) = 2;
  const int i = u.i(), j = u.j();
  switch (u.kind()) {
    case UpdateMatrix::Kind::identity: break;
    case UpdateMatrix::Kind::symmetric:
      m.numerator(i, i) = 1;
      m.numerator(i, j) = 1;
      m.numerator(j, j) = 1;
      m.numerator(j, i) = 1;
      break;
    case UpdateMatrix::Kind::asymmetric:
      m.numerator(i, i) = 1;
      m.numerator(i, j) = 1;
      break;
  }
  m.normalize();
  return m;
}

inline Eigen::MatrixXd to_real(const DyadicMatrix& m) {
  Eigen::MatrixXd out(m.dim(), m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) out(i, j) = m.to_double(i, j);
  return out;
}

inline Eigen::MatrixXd expand_real(const UpdateMatrix& u) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(u.dim(), u.dim());
  const int i = u.i(), j = u.j();
  if (u.kind() == UpdateMatrix::Kind::symmetric) {
    m(i, i) = m(i, j) = m(j, j) = m(j, i) = 0.5;
  } else if (u.kind() == UpdateMatrix::Kind::asymmetric) {
    m(i, i) = m(i, j) = 0.5;
  }
  return m;
}

inline bool is_stochastic(const Eigen::MatrixXd& m, double tol = kFloatEqualityTolerance) {
  if (m.rows() != m.cols()) return false;
  if ((m.array() < 0.0).any()) return false;
  return ((m.rowwise().sum().array() - 1.0).abs() <= tol).all();
}

// ---- coefficients -----------------------------------------------------------

/// Largest column-wise gap between two rows.
inline double delta_coefficient(const Eigen::MatrixXd& m) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) best = std::max(best, m.col(j).maxCoeff() - m.col(j).minCoeff());
  return best;
}

inline double delta_coefficient(const DyadicMatrix& m) {
  mpz_class best = 0;
  for (int j = 0; j < m.dim(); ++j) {
    mpz_class lo = m.numerator(0, j), hi = m.numerator(0, j);
    for (int i = 1; i < m.dim(); ++i) {
      if (m.numerator(i, j) < lo) lo = m.numerator(i, j);
      if (m.numerator(i, j) > hi) hi = m.numerator(i, j);
    }
    if (hi - lo > best) best = hi - lo;
  }
  return Dyadic(best, m.exponent()).to_double();
}

/// min over row pairs of the shared mass sum_j min(m_aj, m_bj); equals 1 - lambda.
inline Dyadic row_overlap(const DyadicMatrix& m) {
  mpz_class best = -1;
  for (int a = 0; a < m.dim(); ++a)
    for (int b = a + 1; b < m.dim(); ++b) {
      mpz_class s = 0;
      for (int j = 0; j < m.dim(); ++j) s += std::min(m.numerator(a, j), m.numerator(b, j));
      if (best < 0 || s < best) best = s;
    }
  if (best < 0) best = detail::shifted_left(mpz_class(1), m.exponent());  // 1x1
  return Dyadic(best, m.exponent());
}

inline double lambda_coefficient(const Eigen::MatrixXd& m) {
  double overlap = 1.0;
  for (Eigen::Index a = 0; a < m.rows(); ++a)
    for (Eigen::Index b = a + 1; b < m.rows(); ++b) overlap = std::min(overlap, m.row(a).cwiseMin(m.row(b)).sum());
  return 1.0 - overlap;
}

inline double lambda_coefficient(const DyadicMatrix& m) { return 1.0 - row_overlap(m).to_double(); }

inline bool is_scrambling(const DyadicMatrix& m) { return !row_overlap(m).is_zero(); }
inline bool is_scrambling(const Eigen::MatrixXd& m) { return lambda_coefficient(m) < 1.0 - kFloatEqualityTolerance; }

// ---- products ---------------------------------------------------------------

/// Product of a time-ordered list: ms[0] acts first, so the result is
/// ms[k-1] * ... * ms[0].
inline DyadicMatrix product_chain(std::span<const DyadicMatrix> ms, std::int64_t cap = kDyadicExponentCap) {
  if (ms.empty()) throw std::invalid_argument("product of an empty chain");
  DyadicMatrix acc = ms.front();
  for (std::size_t t = 1; t < ms.size(); ++t) {
    if (ms[t].dim() != acc.dim()) throw DimensionError("chain matrices differ in dimension");
    acc = multiply(ms[t], acc, cap);
  }
  return acc;
}

inline Eigen::MatrixXd product_chain(std::span<const Eigen::MatrixXd> ms) {
  if (ms.empty()) throw std::invalid_argument("product of an empty chain");
  Eigen::MatrixXd acc = ms.front();
  for (std::size_t t = 1; t < ms.size(); ++t) {
    if (ms[t].rows() != acc.rows()) throw DimensionError("chain matrices differ in dimension");
    acc = ms[t] * acc;
  }
  return acc;
}

inline DyadicMatrix product_chain(std::span<const UpdateMatrix> us, std::int64_t cap = kDyadicExponentCap) {
  if (us.empty()) throw std::invalid_argument("product of an empty chain");
  DyadicMatrix acc = expand(us.front());
  for (std::size_t t = 1; t < us.size(); ++t) acc = multiply(expand(us[t]), acc, cap);
  return acc;
}

/// Exact check that all rows coincide (a rank-one consensus matrix).
inline bool is_finite_consensus(const DyadicMatrix& m) {
  for (int i = 1; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j)
      if (m.numerator(i, j) != m.numerator(0, j)) return false;
  return true;
}

struct ApproximateVerdict {
  bool value;
  std::string_view warning;
};

/// Float input cannot certify exact equality; compares within 1e-12 and says so.
inline ApproximateVerdict is_finite_consensus(const Eigen::MatrixXd& m) {
  return {delta_coefficient(m) <= kFloatEqualityTolerance,
          "float matrix: row equality checked within 1e-12, not exactly"};
}

// ---- sample space and expectations ------------------------------------------

struct WeightedUpdate {
  double probability;
  UpdateMatrix update;
};

/// Law of W(k) for one slot, merged over identical updates. Probabilities are
/// accumulated outcome by outcome rather than obtained by complement.
inline std::vector<WeightedUpdate> update_law(const SelectionMatrix& a, CommunicationModel model, double p_plus,
                                              double p_minus) {
  if (model == CommunicationModel::dependent && p_plus != p_minus)
    throw ModelMismatchError("dependent communication requires equal success probabilities");
  const int n = a.size();
  std::map<UpdateMatrix, double> law;
  const auto add = [&](const UpdateMatrix& u, double p) {
    if (p > 0.0) law[u] += p;
  };
  const UpdateMatrix none = UpdateMatrix::identity(n);
  for (int i = 0; i < n; ++i) {
    add(none, (1.0 - a.row_sum(i)) / n);
    for (int j = 0; j < n; ++j) {
      const double sel = a(i, j) / n;
      if (sel == 0.0) continue;
      if (i == j) {
        add(none, sel);
        continue;
      }
      if (model == CommunicationModel::dependent) {
        add(UpdateMatrix::symmetric(i, j, n), sel * p_plus);
        add(none, sel * (1.0 - p_plus));
      } else {
        add(UpdateMatrix::symmetric(i, j, n), sel * p_plus * p_minus);
        add(UpdateMatrix::asymmetric(i, j, n), sel * p_plus * (1.0 - p_minus));
        add(UpdateMatrix::asymmetric(j, i, n), sel * (1.0 - p_plus) * p_minus);
        add(none, sel * (1.0 - p_plus) * (1.0 - p_minus));
      }
    }
  }
  std::vector<WeightedUpdate> out;
  out.reserve(law.size());
  for (const auto& [u, p] : law) out.push_back({p, u});
  return out;
}

inline Eigen::MatrixXd expectation(std::span<const WeightedUpdate> law, int n) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  for (const auto& w : law) e += w.probability * expand_real(w.update);
  return e;
}

/// Closed form I - p/(2n) (D - (A + A^T)).
inline Eigen::MatrixXd expected_update_dependent(const SelectionMatrix& a, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("success probability outside [0, 1]");
  const int n = a.size();
  return Eigen::MatrixXd::Identity(n, n) - (p / (2.0 * n)) * a.laplacian();
}

inline Eigen::MatrixXd expected_update_independent(const SelectionMatrix& a, double p_plus, double p_minus) {
  if (p_plus < 0.0 || p_plus > 1.0 || p_minus < 0.0 || p_minus > 1.0)
    throw std::invalid_argument("success probability outside [0, 1]");
  const auto law = update_law(a, CommunicationModel::independent, p_plus, p_minus);
  return expectation(law, a.size());
}

/// Second largest eigenvalue of a symmetric matrix.
inline double second_largest_eigenvalue(const Eigen::MatrixXd& s) {
  const auto ev = symmetric_eigenvalues(s);
  return ev[ev.size() - 2];
}

}  // namespace gossiplab
