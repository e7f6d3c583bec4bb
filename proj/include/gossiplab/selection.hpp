#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "gossiplab/digraph.hpp"
#include "gossiplab/errors.hpp"

namespace gossiplab {

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr double kEigenTolerance = 1e-9;

enum class RowSumMode { strict, relaxed };

/// Meeting matrix: node i, drawn with probability 1/n, picks partner j with
/// probability a(i, j). In relaxed mode rows may sum to less than one and the
/// leftover mass selects nobody.
class SelectionMatrix {
 public:
  explicit SelectionMatrix(Eigen::MatrixXd a, RowSumMode mode = RowSumMode::strict) : a_(std::move(a)), mode_(mode) {
    if (a_.rows() != a_.cols()) throw DimensionError("selection matrix must be square");
    if (a_.rows() < 3) throw std::invalid_argument("selection matrix needs n >= 3");
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      for (Eigen::Index j = 0; j < a_.cols(); ++j)
        if (!(a_(i, j) >= 0.0) || !std::isfinite(a_(i, j)))
          throw std::invalid_argument("selection matrix entries must be finite and nonnegative");
      const double s = a_.row(i).sum();
      const bool ok = mode_ == RowSumMode::strict ? std::abs(s - 1.0) <= kRowSumTolerance : s <= 1.0 + kRowSumTolerance;
      if (!ok)
        throw std::invalid_argument("row " + std::to_string(i) + " of the selection matrix sums to " +
                                    std::to_string(s));
    }
  }

  int size() const noexcept { return static_cast<int>(a_.rows()); }
  double operator()(int i, int j) const { return a_(i, j); }
  const Eigen::MatrixXd& matrix() const noexcept { return a_; }
  RowSumMode mode() const noexcept { return mode_; }
  double row_sum(int i) const { return a_.row(i).sum(); }

  Digraph graph() const { return induced_graph(a_); }
  Digraph converse_graph() const { return induced_graph(Eigen::MatrixXd(a_.transpose())); }

  /// Symmetric weighted Laplacian D - (A + A^T).
  Eigen::MatrixXd laplacian() const {
    const Eigen::MatrixXd w = a_ + a_.transpose();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a_.rows(), a_.cols());
    d.diagonal() = w.rowwise().sum();
    return d - w;
  }

 private:
  Eigen::MatrixXd a_;
  RowSumMode mode_;
};

/// Uniform choice among in-neighbours: a(i, j) = 1/indeg(i) for each arc
/// (j, i). Nodes without in-arcs get a self-loop of weight one.
inline SelectionMatrix selection_from_digraph(const Digraph& g) {
  const int n = g.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& from = g.predecessors(i);
    if (from.empty()) {
      a(i, i) = 1.0;
      continue;
    }
    for (int j : from) a(i, j) = 1.0 / static_cast<double>(from.size());
  }
  return SelectionMatrix(std::move(a));
}

inline std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver did not converge");
  const Eigen::VectorXd ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

struct StructuralConstants {
  double lambda2_star = 0.0;
  int diameter_a = 0;
  int diameter_at = 0;
  int d_star = 0;
  int e_star = 0;
  double a_star = 0.0;
  long theta0 = 0;
  std::vector<double> h;
};

inline StructuralConstants structural_constants(const SelectionMatrix& a) {
  const int n = a.size();
  const Digraph g = a.graph();
  if (!is_weakly_connected(g))
    throw ConnectivityError("induced graph is not weakly connected; the Laplacian has a repeated zero eigenvalue");

  StructuralConstants sc;
  auto ev = symmetric_eigenvalues(a.laplacian());
  if (std::abs(ev[0]) <= kEigenTolerance) ev[0] = 0.0;
  sc.lambda2_star = ev[1];
  if (sc.lambda2_star <= kEigenTolerance) throw ConnectivityError("second Laplacian eigenvalue is zero");

  sc.diameter_a = diameter(g);
  sc.diameter_at = diameter(a.converse_graph());
  sc.d_star = std::max(sc.diameter_a, sc.diameter_at);
  sc.e_star = static_cast<int>(g.proper_arc_count());

  sc.a_star = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && a(i, j) > 0.0) sc.a_star = std::min(sc.a_star, a(i, j));
  if (!std::isfinite(sc.a_star)) throw ConnectivityError("selection matrix has no positive off-diagonal entry");

  sc.theta0 = static_cast<long>(2 * sc.d_star - 1) * static_cast<long>(2 * sc.e_star - 1);
  sc.h.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) sc.h[static_cast<std::size_t>(i)] += (a(i, j) + a(j, i)) / n;
  return sc;
}

}  // namespace gossiplab
