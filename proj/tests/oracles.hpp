#pragma once

// Reference implementations used only by the tests. They share no code with
// the library: dense vectors, textbook algorithms, rational arithmetic.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

using RealMatrix = std::vector<std::vector<double>>;
using RationalMatrix = std::vector<std::vector<mpq_class>>;

// Cyclic Jacobi rotations on a symmetric matrix; eigenvalues ascending.
inline std::vector<double> jacobi_eigenvalues(RealMatrix a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-26) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;

// All-pairs shortest path lengths; arcs given as (from, to).
inline std::vector<std::vector<int>> floyd_warshall(int n, const std::vector<std::pair<int, int>>& arcs) {
  std::vector<std::vector<int>> d(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), kUnreachable));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (auto [u, v] : arcs)
    if (u != v) d[u][v] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

inline int diameter(int n, const std::vector<std::pair<int, int>>& arcs) {
  const auto d = floyd_warshall(n, arcs);
  int best = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && d[i][j] < kUnreachable) best = std::max(best, d[i][j]);
  return best;
}

inline bool has_root(int n, const std::vector<std::pair<int, int>>& arcs) {
  const auto d = floyd_warshall(n, arcs);
  for (int r = 0; r < n; ++r) {
    bool all = true;
    for (int j = 0; j < n; ++j) all = all && d[r][j] < kUnreachable;
    if (all) return true;
  }
  return false;
}

inline RationalMatrix identity(int n) {
  RationalMatrix m(static_cast<std::size_t>(n), std::vector<mpq_class>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

// I - (e_i - e_j)(e_i - e_j)^T / 2
inline RationalMatrix symmetric_average(int i, int j, int n) {
  RationalMatrix m = identity(n);
  const mpq_class half(1, 2);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const int ur = (r == i) - (r == j), uc = (c == i) - (c == j);
      m[r][c] -= half * ur * uc;
    }
  return m;
}

// I - e_i (e_i - e_j)^T / 2
inline RationalMatrix asymmetric_average(int i, int j, int n) {
  RationalMatrix m = identity(n);
  const mpq_class half(1, 2);
  for (int c = 0; c < n; ++c) m[i][c] -= half * ((c == i) - (c == j));
  return m;
}

inline RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t n = a.size();
  RationalMatrix m(n, std::vector<mpq_class>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) m[i][j] += a[i][k] * b[k][j];
  return m;
}

inline mpq_class delta(const RationalMatrix& m) {
  mpq_class best = 0;
  for (std::size_t j = 0; j < m.size(); ++j)
    for (std::size_t a = 0; a < m.size(); ++a)
      for (std::size_t b = 0; b < m.size(); ++b) best = std::max<mpq_class>(best, abs(m[a][j] - m[b][j]));
  return best;
}

inline mpq_class lambda(const RationalMatrix& m) {
  mpq_class overlap = 1;
  for (std::size_t a = 0; a < m.size(); ++a)
    for (std::size_t b = 0; b < m.size(); ++b) {
      mpq_class s = 0;
      for (std::size_t j = 0; j < m.size(); ++j) s += std::min(m[a][j], m[b][j]);
      overlap = std::min(overlap, s);
    }
  return 1 - overlap;
}

inline RealMatrix to_real(const RationalMatrix& m) {
  RealMatrix r(m.size(), std::vector<double>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) r[i][j] = m[i][j].get_d();
  return r;
}

// E[W] summed outcome by outcome: pair (i, j) with a_ij / n, then the two link
// coins. dependent: one coin with p_plus.
inline RealMatrix expected_update(const RealMatrix& a, double p_plus, double p_minus, bool dependent) {
  const int n = static_cast<int>(a.size());
  RealMatrix e(a.size(), std::vector<double>(a.size(), 0.0));
  const auto add = [&](const RationalMatrix& w, double p) {
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) e[r][c] += p * w[r][c].get_d();
  };
  const RationalMatrix id = identity(n);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += a[i][j];
    add(id, (1.0 - row) / n);
    for (int j = 0; j < n; ++j) {
      const double sel = a[i][j] / n;
      if (i == j) {
        add(id, sel);
        continue;
      }
      if (dependent) {
        add(symmetric_average(i, j, n), sel * p_plus);
        add(id, sel * (1 - p_plus));
      } else {
        add(symmetric_average(i, j, n), sel * p_plus * p_minus);
        add(asymmetric_average(i, j, n), sel * p_plus * (1 - p_minus));
        add(asymmetric_average(j, i, n), sel * (1 - p_plus) * p_minus);
        add(id, sel * (1 - p_plus) * (1 - p_minus));
      }
    }
  }
  return e;
}

}  // namespace oracle
