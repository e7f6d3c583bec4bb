#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gossiplab/errors.hpp"

namespace gossiplab {

using Arc = std::pair<int, int>;

/// Directed graph on nodes 0..n-1. Arcs are kept sorted and unique;
/// self-loops are allowed.
class Digraph {
 public:
  explicit Digraph(int n = 1) : n_(n), out_(static_cast<std::size_t>(n)), in_(static_cast<std::size_t>(n)) {
    if (n < 1) throw std::invalid_argument("digraph needs at least one node");
  }

  Digraph(int n, std::vector<Arc> arcs) : Digraph(n) {
    std::sort(arcs.begin(), arcs.end());
    if (std::adjacent_find(arcs.begin(), arcs.end()) != arcs.end())
      throw std::invalid_argument("digraph arc list contains duplicates");
    for (const auto& [u, v] : arcs) {
      check_node(u);
      check_node(v);
    }
    arcs_ = std::move(arcs);
    rebuild_adjacency();
  }

  int size() const noexcept { return n_; }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  const std::vector<int>& successors(int u) const { return out_.at(static_cast<std::size_t>(u)); }
  const std::vector<int>& predecessors(int v) const { return in_.at(static_cast<std::size_t>(v)); }

  bool has_arc(int u, int v) const { return std::binary_search(arcs_.begin(), arcs_.end(), Arc{u, v}); }

  // Inserts if absent; returns whether the arc was new.
  bool add_arc(int u, int v) {
    check_node(u);
    check_node(v);
    auto it = std::lower_bound(arcs_.begin(), arcs_.end(), Arc{u, v});
    if (it != arcs_.end() && *it == Arc{u, v}) return false;
    arcs_.insert(it, Arc{u, v});
    rebuild_adjacency();
    return true;
  }

  // Arcs whose endpoints differ.
  std::size_t proper_arc_count() const {
    return static_cast<std::size_t>(
        std::count_if(arcs_.begin(), arcs_.end(), [](const Arc& a) { return a.first != a.second; }));
  }

  bool contains(const Digraph& other) const {
    return other.n_ == n_ && std::includes(arcs_.begin(), arcs_.end(), other.arcs_.begin(), other.arcs_.end());
  }

  friend bool operator==(const Digraph&, const Digraph&) = default;

 private:
  void check_node(int u) const {
    if (u < 0 || u >= n_)
      throw std::invalid_argument("arc endpoint " + std::to_string(u) + " outside [0, " + std::to_string(n_) + ")");
  }

  void rebuild_adjacency() {
    for (auto& o : out_) o.clear();
    for (auto& i : in_) i.clear();
    for (const auto& [u, v] : arcs_) {
      out_[static_cast<std::size_t>(u)].push_back(v);
      in_[static_cast<std::size_t>(v)].push_back(u);
    }
  }

  int n_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

inline Digraph graph_union(const Digraph& a, const Digraph& b) {
  if (a.size() != b.size()) throw DimensionError("graph union needs equal node sets");
  std::vector<Arc> arcs;
  std::set_union(a.arcs().begin(), a.arcs().end(), b.arcs().begin(), b.arcs().end(), std::back_inserter(arcs));
  return Digraph(a.size(), std::move(arcs));
}

/// Induced graph of a square nonnegative matrix: arc (j, i) iff m(i, j) > 0.
/// Works with anything exposing rows(), cols() and a comparable operator()(i, j).
template <class Matrix>
Digraph induced_graph(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("induced graph needs a square matrix");
  const int n = static_cast<int>(m.rows());
  std::vector<Arc> arcs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m(i, j) > 0) arcs.emplace_back(j, i);
  return Digraph(n, std::move(arcs));
}

inline Digraph converse(const Digraph& g) {
  std::vector<Arc> arcs;
  arcs.reserve(g.arcs().size());
  for (const auto& [u, v] : g.arcs()) arcs.emplace_back(v, u);
  return Digraph(g.size(), std::move(arcs));
}

/// BFS distances from source along arc directions; -1 marks unreachable.
inline std::vector<int> distances_from(const Digraph& g, int source) {
  std::vector<int> dist(static_cast<std::size_t>(g.size()), -1);
  std::deque<int> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : g.successors(u)) {
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

inline std::vector<bool> reachable_from(const Digraph& g, int source) {
  const auto dist = distances_from(g, source);
  std::vector<bool> seen(dist.size());
  std::transform(dist.begin(), dist.end(), seen.begin(), [](int d) { return d >= 0; });
  return seen;
}

/// Nodes from which `target` is reachable (target included).
inline std::vector<int> upstream_of(const Digraph& g, int target) {
  const auto seen = reachable_from(converse(g), target);
  std::vector<int> nodes;
  for (int v = 0; v < g.size(); ++v)
    if (seen[static_cast<std::size_t>(v)]) nodes.push_back(v);
  return nodes;
}

inline bool is_weakly_connected(const Digraph& g) {
  std::vector<Arc> both;
  both.reserve(2 * g.arcs().size());
  for (const auto& [u, v] : g.arcs()) {
    both.emplace_back(u, v);
    both.emplace_back(v, u);
  }
  std::sort(both.begin(), both.end());
  both.erase(std::unique(both.begin(), both.end()), both.end());
  const auto seen = reachable_from(Digraph(g.size(), std::move(both)), 0);
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

/// Centers (roots): nodes that reach every node.
inline std::vector<int> centers(const Digraph& g) {
  std::vector<int> roots;
  for (int u = 0; u < g.size(); ++u) {
    const auto seen = reachable_from(g, u);
    if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) roots.push_back(u);
  }
  return roots;
}

inline bool is_quasi_strongly_connected(const Digraph& g) { return !centers(g).empty(); }

inline bool is_strongly_connected(const Digraph& g) {
  return static_cast<int>(centers(g).size()) == g.size();
}

inline bool is_double_connected(const Digraph& g) {
  return is_quasi_strongly_connected(g) && is_quasi_strongly_connected(converse(g));
}

/// Two distinct nodes whose upstream sets are disjoint. Exists exactly when
/// the graph has no center.
inline std::optional<std::pair<int, int>> rootless_witness(const Digraph& g) {
  const int n = g.size();
  std::vector<std::vector<int>> up(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) up[static_cast<std::size_t>(v)] = upstream_of(g, v);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const auto& ua = up[static_cast<std::size_t>(a)];
      const auto& ub = up[static_cast<std::size_t>(b)];
      std::vector<int> common;
      std::set_intersection(ua.begin(), ua.end(), ub.begin(), ub.end(), std::back_inserter(common));
      if (common.empty()) return std::pair{a, b};
    }
  }
  return std::nullopt;
}

/// Longest shortest path over ordered pairs (i != j) with j reachable from i.
inline int diameter(const Digraph& g) {
  int best = -1;
  for (int u = 0; u < g.size(); ++u) {
    const auto dist = distances_from(g, u);
    for (int v = 0; v < g.size(); ++v)
      if (v != u) best = std::max(best, dist[static_cast<std::size_t>(v)]);
  }
  if (best < 1) throw UndefinedDiameterError("diameter undefined: no arc joins two distinct nodes");
  return best;
}

}  // namespace gossiplab
