#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gossiplab/digraph.hpp"
#include "gossiplab/dyadic.hpp"
#include "gossiplab/matrix_lab.hpp"
#include "gossiplab/random.hpp"
#include "gossiplab/schedule.hpp"
#include "gossiplab/selection.hpp"
#include "gossiplab/simulation.hpp"

namespace gossiplab {

// ---- update-matrix families -------------------------------------------------

enum class Family {
  m2_star,  // every symmetric pair average
  m,        // symmetric and asymmetric averages along arcs of A + A^T
  m1,       // asymmetric averages along arcs of A + A^T
};

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::m2_star: return "M2*";
    case Family::m: return "M";
    case Family::m1: return "M1";
  }
  return "?";
}

/// Members of a family on n nodes. Without a selection matrix every pair
/// counts as an arc.
inline std::vector<UpdateMatrix> family_members(int n, Family family, const SelectionMatrix* a = nullptr) {
  const auto linked = [&](int i, int j) { return family == Family::m2_star || !a || (*a)(i, j) + (*a)(j, i) > 0.0; };
  std::vector<UpdateMatrix> out;
  if (family != Family::m1)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (linked(i, j)) out.push_back(UpdateMatrix::symmetric(i, j, n));
  if (family != Family::m2_star)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && linked(i, j)) out.push_back(UpdateMatrix::asymmetric(i, j, n));
  return out;
}

// ---- exhaustive product enumeration -----------------------------------------

using Chain = std::vector<UpdateMatrix>;

struct EnumerationReport {
  int n = 0;
  int depth = 0;
  Family family = Family::m2_star;
  // Chains covered, sum over d of |family|^d (saturates at uint64 max).
  std::uint64_t chains_checked = 0;
  std::uint64_t distinct_products = 0;
  // Finite-consensus products where they are ruled out (odd n, M2*).
  std::vector<Chain> violations;
  // Finite-consensus products found anywhere else.
  std::vector<Chain> witnesses;
  double min_delta_seen = 1.0;
  bool inconclusive = false;
  int depth_reached = 0;
};

struct EnumerationOptions {
  std::uint64_t ceiling = 10'000'000;
  std::size_t max_reported = 8;
  // Replaces the family members; the label still decides which outcomes
  // count as violations.
  std::optional<std::vector<UpdateMatrix>> members;
  const SelectionMatrix* selection = nullptr;
};

/// Breadth-first search over chain products with exact deduplication. A
/// product first reached at depth d stands for every chain reaching it, and
/// its extensions are explored from that first occurrence.
inline EnumerationReport enumerate_products(int n, int max_depth, Family family,
                                            const EnumerationOptions& opt = {}) {
  if (n < 2) throw std::invalid_argument("enumeration needs n >= 2");
  if (max_depth < 1) throw std::invalid_argument("enumeration depth must be at least 1");
  const auto members = opt.members ? *opt.members : family_members(n, family, opt.selection);
  if (members.empty()) throw std::invalid_argument("family has no members");
  std::vector<DyadicMatrix> expanded;
  for (const auto& u : members) expanded.push_back(expand(u));

  EnumerationReport rep;
  rep.n = n;
  rep.depth = max_depth;
  rep.family = family;
  const bool lemma_applies = family == Family::m2_star && n % 2 == 1;

  struct Node {
    DyadicMatrix product;
    std::int64_t parent;
    std::size_t member;
  };
  std::vector<Node> nodes;
  std::unordered_map<DyadicMatrix, std::int64_t> seen;
  const auto chain_of = [&](std::int64_t id) {
    Chain c;
    for (; id >= 0; id = nodes[static_cast<std::size_t>(id)].parent)
      c.push_back(members[nodes[static_cast<std::size_t>(id)].member]);
    std::reverse(c.begin(), c.end());
    return c;
  };

  std::vector<std::int64_t> frontier{-1};
  std::uint64_t layer = 1;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (int d = 1; d <= max_depth && !frontier.empty(); ++d) {
    layer = layer > kMax / members.size() ? kMax : layer * members.size();
    rep.chains_checked = rep.chains_checked > kMax - layer ? kMax : rep.chains_checked + layer;
    std::vector<std::int64_t> next;
    for (std::int64_t parent : frontier) {
      for (std::size_t m = 0; m < members.size(); ++m) {
        DyadicMatrix prod = parent < 0 ? expanded[m]
                                       : multiply(expanded[m], nodes[static_cast<std::size_t>(parent)].product);
        if (seen.contains(prod)) continue;
        const auto id = static_cast<std::int64_t>(nodes.size());
        rep.min_delta_seen = std::min(rep.min_delta_seen, delta_coefficient(prod));
        const bool consensus = is_finite_consensus(prod);
        seen.emplace(prod, id);
        nodes.push_back({std::move(prod), parent, m});
        if (consensus) {
          auto& bucket = lemma_applies ? rep.violations : rep.witnesses;
          if (bucket.size() < opt.max_reported) bucket.push_back(chain_of(id));
          continue;  // rank one absorbs every extension
        }
        next.push_back(id);
        if (nodes.size() > opt.ceiling) {
          rep.inconclusive = true;
          rep.distinct_products = nodes.size();
          rep.depth_reached = d - 1;
          return rep;
        }
      }
    }
    rep.depth_reached = d;
    frontier = std::move(next);
  }
  rep.distinct_products = nodes.size();
  return rep;
}

/// Checks that every member labelled symmetric is a doubly stochastic
/// projection; returns the offending members as one-element chains.
inline std::vector<Chain> audit_symmetric_members(const std::vector<UpdateMatrix>& members,
                                                  const std::vector<bool>& labelled_symmetric) {
  std::vector<Chain> bad;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (!labelled_symmetric[k]) continue;
    const DyadicMatrix w = expand(members[k]);
    const bool ok = w.is_row_stochastic() && w.transpose().is_row_stochastic() && w.transpose() == w &&
                    w * w == w;
    if (!ok) bad.push_back({members[k]});
  }
  return bad;
}

// ---- stall bound --------------------------------------------------------------

struct StallBound {
  int alpha1 = -1;
  int alpha2 = -1;
  double h1 = 0.0;
  double h2 = 0.0;
  // prod over [k0, horizon] of (1 - h1 P_k)(1 - h2 P_k)
  double truncated = 0.0;
  // exp(-2 (h1 + h2) * tail mass), a floor for the rest of the product
  double tail_factor = 0.0;
  std::int64_t truncated_at = 0;
  double lower_bound = 0.0;
};

/// Two nodes with the smallest h, both required below 1.
inline std::pair<int, int> stall_nodes(const std::vector<double>& h) {
  std::vector<int> order(h.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return h[static_cast<std::size_t>(a)] < h[static_cast<std::size_t>(b)]; });
  if (order.size() < 2 || h[static_cast<std::size_t>(order[1])] >= 1.0)
    throw PreconditionError("fewer than two nodes with h_i < 1");
  return {order[0], order[1]};
}

/// Probability floor for both nodes never updating from k0 on, with the
/// per-slot update chance bounded by h_i * max(P+_k, P-_k).
inline StallBound stall_probability_bound(const SelectionMatrix& a, const Schedule& plus, const Schedule& minus,
                                          std::pair<int, int> nodes, std::int64_t k0, std::int64_t horizon) {
  const int n = a.size();
  std::vector<double> h(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) h[static_cast<std::size_t>(i)] += (a(i, j) + a(j, i)) / n;
  StallBound b;
  b.alpha1 = nodes.first;
  b.alpha2 = nodes.second;
  if (b.alpha1 == b.alpha2 || b.alpha1 < 0 || b.alpha2 < 0 || b.alpha1 >= n || b.alpha2 >= n)
    throw PreconditionError("stall bound needs two distinct nodes");
  b.h1 = h[static_cast<std::size_t>(b.alpha1)];
  b.h2 = h[static_cast<std::size_t>(b.alpha2)];
  if (b.h1 >= 1.0 || b.h2 >= 1.0) throw PreconditionError("stall bound needs h < 1 at both nodes");

  const auto p = [&](std::int64_t k) { return std::max(plus.value(k), minus.value(k)); };
  double log_prod = 0.0;
  std::int64_t k = k0;
  // Extend past the horizon until log(1 - t) >= -2t applies to every tail term.
  const auto tail_ok = [&](std::int64_t from) {
    return std::max(b.h1, b.h2) * (plus.tail_sum_bound(from) + minus.tail_sum_bound(from)) <= 0.5;
  };
  for (; k <= horizon || (!tail_ok(k) && k < horizon + 10'000'000); ++k) {
    const double pk = p(k);
    const double f = (1.0 - b.h1 * pk) * (1.0 - b.h2 * pk);
    if (f <= 0.0) {
      log_prod = -std::numeric_limits<double>::infinity();
      break;
    }
    log_prod += std::log(f);
  }
  b.truncated_at = k - 1;
  b.truncated = std::exp(log_prod);
  const double tail = plus.tail_sum_bound(k) + minus.tail_sum_bound(k);
  b.tail_factor = std::isfinite(tail) && tail_ok(k) ? std::exp(-2.0 * (b.h1 + b.h2) * tail) : 0.0;
  b.lower_bound = b.truncated * b.tail_factor;
  return b;
}

inline StallBound stall_probability_bound(const SelectionMatrix& a, const Schedule& s, std::pair<int, int> nodes,
                                          std::int64_t k0, std::int64_t horizon) {
  return stall_probability_bound(a, s, Schedule::constant(0.0), nodes, k0, horizon);
}

// ---- double-connectivity counterexample -------------------------------------

struct NoConsensusCounterexample {
  TrialConfig config;
  // Which graph lacks a center: the induced graph of A, or its converse.
  bool graph_rootless = false;
  std::vector<int> group_zero;
  std::vector<int> group_one;
};

/// Builds an independent-communication configuration that never reaches
/// consensus on a graph without double connectivity. Only one link direction
/// ever succeeds, so information moves along the arcs of the rootless graph;
/// two upstream-closed node sets with disjoint members start at 0 and 1 and
/// only ever hear from themselves.
inline NoConsensusCounterexample no_consensus_counterexample(const Digraph& g, std::int64_t horizon = 100'000) {
  if (is_double_connected(g)) throw PreconditionError("graph is double connected; no counterexample exists");
  const SelectionMatrix a = selection_from_digraph(g);
  const Digraph ga = a.graph();
  const Digraph gat = converse(ga);

  NoConsensusCounterexample ce{TrialConfig(a), false, {}, {}};
  std::pair<int, int> roots;
  Digraph flow = ga;
  if (auto w = rootless_witness(ga)) {
    // Forward links carry x_j to the picker i along arc (j, i) of G_A.
    ce.graph_rootless = true;
    roots = *w;
    ce.config.plus = Schedule::constant(1.0);
    ce.config.minus = Schedule::constant(0.0);
  } else {
    // Backward links carry the picker's value along arcs of the converse.
    roots = *rootless_witness(gat);
    flow = gat;
    ce.config.plus = Schedule::constant(0.0);
    ce.config.minus = Schedule::constant(1.0);
  }
  ce.group_zero = upstream_of(flow, roots.first);
  ce.group_one = upstream_of(flow, roots.second);

  TrialConfig& c = ce.config;
  c.model = CommunicationModel::independent;
  c.x0.assign(static_cast<std::size_t>(a.size()), Dyadic(0));
  for (int v : ce.group_one) c.x0[static_cast<std::size_t>(v)] = Dyadic(1);
  c.horizon = horizon;
  c.invariant_groups = {ce.group_zero, ce.group_one};
  return ce;
}

// ---- random chains and lemma suites -----------------------------------------

inline Chain random_chain(const std::vector<UpdateMatrix>& members, int length, RandomStream& rng) {
  Chain c;
  c.reserve(static_cast<std::size_t>(length));
  for (int t = 0; t < length; ++t) c.push_back(members[static_cast<std::size_t>(rng.index(static_cast<int>(members.size())))]);
  return c;
}

/// Random row-stochastic matrix; each entry is zeroed with probability
/// `sparsity`, keeping at least one positive entry per row.
inline Eigen::MatrixXd random_stochastic(int n, double sparsity, RandomStream& rng) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform() < sparsity ? 0.0 : rng.uniform();
    if (m.row(i).sum() == 0.0) m(i, rng.index(n)) = 1.0;
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

struct PropertyReport {
  std::string name;
  std::int64_t cases = 0;
  std::int64_t violations = 0;
  std::vector<Chain> violating_chains;
};

/// delta(M_k...M_1) <= prod lambda(M_i) on random stochastic chains.
inline PropertyReport check_delta_lambda_product(int n, std::int64_t trials, int max_length, RandomStream& rng) {
  PropertyReport r{"delta-product-vs-lambda", trials, 0, {}};
  for (std::int64_t t = 0; t < trials; ++t) {
    const int len = 1 + rng.index(max_length);
    const double sparsity = rng.uniform() * 0.7;
    std::vector<Eigen::MatrixXd> ms;
    double bound = 1.0;
    for (int i = 0; i < len; ++i) {
      ms.push_back(random_stochastic(n, sparsity, rng));
      bound *= lambda_coefficient(ms.back());
    }
    if (delta_coefficient(product_chain(std::span<const Eigen::MatrixXd>(ms))) > bound + kFloatEqualityTolerance)
      ++r.violations;
  }
  return r;
}

/// Union of the members' induced graphs is contained in the product's.
inline PropertyReport check_union_containment(const SelectionMatrix& a, std::int64_t trials, int max_length,
                                              RandomStream& rng) {
  PropertyReport r{"induced-graph-union-containment", trials, 0, {}};
  const auto members = family_members(a.size(), Family::m, &a);
  for (std::int64_t t = 0; t < trials; ++t) {
    const Chain c = random_chain(members, 1 + rng.index(max_length), rng);
    Digraph u(a.size());
    for (const auto& m : c) u = graph_union(u, induced_graph(expand(m)));
    if (!induced_graph(product_chain(std::span<const UpdateMatrix>(c))).contains(u)) {
      ++r.violations;
      if (r.violating_chains.size() < 8) r.violating_chains.push_back(c);
    }
  }
  return r;
}

/// Every nonzero entry of an N-fold product is at least 2^-N, exactly.
inline PropertyReport check_entry_floor(const SelectionMatrix& a, std::int64_t trials, int max_length,
                                        RandomStream& rng) {
  PropertyReport r{"nonzero-entry-floor", trials, 0, {}};
  const auto members = family_members(a.size(), Family::m, &a);
  for (std::int64_t t = 0; t < trials; ++t) {
    const int len = 1 + rng.index(max_length);
    const Chain c = random_chain(members, len, rng);
    const DyadicMatrix p = product_chain(std::span<const UpdateMatrix>(c));
    // entry >= 2^-len  <=>  num >= 2^(exp - len)
    const std::int64_t shift = p.exponent() - len;
    const mpz_class floor_num = shift > 0 ? detail::shifted_left(mpz_class(1), shift) : mpz_class(0);
    bool ok = true;
    for (int i = 0; i < p.dim() && ok; ++i)
      for (int j = 0; j < p.dim() && ok; ++j)
        if (p.numerator(i, j) != 0 && p.numerator(i, j) < floor_num) ok = false;
    if (shift > 0 && !ok) {
      ++r.violations;
      if (r.violating_chains.size() < 8) r.violating_chains.push_back(c);
    }
  }
  return r;
}

struct ScramblingReport {
  std::int64_t chains = 0;
  int blocks_per_chain = 0;
  // lambda(product) == 1 although every block covers G_A or G_A^T.
  std::int64_t violations = 0;
  // 1 - lambda below 2^-N with N matrices in the chain.
  std::int64_t floor_violations = 0;
  std::int64_t coverage_failures = 0;
  // lambda == 1 observations; meaningful when fewer than 2 d* - 1 blocks are used.
  std::int64_t non_scrambling_observed = 0;
  double max_lambda = 0.0;
  std::vector<Chain> violating_chains;
};

/// Random chains of covering blocks. Each block lists the target graph's
/// proper arcs in random order and, for each arc (u, v), appends a family
/// member whose induced graph contains it, plus a few random members.
inline ScramblingReport scrambling_block_check(const SelectionMatrix& a, std::int64_t trials, RandomStream& rng,
                                               int blocks = 0, int max_extra = 2) {
  const Digraph ga = a.graph();
  const Digraph gat = a.converse_graph();
  if (!is_double_connected(ga)) throw PreconditionError("scrambling check needs double connectivity");
  const int d_star = std::max(diameter(ga), diameter(gat));
  const int n = a.size();
  const bool full = blocks <= 0;
  ScramblingReport rep;
  rep.blocks_per_chain = full ? 2 * d_star - 1 : blocks;
  const auto members = family_members(n, Family::m, &a);

  for (std::int64_t t = 0; t < trials; ++t) {
    Chain chain;
    bool covered = true;
    for (int b = 0; b < rep.blocks_per_chain; ++b) {
      const Digraph& target = rng.bernoulli(0.5) ? ga : gat;
      std::vector<Arc> arcs;
      for (const auto& arc : target.arcs())
        if (arc.first != arc.second) arcs.push_back(arc);
      std::shuffle(arcs.begin(), arcs.end(), rng.engine());
      Chain block;
      for (const auto& [u, v] : arcs) {
        const int extras = rng.index(max_extra + 1);
        for (int e = 0; e < extras; ++e) block.push_back(members[static_cast<std::size_t>(rng.index(static_cast<int>(members.size())))]);
        // Arc (u, v) in an induced graph means row v puts weight on column u.
        block.push_back(rng.bernoulli(0.5) ? UpdateMatrix::symmetric(u, v, n) : UpdateMatrix::asymmetric(v, u, n));
      }
      if (!induced_graph(product_chain(std::span<const UpdateMatrix>(block))).contains(target)) covered = false;
      chain.insert(chain.end(), block.begin(), block.end());
    }
    ++rep.chains;
    if (!covered) {
      ++rep.coverage_failures;
      continue;
    }
    const DyadicMatrix p = product_chain(std::span<const UpdateMatrix>(chain));
    const Dyadic overlap = row_overlap(p);
    rep.max_lambda = std::max(rep.max_lambda, 1.0 - overlap.to_double());
    if (overlap.is_zero()) {
      ++rep.non_scrambling_observed;
      if (full) {
        ++rep.violations;
        if (rep.violating_chains.size() < 8) rep.violating_chains.push_back(chain);
      }
      continue;
    }
    const Dyadic floor(mpz_class(1), static_cast<std::int64_t>(chain.size()));
    if (full && overlap < floor) ++rep.floor_violations;
  }
  return rep;
}

}  // namespace gossiplab
