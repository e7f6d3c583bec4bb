#include <gtest/gtest.h>

#include <cmath>

#include "gossiplab/ensemble.hpp"
#include "gossiplab/verification.hpp"

using namespace gossiplab;

namespace {

SelectionMatrix complete(int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(n, n, 1.0 / (n - 1));
  a.diagonal().setZero();
  return SelectionMatrix(a);
}

SelectionMatrix ring(int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, (i + 1) % n) = 1;
  return SelectionMatrix(a);
}

}  // namespace

TEST(FamilyMembers, Sizes) {
  EXPECT_EQ(family_members(3, Family::m2_star).size(), 3u);
  EXPECT_EQ(family_members(5, Family::m2_star).size(), 10u);
  EXPECT_EQ(family_members(3, Family::m1).size(), 6u);
  const SelectionMatrix r = ring(4);
  EXPECT_EQ(family_members(4, Family::m, &r).size(), 4u + 8u);
}

TEST(Enumeration, OddSymmetricChainsNeverReachConsensus) {
  const auto r3 = enumerate_products(3, 10, Family::m2_star);
  EXPECT_TRUE(r3.violations.empty());
  EXPECT_FALSE(r3.inconclusive);
  EXPECT_GT(r3.min_delta_seen, 0.0);
  const auto r5 = enumerate_products(5, 6, Family::m2_star);
  EXPECT_TRUE(r5.violations.empty());
  EXPECT_GT(r5.min_delta_seen, 0.0);
}

TEST(Enumeration, ChainCountIsGeometricSum) {
  const auto r = enumerate_products(3, 10, Family::m2_star);
  std::uint64_t expected = 0, layer = 1;
  for (int d = 1; d <= 10; ++d) expected += (layer *= 3);
  EXPECT_EQ(r.chains_checked, expected);
  EXPECT_EQ(r.distinct_products, 81u);
}

TEST(Enumeration, EvenNodeCountHasWitness) {
  const auto r = enumerate_products(4, 6, Family::m2_star);
  EXPECT_TRUE(r.violations.empty());
  ASSERT_FALSE(r.witnesses.empty());
  // Replay the witness on an exact state: consensus in finitely many steps
  // with the sum kept.
  const std::vector<Dyadic> x0{Dyadic(0), Dyadic(1), Dyadic(5), Dyadic(-3)};
  const DyadicVector x = replay(x0, r.witnesses.front());
  for (std::size_t i = 1; i < 4; ++i) EXPECT_TRUE(x.equal(0, i));
  EXPECT_EQ(x.sum(), Dyadic(3));
  EXPECT_EQ(r.min_delta_seen, 0.0);
}

TEST(Enumeration, KnownPairingWitness) {
  const Chain c{UpdateMatrix::symmetric(0, 1, 4), UpdateMatrix::symmetric(2, 3, 4), UpdateMatrix::symmetric(0, 2, 4),
                UpdateMatrix::symmetric(1, 3, 4)};
  EXPECT_TRUE(is_finite_consensus(product_chain(std::span<const UpdateMatrix>(c))));
}

TEST(Enumeration, DepthOneDeltaIsOne) {
  for (auto f : {Family::m2_star, Family::m, Family::m1})
    EXPECT_EQ(enumerate_products(3, 1, f).min_delta_seen, 1.0);
}

TEST(Enumeration, CeilingMakesItInconclusive) {
  EnumerationOptions o;
  o.ceiling = 50;
  const auto r = enumerate_products(5, 6, Family::m2_star, o);
  EXPECT_TRUE(r.inconclusive);
  EXPECT_LT(r.depth_reached, 6);
}

TEST(Enumeration, FaultyMemberIsCaughtByAudit) {
  auto members = family_members(3, Family::m2_star);
  std::vector<bool> labels(members.size(), true);
  members.push_back(UpdateMatrix::asymmetric(0, 1, 3));
  labels.push_back(true);
  const auto bad = audit_symmetric_members(members, labels);
  ASSERT_EQ(bad.size(), 1u);
  EXPECT_EQ(bad.front().front(), UpdateMatrix::asymmetric(0, 1, 3));
}

TEST(StallBound, PowerScheduleProduct) {
  const SelectionMatrix a = complete(3);
  const auto b = stall_probability_bound(a, Schedule::power(1, 2), {0, 1}, 0, 100000);
  // Oracle: direct product of (1 - (2/3)/(k+1)^2), squared.
  double sigma = 1.0;
  for (int k = 0; k < 2'000'000; ++k) sigma *= 1.0 - (2.0 / 3.0) / ((k + 1.0) * (k + 1.0));
  EXPECT_NEAR(b.truncated, sigma * sigma, 1e-4);
  EXPECT_LE(b.lower_bound, sigma * sigma);
  EXPECT_GT(b.lower_bound, 0.99 * sigma * sigma);
  // Closed form: prod (1 - c/k^2) = sin(pi sqrt c) / (pi sqrt c) up to the k = 1 factor.
  const double r = std::sqrt(2.0 / 3.0);
  EXPECT_NEAR(sigma, std::sin(M_PI * r) / (M_PI * r), 1e-6);
}

TEST(StallBound, Examples) {
  const SelectionMatrix a = complete(3);
  EXPECT_NEAR(stall_probability_bound(a, Schedule::constant(0.5), {0, 1}, 0, 200).lower_bound, 0.0, 1e-30);
  EXPECT_EQ(stall_probability_bound(a, Schedule::constant(0), {0, 1}, 0, 200).lower_bound, 1.0);
  EXPECT_THROW(stall_probability_bound(a, Schedule::constant(0), {0, 0}, 0, 200), PreconditionError);
  EXPECT_EQ(stall_nodes(structural_constants(a).h), (std::pair<int, int>{0, 1}));
  EXPECT_THROW(stall_nodes({0.5, 1.0, 1.2}), PreconditionError);
}

TEST(NoConsensusCounterexample, DirectedStar) {
  const Digraph star(3, {{0, 1}, {0, 2}});
  const auto ce = no_consensus_counterexample(star, 2000);
  EXPECT_FALSE(ce.graph_rootless);
  EXPECT_EQ(ce.config.plus.value(0), 0.0);
  EXPECT_EQ(ce.config.minus.value(0), 1.0);
  EXPECT_EQ(ce.group_zero, (std::vector<int>{1}));
  EXPECT_EQ(ce.group_one, (std::vector<int>{2}));
  const auto s = run_ensemble(ce.config, {.trials = 200, .master_seed = 3});
  EXPECT_EQ(s.consensus.successes, 0);
  EXPECT_EQ(s.group_violations, 0);
}

TEST(NoConsensusCounterexample, ConverseStarUsesForwardLinks) {
  const Digraph in_star(3, {{1, 0}, {2, 0}});
  const auto ce = no_consensus_counterexample(in_star, 2000);
  EXPECT_TRUE(ce.graph_rootless);
  EXPECT_EQ(ce.config.plus.value(0), 1.0);
  const auto s = run_ensemble(ce.config, {.trials = 200, .master_seed = 4});
  EXPECT_EQ(s.consensus.successes, 0);
  EXPECT_EQ(s.group_violations, 0);
}

TEST(NoConsensusCounterexample, DisconnectedGraph) {
  const Digraph two(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}});
  const auto ce = no_consensus_counterexample(two, 2000);
  const auto s = run_ensemble(ce.config, {.trials = 100, .master_seed = 5});
  EXPECT_EQ(s.consensus.successes, 0);
  EXPECT_EQ(s.group_violations, 0);
}

TEST(NoConsensusCounterexample, DoubleConnectedHasNoCounterexample) {
  EXPECT_THROW(no_consensus_counterexample(Digraph(3, {{0, 1}, {1, 2}, {2, 0}})), PreconditionError);
}

TEST(Scrambling, CompleteGraphFullBlocks) {
  RandomStream rng(1, 0, StreamPurpose::verification);
  const auto r = scrambling_block_check(complete(3), 1000, rng);
  EXPECT_EQ(r.violations, 0);
  EXPECT_EQ(r.floor_violations, 0);
  EXPECT_EQ(r.coverage_failures, 0);
  EXPECT_LT(r.max_lambda, 1.0);
}

TEST(Scrambling, RingFullBlocks) {
  RandomStream rng(2, 0, StreamPurpose::verification);
  const auto r = scrambling_block_check(ring(4), 500, rng);
  EXPECT_EQ(r.blocks_per_chain, 2 * 3 - 1);
  EXPECT_EQ(r.violations, 0);
  EXPECT_EQ(r.floor_violations, 0);
  EXPECT_EQ(r.coverage_failures, 0);
}

TEST(Scrambling, SingleBlockOnRingCanFail) {
  RandomStream rng(3, 0, StreamPurpose::verification);
  const auto r = scrambling_block_check(ring(5), 2000, rng, 1, 0);
  EXPECT_EQ(r.violations, 0);
  EXPECT_GT(r.non_scrambling_observed, 0);
}

TEST(Scrambling, NeedsDoubleConnectivity) {
  RandomStream rng(4, 0, StreamPurpose::verification);
  EXPECT_THROW(scrambling_block_check(selection_from_digraph(Digraph(3, {{0, 1}, {0, 2}})), 10, rng),
               PreconditionError);
}

TEST(PropertySuites, ZeroViolations) {
  RandomStream rng(5, 0, StreamPurpose::verification);
  for (int n : {3, 4, 5}) EXPECT_EQ(check_delta_lambda_product(n, 1000, 8, rng).violations, 0);
  for (const auto& a : {complete(3), ring(4), complete(5)}) {
    EXPECT_EQ(check_union_containment(a, 1000, 12, rng).violations, 0);
    EXPECT_EQ(check_entry_floor(a, 1000, 12, rng).violations, 0);
  }
}
