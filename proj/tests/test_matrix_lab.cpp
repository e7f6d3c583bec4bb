#include <gtest/gtest.h>

#include <random>

#include "gossiplab/matrix_lab.hpp"
#include "gossiplab/random.hpp"
#include "gossiplab/verification.hpp"
#include "oracles.hpp"

using namespace gossiplab;

namespace {

SelectionMatrix k3() {
  Eigen::MatrixXd a(3, 3);
  a << 0, .5, .5, .5, 0, .5, .5, .5, 0;
  return SelectionMatrix(a);
}

Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> r) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

oracle::RationalMatrix oracle_of(const UpdateMatrix& u) {
  switch (u.kind()) {
    case UpdateMatrix::Kind::identity: return oracle::identity(u.dim());
    case UpdateMatrix::Kind::symmetric: return oracle::symmetric_average(u.i(), u.j(), u.dim());
    case UpdateMatrix::Kind::asymmetric: return oracle::asymmetric_average(u.i(), u.j(), u.dim());
  }
  return {};
}

void expect_equal(const DyadicMatrix& m, const oracle::RationalMatrix& o) {
  ASSERT_EQ(static_cast<std::size_t>(m.dim()), o.size());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) {
      mpq_class v(m.numerator(i, j));
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(m.exponent()));
      v /= den;
      EXPECT_EQ(v, o[i][j]) << "entry " << i << "," << j;
    }
}

}  // namespace

TEST(UpdateMatrix, ExpandExamples) {
  EXPECT_TRUE(to_real(expand(UpdateMatrix::symmetric(0, 1, 3))).isApprox(rows({{.5, .5, 0}, {.5, .5, 0}, {0, 0, 1}})));
  EXPECT_TRUE(to_real(expand(UpdateMatrix::asymmetric(0, 1, 3))).isApprox(rows({{.5, .5, 0}, {0, 1, 0}, {0, 0, 1}})));
  EXPECT_EQ(expand(UpdateMatrix::identity(3)), DyadicMatrix::identity(3));
  EXPECT_THROW(UpdateMatrix::symmetric(1, 1, 3), std::invalid_argument);
  EXPECT_THROW(UpdateMatrix::asymmetric(0, 3, 3), std::invalid_argument);
}

TEST(UpdateMatrix, MatchesDefiningFormula) {
  for (int n = 3; n <= 5; ++n)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        expect_equal(expand(UpdateMatrix::symmetric(i, j, n)), oracle::symmetric_average(i, j, n));
        expect_equal(expand(UpdateMatrix::asymmetric(i, j, n)), oracle::asymmetric_average(i, j, n));
      }
}

TEST(UpdateMatrix, SymmetricIsDoublyStochasticProjection) {
  for (const auto& u : family_members(4, Family::m2_star)) {
    const DyadicMatrix w = expand(u);
    EXPECT_TRUE(w.is_row_stochastic());
    EXPECT_TRUE(w.transpose().is_row_stochastic());
    EXPECT_EQ(w.transpose(), w);
    EXPECT_EQ(w * w, w);
    EXPECT_EQ(w.transpose() * w, w);
  }
  const DyadicMatrix a = expand(UpdateMatrix::asymmetric(0, 1, 3));
  EXPECT_TRUE(a.is_row_stochastic());
  EXPECT_FALSE(a.transpose().is_row_stochastic());
}

TEST(Coefficients, DeltaExamples) {
  EXPECT_DOUBLE_EQ(delta_coefficient(Eigen::MatrixXd(Eigen::MatrixXd::Identity(3, 3))), 1.0);
  const Eigen::MatrixXd rank_one = Eigen::VectorXd::Ones(3) * Eigen::RowVector3d(0.2, 0.3, 0.5);
  EXPECT_DOUBLE_EQ(delta_coefficient(rank_one), 0.0);
  EXPECT_DOUBLE_EQ(delta_coefficient(expand(UpdateMatrix::symmetric(0, 1, 3))), 1.0);
}

TEST(Coefficients, LambdaExamples) {
  EXPECT_DOUBLE_EQ(lambda_coefficient(Eigen::MatrixXd(Eigen::MatrixXd::Identity(3, 3))), 1.0);
  EXPECT_DOUBLE_EQ(lambda_coefficient(Eigen::MatrixXd(Eigen::MatrixXd::Constant(3, 3, 1.0 / 3))), 0.0);
  EXPECT_DOUBLE_EQ(lambda_coefficient(expand(UpdateMatrix::symmetric(0, 1, 3))), 1.0);
  EXPECT_FALSE(is_scrambling(expand(UpdateMatrix::symmetric(0, 1, 3))));
  EXPECT_TRUE(is_scrambling(Eigen::MatrixXd(Eigen::MatrixXd::Constant(3, 3, 1.0 / 3))));
}

TEST(ProductChain, Examples) {
  const std::vector<UpdateMatrix> twice{UpdateMatrix::symmetric(0, 1, 3), UpdateMatrix::symmetric(0, 1, 3)};
  EXPECT_EQ(product_chain(std::span<const UpdateMatrix>(twice)), expand(twice[0]));
  const std::vector<UpdateMatrix> ids(3, UpdateMatrix::identity(3));
  EXPECT_EQ(product_chain(std::span<const UpdateMatrix>(ids)), DyadicMatrix::identity(3));
  const std::vector<UpdateMatrix> mixed{UpdateMatrix::asymmetric(0, 1, 3), UpdateMatrix::symmetric(1, 2, 3)};
  const Eigen::MatrixXd p = to_real(product_chain(std::span<const UpdateMatrix>(mixed)));
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j)
      if (p(i, j) != 0.0) {
        EXPECT_GE(p(i, j), 0.25);
      }
}

TEST(ProductChain, NewestOnTheLeft) {
  // x(2) = W1 W0 x(0) with W0 applied first.
  const std::vector<UpdateMatrix> chain{UpdateMatrix::asymmetric(0, 1, 3), UpdateMatrix::asymmetric(1, 2, 3)};
  const auto expected = oracle::multiply(oracle::asymmetric_average(1, 2, 3), oracle::asymmetric_average(0, 1, 3));
  expect_equal(product_chain(std::span<const UpdateMatrix>(chain)), expected);
}

TEST(ProductChain, RandomChainsMatchRationalOracle) {
  RandomStream rng(9, 0, StreamPurpose::verification);
  const auto members = family_members(4, Family::m);
  for (int t = 0; t < 200; ++t) {
    const Chain c = random_chain(members, 1 + rng.index(15), rng);
    oracle::RationalMatrix o = oracle::identity(4);
    for (const auto& u : c) o = oracle::multiply(oracle_of(u), o);
    const DyadicMatrix p = product_chain(std::span<const UpdateMatrix>(c));
    expect_equal(p, o);
    EXPECT_DOUBLE_EQ(delta_coefficient(p), oracle::delta(o).get_d());
    EXPECT_DOUBLE_EQ(lambda_coefficient(p), oracle::lambda(o).get_d());
    EXPECT_EQ(is_finite_consensus(p), oracle::delta(o) == 0);
    EXPECT_TRUE(p.is_row_stochastic());
  }
}

TEST(ProductChain, FloatAgreesWithExact) {
  RandomStream rng(10, 0, StreamPurpose::verification);
  const auto members = family_members(3, Family::m);
  for (int t = 0; t < 100; ++t) {
    const Chain c = random_chain(members, 20, rng);
    std::vector<Eigen::MatrixXd> reals;
    for (const auto& u : c) reals.push_back(expand_real(u));
    EXPECT_TRUE(product_chain(std::span<const Eigen::MatrixXd>(reals))
                    .isApprox(to_real(product_chain(std::span<const UpdateMatrix>(c))), 1e-14));
  }
}

TEST(ProductChain, ExponentCapAsksForFloatMode) {
  const std::vector<UpdateMatrix> chain(60, UpdateMatrix::asymmetric(0, 1, 3));
  std::vector<UpdateMatrix> alternating;
  for (int k = 0; k < 40; ++k) {
    alternating.push_back(UpdateMatrix::asymmetric(0, 1, 3));
    alternating.push_back(UpdateMatrix::asymmetric(1, 2, 3));
    alternating.push_back(UpdateMatrix::asymmetric(2, 0, 3));
  }
  try {
    product_chain(std::span<const UpdateMatrix>(alternating), 16);
    FAIL() << "expected overflow";
  } catch (const DyadicOverflowError& e) {
    EXPECT_NE(std::string(e.what()).find("float"), std::string::npos);
  }
  EXPECT_NO_THROW(product_chain(std::span<const UpdateMatrix>(chain)));
}

TEST(FiniteConsensus, Examples) {
  DyadicMatrix ones(3, 2);
  for (int i = 0; i < 3; ++i) {
    ones.numerator(i, 0) = 1;
    ones.numerator(i, 1) = 1;
    ones.numerator(i, 2) = 2;
  }
  EXPECT_TRUE(is_finite_consensus(ones));
  EXPECT_FALSE(is_finite_consensus(DyadicMatrix::identity(3)));
  const auto approx = is_finite_consensus(Eigen::MatrixXd(Eigen::MatrixXd::Constant(3, 3, 1.0 / 3)));
  EXPECT_TRUE(approx.value);
  EXPECT_FALSE(approx.warning.empty());
}

TEST(ExpectedUpdate, DependentExamples) {
  const SelectionMatrix a = k3();
  EXPECT_TRUE(expected_update_dependent(a, 0.0).isApprox(Eigen::MatrixXd::Identity(3, 3)));
  const Eigen::MatrixXd e = expected_update_dependent(a, 1.0);
  Eigen::MatrixXd lap(3, 3);
  lap << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  EXPECT_TRUE(e.isApprox(Eigen::MatrixXd::Identity(3, 3) - lap / 6.0));
  EXPECT_NEAR(second_largest_eigenvalue(e), 0.5, 1e-12);
}

TEST(ExpectedUpdate, IndependentExamples) {
  const SelectionMatrix a = k3();
  EXPECT_TRUE(expected_update_independent(a, 0, 0).isApprox(Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_TRUE(expected_update_independent(a, 1, 1).isApprox(expected_update_dependent(a, 1), 1e-15));
  const Eigen::MatrixXd push = expected_update_independent(a, 1, 0);
  EXPECT_TRUE(is_stochastic(push));
  EXPECT_NEAR(push.rowwise().sum().maxCoeff(), 1.0, 1e-15);
  const Eigen::MatrixXd half = expected_update_independent(a, 0.5, 0.5);
  EXPECT_TRUE(half.isApprox(half.transpose(), 1e-15));
  EXPECT_THROW(update_law(a, CommunicationModel::dependent, 0.5, 0.4), ModelMismatchError);
}

TEST(ExpectedUpdate, AsymmetricMixtureForNonSymmetricSelection) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m(0, 1) = m(1, 2) = m(2, 0) = 1;
  const Eigen::MatrixXd push = expected_update_independent(SelectionMatrix(m), 1, 0);
  EXPECT_TRUE(is_stochastic(push));
  EXPECT_FALSE(push.isApprox(push.transpose(), 1e-9));
}

TEST(ExpectedUpdate, AgreesWithOutcomeEnumerationOracle) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const int n = 3 + t % 3;
    Eigen::MatrixXd a(n, n);
    oracle::RealMatrix ar(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = u(rng) < 0.4 ? 0.0 : u(rng);
      if (a.row(i).sum() == 0.0) a(i, (i + 1) % n) = 1.0;
      a.row(i) /= a.row(i).sum();
      for (int j = 0; j < n; ++j) ar[i][j] = a(i, j);
    }
    const SelectionMatrix s(a);
    const double pp = u(rng), pm = u(rng);
    const auto ind = oracle::expected_update(ar, pp, pm, false);
    const auto dep = oracle::expected_update(ar, pp, pp, true);
    const Eigen::MatrixXd ei = expected_update_independent(s, pp, pm);
    const Eigen::MatrixXd ed = expected_update_dependent(s, pp);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        EXPECT_NEAR(ei(i, j), ind[i][j], 1e-12);
        EXPECT_NEAR(ed(i, j), dep[i][j], 1e-12);
      }
    if (!is_weakly_connected(s.graph())) continue;
    const auto sc = structural_constants(s);
    EXPECT_LE(second_largest_eigenvalue(ed), 1.0 - sc.lambda2_star * pp / (2.0 * n) + 1e-9);
  }
}

TEST(ExpectedUpdate, EigenvalueIdentityOnCompleteGraph) {
  const SelectionMatrix a = k3();
  for (double p : {0.1, 0.5, 0.9, 1.0})
    EXPECT_NEAR(second_largest_eigenvalue(expected_update_dependent(a, p)), 1.0 - 3.0 * p / 6.0, 1e-9);
}
