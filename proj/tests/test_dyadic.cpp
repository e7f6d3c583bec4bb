#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gossiplab/dyadic.hpp"

using namespace gossiplab;

namespace {

mpq_class as_rational(const Dyadic& d) {
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(d.exponent()));
  return mpq_class(d.numerator(), den);
}

}  // namespace

TEST(Dyadic, NormalizesToLowestTerms) {
  const Dyadic d(mpz_class(12), 4);
  EXPECT_EQ(d.numerator(), 3);
  EXPECT_EQ(d.exponent(), 2);
  EXPECT_EQ(Dyadic(mpz_class(0), 9).exponent(), 0);
  EXPECT_EQ(Dyadic(5).to_double(), 5.0);
}

TEST(Dyadic, FromDoubleIsExact) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int t = 0; t < 1000; ++t) {
    const double v = u(rng) * std::ldexp(1.0, static_cast<int>(rng() % 60) - 30);
    EXPECT_EQ(Dyadic::from_double(v).to_double(), v);
    EXPECT_EQ(as_rational(Dyadic::from_double(v)), mpq_class(v));
  }
  EXPECT_EQ(Dyadic::from_double(0.5), Dyadic(mpz_class(1), 1));
}

TEST(Dyadic, ArithmeticMatchesRationals) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 1000; ++t) {
    const Dyadic a(mpz_class(static_cast<long>(rng() % 100000) - 50000), static_cast<std::int64_t>(rng() % 70));
    const Dyadic b(mpz_class(static_cast<long>(rng() % 100000) - 50000), static_cast<std::int64_t>(rng() % 70));
    EXPECT_EQ(as_rational(a + b), as_rational(a) + as_rational(b));
    EXPECT_EQ(as_rational(a - b), as_rational(a) - as_rational(b));
    EXPECT_EQ(as_rational(midpoint(a, b)), (as_rational(a) + as_rational(b)) / 2);
    EXPECT_EQ(a < b, as_rational(a) < as_rational(b));
    EXPECT_EQ(a == b, as_rational(a) == as_rational(b));
  }
}

TEST(DyadicVector, AveragingStaysExact) {
  const std::vector<Dyadic> x0{Dyadic(0), Dyadic(1), Dyadic::from_double(0.5)};
  DyadicVector x(x0);
  x.average_pair(0, 1);
  EXPECT_EQ(x[0], Dyadic::from_double(0.5));
  EXPECT_EQ(x[1], Dyadic::from_double(0.5));
  x.average_into(2, 0);
  EXPECT_EQ(x[2], Dyadic::from_double(0.5));
  EXPECT_EQ(x.sum(), Dyadic::from_double(1.5));
  x.average_into(0, 1);
  EXPECT_TRUE(x.equal(0, 1));

  std::mt19937_64 rng(4);
  std::vector<mpq_class> oracle{0, 1, mpq_class(1, 2)};
  DyadicVector y(x0);
  for (int t = 0; t < 5000; ++t) {
    const std::size_t i = rng() % 3, j = (i + 1 + rng() % 2) % 3;
    if (rng() % 2) {
      y.average_pair(i, j);
      oracle[i] = oracle[j] = (oracle[i] + oracle[j]) / 2;
    } else {
      y.average_into(i, j);
      oracle[i] = (oracle[i] + oracle[j]) / 2;
    }
  }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(as_rational(y[i]), oracle[i]);
}

TEST(DyadicMatrix, MultiplyAndHash) {
  DyadicMatrix a(2, 1);
  a.numerator(0, 0) = 1;
  a.numerator(0, 1) = 1;
  a.numerator(1, 1) = 2;
  const DyadicMatrix sq = a * a;
  EXPECT_EQ(sq.to_double(0, 0), 0.25);
  EXPECT_EQ(sq.to_double(0, 1), 0.75);
  EXPECT_EQ(sq.to_double(1, 1), 1.0);
  DyadicMatrix b(2, 3);
  b.numerator(0, 0) = 4;
  b.numerator(0, 1) = 4;
  b.numerator(1, 1) = 8;
  b.normalize();
  EXPECT_EQ(a, b);
  EXPECT_EQ(std::hash<DyadicMatrix>{}(a), std::hash<DyadicMatrix>{}(b));
  EXPECT_THROW(multiply(sq, sq, 3), DyadicOverflowError);
}
