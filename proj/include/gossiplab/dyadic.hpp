#pragma once

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gossiplab/errors.hpp"

namespace gossiplab {

/// Denominator exponent cap for exact matrix products.
inline constexpr std::int64_t kDyadicExponentCap = 4096;

namespace detail {

inline std::int64_t trailing_zeros(const mpz_class& v) {
  return static_cast<std::int64_t>(mpz_scan1(v.get_mpz_t(), 0));
}

inline double ldexp_mpz(const mpz_class& num, std::int64_t exponent) {
  if (num == 0) return 0.0;
  long e = 0;
  const double mant = mpz_get_d_2exp(&e, num.get_mpz_t());
  return std::ldexp(mant, static_cast<int>(e - exponent));
}

inline mpz_class shifted_left(const mpz_class& v, std::int64_t bits) {
  mpz_class out;
  mpz_mul_2exp(out.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
  return out;
}

inline void hash_mix(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

inline std::size_t hash_mpz(const mpz_class& v) {
  std::size_t h = static_cast<std::size_t>(mpz_sgn(v.get_mpz_t()) + 1);
  const std::size_t limbs = mpz_size(v.get_mpz_t());
  for (std::size_t i = 0; i < limbs; ++i) hash_mix(h, static_cast<std::size_t>(mpz_getlimbn(v.get_mpz_t(), i)));
  return h;
}

}  // namespace detail

/// Exact number num / 2^exp with exp >= 0, normalized so that num is odd
/// whenever exp > 0. The representation is unique.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(long value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  Dyadic(mpz_class num, std::int64_t exponent) : num_(std::move(num)), exp_(exponent) {
    if (exp_ < 0) {
      num_ = detail::shifted_left(num_, -exp_);
      exp_ = 0;
    }
    normalize();
  }

  /// Exact image of a finite double.
  static Dyadic from_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("dyadic conversion needs a finite double");
    int e = 0;
    const double mant = std::frexp(v, &e);  // v = mant * 2^e, |mant| in [0.5, 1)
    const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
    return Dyadic(mpz_class(static_cast<long>(scaled)), 53 - static_cast<std::int64_t>(e));
  }

  const mpz_class& numerator() const noexcept { return num_; }
  std::int64_t exponent() const noexcept { return exp_; }
  double to_double() const { return detail::ldexp_mpz(num_, exp_); }
  bool is_zero() const { return num_ == 0; }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    const std::int64_t e = std::max(a.exp_, b.exp_);
    return Dyadic(detail::shifted_left(a.num_, e - a.exp_) + detail::shifted_left(b.num_, e - b.exp_), e);
  }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) {
    const std::int64_t e = std::max(a.exp_, b.exp_);
    return Dyadic(detail::shifted_left(a.num_, e - a.exp_) - detail::shifted_left(b.num_, e - b.exp_), e);
  }
  Dyadic half() const { return Dyadic(num_, exp_ + 1); }

  friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.exp_ == b.exp_ && a.num_ == b.num_; }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    const std::int64_t e = std::max(a.exp_, b.exp_);
    const int c = cmp(detail::shifted_left(a.num_, e - a.exp_), detail::shifted_left(b.num_, e - b.exp_));
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

  std::string to_string() const {
    return exp_ == 0 ? num_.get_str() : num_.get_str() + "/2^" + std::to_string(exp_);
  }

 private:
  void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    const std::int64_t tz = std::min(detail::trailing_zeros(num_), exp_);
    if (tz > 0) {
      mpz_fdiv_q_2exp(num_.get_mpz_t(), num_.get_mpz_t(), static_cast<mp_bitcnt_t>(tz));
      exp_ -= tz;
    }
  }

  mpz_class num_{0};
  std::int64_t exp_ = 0;
};

inline Dyadic midpoint(const Dyadic& a, const Dyadic& b) { return (a + b).half(); }

/// Exact state vector with one shared denominator 2^exp.
class DyadicVector {
 public:
  DyadicVector() = default;
  explicit DyadicVector(std::span<const Dyadic> values) : num_(values.size()) {
    for (const auto& v : values) exp_ = std::max(exp_, v.exponent());
    for (std::size_t i = 0; i < values.size(); ++i)
      num_[i] = detail::shifted_left(values[i].numerator(), exp_ - values[i].exponent());
  }

  std::size_t size() const noexcept { return num_.size(); }
  std::int64_t exponent() const noexcept { return exp_; }
  Dyadic operator[](std::size_t i) const { return Dyadic(num_.at(i), exp_); }
  double to_double(std::size_t i) const { return detail::ldexp_mpz(num_[i], exp_); }
  bool equal(std::size_t i, std::size_t j) const { return num_[i] == num_[j]; }

  // Sets entries i and j to their common midpoint.
  void average_pair(std::size_t i, std::size_t j) {
    scratch_ = num_[i] + num_[j];
    if (mpz_odd_p(scratch_.get_mpz_t())) {
      grow();
      num_[i] = scratch_;
      num_[j] = scratch_;
    } else {
      mpz_fdiv_q_2exp(num_[i].get_mpz_t(), scratch_.get_mpz_t(), 1);
      num_[j] = num_[i];
    }
  }

  // Sets entry i to the midpoint of entries i and j; j is untouched.
  void average_into(std::size_t i, std::size_t j) {
    scratch_ = num_[i] + num_[j];
    if (mpz_odd_p(scratch_.get_mpz_t())) {
      grow();
      num_[i] = scratch_;
    } else {
      mpz_fdiv_q_2exp(num_[i].get_mpz_t(), scratch_.get_mpz_t(), 1);
    }
  }

  Dyadic sum() const {
    mpz_class total = 0;
    for (const auto& v : num_) total += v;
    return Dyadic(total, exp_);
  }

  std::vector<Dyadic> values() const {
    std::vector<Dyadic> out;
    out.reserve(num_.size());
    for (const auto& v : num_) out.emplace_back(v, exp_);
    return out;
  }

 private:
  void grow() {
    for (auto& v : num_) v <<= 1;
    ++exp_;
  }

  std::vector<mpz_class> num_;
  std::int64_t exp_ = 0;
  mpz_class scratch_;
};

/// Square matrix with exact dyadic entries num(i, j) / 2^exp sharing one
/// exponent, kept in lowest terms.
class DyadicMatrix {
 public:
  DyadicMatrix() = default;
  explicit DyadicMatrix(int n, std::int64_t exponent = 0)
      : n_(n), exp_(exponent), num_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    if (n < 1) throw DimensionError("dyadic matrix needs a positive dimension");
  }

  static DyadicMatrix identity(int n) {
    DyadicMatrix m(n);
    for (int i = 0; i < n; ++i) m.num_[m.index(i, i)] = 1;
    return m;
  }

  int rows() const noexcept { return n_; }
  int cols() const noexcept { return n_; }
  int dim() const noexcept { return n_; }
  std::int64_t exponent() const noexcept { return exp_; }

  const mpz_class& numerator(int i, int j) const { return num_[index(i, j)]; }
  mpz_class& numerator(int i, int j) { return num_[index(i, j)]; }
  Dyadic entry(int i, int j) const { return Dyadic(numerator(i, j), exp_); }
  // Sign-compatible accessor so generic graph code can test m(i, j) > 0.
  int operator()(int i, int j) const { return sgn(numerator(i, j)); }
  double to_double(int i, int j) const { return detail::ldexp_mpz(numerator(i, j), exp_); }

  void normalize() {
    std::int64_t tz = exp_;
    for (const auto& v : num_)
      if (v != 0) tz = std::min(tz, detail::trailing_zeros(v));
    if (tz <= 0) return;
    for (auto& v : num_) mpz_fdiv_q_2exp(v.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(tz));
    exp_ -= tz;
  }

  bool is_row_stochastic() const {
    const mpz_class one = detail::shifted_left(mpz_class(1), exp_);
    for (int i = 0; i < n_; ++i) {
      mpz_class s = 0;
      for (int j = 0; j < n_; ++j) {
        if (numerator(i, j) < 0) return false;
        s += numerator(i, j);
      }
      if (s != one) return false;
    }
    return true;
  }

  DyadicMatrix transpose() const {
    DyadicMatrix t(n_, exp_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) t.num_[t.index(j, i)] = numerator(i, j);
    return t;
  }

  /// Exact product; throws DyadicOverflowError when the combined exponent
  /// would pass `cap`.
  friend DyadicMatrix multiply(const DyadicMatrix& a, const DyadicMatrix& b,
                               std::int64_t cap = kDyadicExponentCap) {
    if (a.n_ != b.n_) throw DimensionError("dyadic product needs equal dimensions");
    if (a.exp_ + b.exp_ > cap)
      throw DyadicOverflowError("dyadic exponent " + std::to_string(a.exp_ + b.exp_) + " exceeds cap " +
                                std::to_string(cap) + "; rerun in float arithmetic");
    DyadicMatrix c(a.n_, a.exp_ + b.exp_);
    for (int i = 0; i < a.n_; ++i)
      for (int k = 0; k < a.n_; ++k) {
        const mpz_class& aik = a.numerator(i, k);
        if (aik == 0) continue;
        for (int j = 0; j < a.n_; ++j) mpz_addmul(c.numerator(i, j).get_mpz_t(), aik.get_mpz_t(), b.numerator(k, j).get_mpz_t());
      }
    c.normalize();
    return c;
  }

  friend DyadicMatrix operator*(const DyadicMatrix& a, const DyadicMatrix& b) { return multiply(a, b); }
  friend bool operator==(const DyadicMatrix& a, const DyadicMatrix& b) {
    return a.n_ == b.n_ && a.exp_ == b.exp_ && a.num_ == b.num_;
  }

  std::size_t hash() const {
    std::size_t h = static_cast<std::size_t>(n_);
    detail::hash_mix(h, static_cast<std::size_t>(exp_));
    for (const auto& v : num_) detail::hash_mix(h, detail::hash_mpz(v));
    return h;
  }

 private:
  std::size_t index(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) throw DimensionError("dyadic matrix index out of range");
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  std::int64_t exp_ = 0;
  std::vector<mpz_class> num_;
};

}  // namespace gossiplab

template <>
struct std::hash<gossiplab::DyadicMatrix> {
  std::size_t operator()(const gossiplab::DyadicMatrix& m) const { return m.hash(); }
};
