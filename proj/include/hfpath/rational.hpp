#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace hfpath {

/// Exact fraction over int64 with a positive, reduced denominator.
///
/// Metric values in this library have denominators in {1, 2, 4}, so the
/// 64-bit range is never approached in practice.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  constexpr Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    normalize();
  }

  constexpr std::int64_t num() const noexcept { return num_; }
  constexpr std::int64_t den() const noexcept { return den_; }
  constexpr double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend constexpr Rational operator+(Rational a, Rational b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend constexpr Rational operator-(Rational a, Rational b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
  }
  friend constexpr Rational operator*(Rational a, Rational b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend constexpr Rational operator/(Rational a, Rational b) {
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  constexpr Rational& operator+=(Rational o) { return *this = *this + o; }

  friend constexpr bool operator==(const Rational&, const Rational&) = default;
  friend constexpr std::strong_ordering operator<=>(Rational a, Rational b) {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
  }

  friend std::ostream& operator<<(std::ostream& os, Rational r) {
    os << r.num_;
    if (r.den_ != 1) os << '/' << r.den_;
    return os;
  }

 private:
  constexpr void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace hfpath
