#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>

namespace linevo {

using Integer = mpz_class;
using Rational = mpq_class;

/// Small exact rational for generator exponents. Kept in lowest terms with a
/// positive denominator; arithmetic throws UnsupportedError on int64 overflow.
class Ratio {
 public:
  constexpr Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  bool is_integer() const noexcept { return den_ == 1; }
  bool is_zero() const noexcept { return num_ == 0; }
  int sign() const noexcept { return (num_ > 0) - (num_ < 0); }

  std::int64_t floor() const noexcept;
  /// Fractional part in [0, 1).
  Ratio frac() const;

  Rational to_rational() const { return Rational(num_, den_); }
  static Ratio from_rational(const Rational& q);

  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend Ratio operator+(const Ratio& a, const Ratio& b);
  friend Ratio operator-(const Ratio& a, const Ratio& b);
  friend Ratio operator*(const Ratio& a, const Ratio& b);
  friend Ratio operator/(const Ratio& a, const Ratio& b);
  Ratio operator-() const { return Ratio(-num_, den_); }
  Ratio& operator+=(const Ratio& o) { return *this = *this + o; }
  Ratio& operator-=(const Ratio& o) { return *this = *this - o; }

  friend bool operator==(const Ratio& a, const Ratio& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) noexcept;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::int64_t lcm64(std::int64_t a, std::int64_t b);

/// Rational to string "p" or "p/q".
std::string rational_str(const Rational& q);

}  // namespace linevo
