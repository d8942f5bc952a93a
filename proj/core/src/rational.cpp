#include "linevo/rational.hpp"

#include <numeric>

#include "linevo/errors.hpp"

namespace linevo {

namespace {

std::int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw UnsupportedError("exponent arithmetic overflow");
  return static_cast<std::int64_t>(v);
}

Ratio make(__int128 n, __int128 d) {
  if (d == 0) throw InvariantError("zero denominator in exponent");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n;
  __int128 b = d;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  return Ratio(narrow(n), narrow(d));
}

}  // namespace

Ratio::Ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvariantError("zero denominator in exponent");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

std::int64_t Ratio::floor() const noexcept {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

Ratio Ratio::frac() const { return *this - Ratio(floor()); }

Ratio Ratio::from_rational(const Rational& q) {
  if (!q.get_num().fits_slong_p() || !q.get_den().fits_slong_p())
    throw UnsupportedError("exponent too large: " + q.get_str());
  return Ratio(q.get_num().get_si(), q.get_den().get_si());
}

std::string Ratio::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Ratio operator+(const Ratio& a, const Ratio& b) {
  return make(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
              static_cast<__int128>(a.den_) * b.den_);
}

Ratio operator-(const Ratio& a, const Ratio& b) { return a + (-b); }

Ratio operator*(const Ratio& a, const Ratio& b) {
  return make(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

Ratio operator/(const Ratio& a, const Ratio& b) {
  if (b.num_ == 0) throw InvariantError("division by zero exponent");
  return make(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) noexcept {
  __int128 l = static_cast<__int128>(a.num_) * b.den_;
  __int128 r = static_cast<__int128>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return narrow(static_cast<__int128>(a) / std::gcd(a, b) * b); }

std::string rational_str(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace linevo
