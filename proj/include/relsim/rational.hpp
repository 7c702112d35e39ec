#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "relsim/errors.hpp"

namespace relsim {

/// Exact rational number on 128-bit integers.
///
/// Probabilities in this library are products and sums of fractions with
/// small denominators (coin weights, binomial coefficients), so a fixed-width
/// representation is enough. Overflow is detected and raised as SizeError so
/// callers can fall back to Monte Carlo estimation.
class Rational {
 public:
  using Int = __int128;

  constexpr Rational() = default;
  constexpr Rational(long long n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(Int num, Int den) : num_(num), den_(den) { normalize(); }

  static Rational from_uint(unsigned long long n) {
    Rational r;
    r.num_ = static_cast<Int>(n);
    return r;
  }

  Int num() const { return num_; }
  Int den() const { return den_; }

  bool is_zero() const { return num_ == 0; }

  double to_double() const {
    return static_cast<double>(static_cast<long double>(num_) /
                               static_cast<long double>(den_));
  }

  Rational operator+(const Rational& o) const {
    Int g = gcd_int(den_, o.den_);
    Int lhs_scale = o.den_ / g;
    Int rhs_scale = den_ / g;
    return Rational(checked_add(checked_mul(num_, lhs_scale), checked_mul(o.num_, rhs_scale)),
                    checked_mul(den_, lhs_scale));
  }
  Rational operator-(const Rational& o) const { return *this + Rational(-o.num_, o.den_); }
  Rational operator*(const Rational& o) const {
    Int g1 = gcd_int(abs_int(num_), o.den_);
    Int g2 = gcd_int(abs_int(o.num_), den_);
    return Rational(checked_mul(num_ / g1, o.num_ / g2),
                    checked_mul(den_ / g2, o.den_ / g1));
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw InputError("rational division by zero");
    return *this * Rational(o.den_, o.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  Rational abs() const { return Rational(abs_int(num_), den_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return checked_mul(a.num_, b.den_) < checked_mul(b.num_, a.den_);
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  std::string str() const {
    std::string s = int_to_string(num_);
    if (den_ != 1) s += "/" + int_to_string(den_);
    return s;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

  /// n choose k as an exact rational-friendly integer; throws SizeError on overflow.
  static Rational binomial(unsigned n, unsigned k) {
    if (k > n) return Rational(0);
    if (k > n - k) k = n - k;
    Rational r(1);
    for (unsigned i = 1; i <= k; ++i) {
      r = r * Rational(static_cast<Int>(n - k + i), static_cast<Int>(i));
    }
    return r;
  }

  /// Exact integer power of a rational.
  static Rational pow(const Rational& base, unsigned e) {
    Rational r(1);
    Rational b = base;
    while (e != 0) {
      if (e & 1u) r = r * b;
      b = b * b;
      e >>= 1u;
    }
    return r;
  }

 private:
  Int num_ = 0;
  Int den_ = 1;

  void normalize() {
    if (den_ == 0) throw InputError("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    Int g = gcd_int(abs_int(num_), den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  static Int abs_int(Int v) { return v < 0 ? -v : v; }

  static Int gcd_int(Int a, Int b) {
    a = abs_int(a);
    b = abs_int(b);
    while (b != 0) {
      Int t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  static Int checked_mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) throw SizeError("rational overflow in multiply");
    return r;
  }
  static Int checked_add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) throw SizeError("rational overflow in add");
    return r;
  }

  static std::string int_to_string(Int v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                              : static_cast<unsigned __int128>(v);
    std::string s;
    while (u != 0) {
      s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
      u /= 10;
    }
    if (neg) s.insert(s.begin(), '-');
    return s;
  }
};

/// Parses "3/4", "0.75" or "1" exactly into a rational.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw InputError("empty rational literal");
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    long long n = std::stoll(text.substr(0, slash));
    long long d = std::stoll(text.substr(slash + 1));
    return Rational(n, d);
  }
  auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(std::stoll(text));
  std::string whole = text.substr(0, dot);
  std::string frac = text.substr(dot + 1);
  if (frac.size() > 18) throw InputError("decimal literal too long: " + text);
  bool neg = !whole.empty() && whole[0] == '-';
  long long w = whole.empty() || whole == "-" ? 0 : std::stoll(whole);
  long long f = frac.empty() ? 0 : std::stoll(frac);
  Rational den = Rational::pow(Rational(10), static_cast<unsigned>(frac.size()));
  Rational r = Rational(w).abs() + Rational(f) / den;
  return neg ? Rational(0) - r : r;
}

}  // namespace relsim
