#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kemeny {

using int128 = __int128;

constexpr int128 abs128(int128 v) { return v < 0 ? -v : v; }

constexpr int128 gcd128(int128 a, int128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::string to_string(int128 v);

// Exact rational with 128-bit components. Margins are bounded by the vote
// count m and block sizes by n, so reduced numerators/denominators stay far
// below the 128-bit range for n, m up to 10^4; cross-multiplied comparisons
// stay exact.
struct Rational {
  int128 num = 0;
  int128 den = 1;  // > 0, reduced

  Rational() = default;
  Rational(long long v) : num(v) {}
  Rational(int128 n, int128 d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    int128 g = gcd128(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return {a.num * b.den + b.num * a.den, a.den * b.den};
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return {a.num * b.den - b.num * a.den, a.den * b.den};
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return {a.num * b.num, a.den * b.den};
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num == 0) throw std::domain_error("rational division by zero");
    return {a.num * b.den, a.den * b.num};
  }
  Rational operator-() const {
    Rational r;
    r.num = -num;
    r.den = den;
    return r;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num * b.den < b.num * a.den;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
};

}  // namespace kemeny
