#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

namespace rdv {

// Exact rational number over 64-bit integers, always in lowest terms with a
// positive denominator. Intermediate products are formed in 128 bits; a
// result that does not fit back into 64 bits throws std::overflow_error
// instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  // Accepts "p/q", "p", and plain decimals such as "-3.99968" (converted
  // exactly). Scientific notation and surrounding garbage are rejected with
  // std::invalid_argument.
  static Rational parse(std::string_view text);

  // "p/q", always with an explicit denominator ("21/1").
  std::string str() const;
  // Decimal rendering with `digits` fractional digits, rounded half away
  // from zero. Display only.
  std::string decimal(int digits) const;
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }
  bool is_zero() const { return num_ == 0; }

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  static Rational from_wide(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

Rational abs(const Rational& r);
Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace rdv

template <>
struct std::hash<rdv::Rational> {
  std::size_t operator()(const rdv::Rational& r) const noexcept {
    return std::hash<std::int64_t>{}(r.num()) * 31u ^ std::hash<std::int64_t>{}(r.den());
  }
};
