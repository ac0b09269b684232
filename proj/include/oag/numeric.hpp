#pragma once

#include <compare>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace oag {

using Int = mpz_class;
using Rat = mpq_class;

Int floor_of(const Rat& q);
Int ceil_of(const Rat& q);
Int gcd(const Int& a, const Int& b);
Int lcm(const Int& a, const Int& b);
Int abs_of(const Int& a);
/// Least non-negative representative of a modulo m (m >= 1).
Int mod_floor(const Int& a, const Int& m);
/// Inverse of a modulo m; requires gcd(a, m) == 1.
Int mod_inverse(const Int& a, const Int& m);
bool is_integer(const Rat& q);
bool is_prime(const Int& p);

/// Canonical text: "7", "-3", "1/2". Inverse of parse_rat.
std::string to_string(const Rat& q);
std::string to_string(const Int& z);
/// Accepts "p", "-p", "p/q". Throws std::invalid_argument.
Rat parse_rat(std::string_view text);

/// Rational extended with the two infinities; totally ordered.
class ExtQRat {
 public:
  enum class Kind { NegInf, Finite, PosInf };

  ExtQRat() : kind_(Kind::Finite) {}
  ExtQRat(Rat v) : kind_(Kind::Finite), value_(std::move(v)) {}  // NOLINT
  ExtQRat(const Int& v) : kind_(Kind::Finite), value_(v) {}       // NOLINT
  ExtQRat(long v) : kind_(Kind::Finite), value_(v) {}             // NOLINT

  static ExtQRat neg_inf() { return ExtQRat(Kind::NegInf); }
  static ExtQRat pos_inf() { return ExtQRat(Kind::PosInf); }

  Kind kind() const { return kind_; }
  bool finite() const { return kind_ == Kind::Finite; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  /// Only valid when finite().
  const Rat& value() const;

  ExtQRat operator-() const;
  ExtQRat operator+(const Rat& g) const;
  /// n * (+-inf) = +-inf for n >= 1.
  ExtQRat scaled(const Int& n) const;
  ExtQRat divided(const Int& n) const;

  friend bool operator==(const ExtQRat& a, const ExtQRat& b);
  friend std::strong_ordering operator<=>(const ExtQRat& a, const ExtQRat& b);

  /// "inf", "-inf" or the rational text.
  std::string str() const;
  static ExtQRat parse(std::string_view text);

 private:
  explicit ExtQRat(Kind k) : kind_(k) {}
  Kind kind_;
  Rat value_;
};

}  // namespace oag
