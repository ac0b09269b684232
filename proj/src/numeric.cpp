#include "oag/numeric.hpp"

#include <stdexcept>

namespace oag {

Int floor_of(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Int ceil_of(const Rat& q) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Int gcd(const Int& a, const Int& b) {
  Int r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Int lcm(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Int abs_of(const Int& a) { return a < 0 ? Int(-a) : a; }

Int mod_floor(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

Int mod_inverse(const Int& a, const Int& m) {
  if (m == 1) return 0;
  Int r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::domain_error("mod_inverse: " + a.get_str() + " is not invertible modulo " + m.get_str());
  return r;
}

bool is_integer(const Rat& q) { return q.get_den() == 1; }

bool is_prime(const Int& p) { return p >= 2 && mpz_probab_prime_p(p.get_mpz_t(), 40) > 0; }

std::string to_string(const Rat& q) { return q.get_str(); }
std::string to_string(const Int& z) { return z.get_str(); }

Rat parse_rat(std::string_view text) {
  std::string s(text);
  auto bad = [&] { return std::invalid_argument("not a rational literal: '" + s + "'"); };
  if (s.empty()) throw bad();
  auto slash = s.find('/');
  auto valid_int = [](const std::string& t, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && !t.empty() && (t[0] == '-' || t[0] == '+')) i = 1;
    if (i >= t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_int(num, true) || !valid_int(den, false)) throw bad();
  if (num[0] == '+') num.erase(0, 1);
  if (Int(den) == 0) throw bad();
  Rat q{Int(num), Int(den)};
  q.canonicalize();
  return q;
}

const Rat& ExtQRat::value() const {
  if (kind_ != Kind::Finite) throw std::logic_error("ExtQRat::value on an infinite endpoint");
  return value_;
}

ExtQRat ExtQRat::operator-() const {
  switch (kind_) {
    case Kind::NegInf: return pos_inf();
    case Kind::PosInf: return neg_inf();
    default: return ExtQRat(Rat(-value_));
  }
}

ExtQRat ExtQRat::operator+(const Rat& g) const {
  if (kind_ != Kind::Finite) return *this;
  return ExtQRat(Rat(value_ + g));
}

ExtQRat ExtQRat::scaled(const Int& n) const {
  if (kind_ != Kind::Finite) return *this;
  return ExtQRat(Rat(value_ * n));
}

ExtQRat ExtQRat::divided(const Int& n) const {
  if (kind_ != Kind::Finite) return *this;
  return ExtQRat(Rat(value_ / n));
}

bool operator==(const ExtQRat& a, const ExtQRat& b) {
  if (a.kind_ != b.kind_) return false;
  return a.kind_ != ExtQRat::Kind::Finite || a.value_ == b.value_;
}

std::strong_ordering operator<=>(const ExtQRat& a, const ExtQRat& b) {
  if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
  if (a.kind_ != ExtQRat::Kind::Finite) return std::strong_ordering::equal;
  int c = cmp(a.value_, b.value_);
  return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

std::string ExtQRat::str() const {
  switch (kind_) {
    case Kind::NegInf: return "-inf";
    case Kind::PosInf: return "inf";
    default: return to_string(value_);
  }
}

ExtQRat ExtQRat::parse(std::string_view text) {
  if (text == "inf" || text == "+inf") return pos_inf();
  if (text == "-inf") return neg_inf();
  return ExtQRat(parse_rat(text));
}

}  // namespace oag
