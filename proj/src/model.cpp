#include "oag/model.hpp"

#include <stdexcept>

namespace oag {

GroundModel GroundModel::integers() { return GroundModel(Mode::Discrete, 0); }
GroundModel GroundModel::rationals() { return GroundModel(Mode::Dense, 0); }

GroundModel GroundModel::localized(const Int& p) {
  if (!is_prime(p)) throw std::invalid_argument("Z[1/p] requires a prime p, got " + p.get_str());
  return GroundModel(Mode::Dense, p);
}

GroundModel GroundModel::parse(const std::string& spec) {
  if (spec == "z") return integers();
  if (spec == "q") return rationals();
  if (spec.rfind("zp:", 0) == 0) {
    std::string p = spec.substr(3);
    if (p.empty() || p.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad model '" + spec + "'");
    return localized(Int(p));
  }
  throw std::invalid_argument("unknown model '" + spec + "' (expected z, q or zp:<p>)");
}

std::string GroundModel::spec() const {
  if (discrete()) return "z";
  if (prime_ == 0) return "q";
  return "zp:" + prime_.get_str();
}

bool GroundModel::contains(const Rat& g) const {
  if (discrete()) return is_integer(g);
  if (prime_ == 0) return true;
  Int d = g.get_den();
  while (d % prime_ == 0) d /= prime_;
  return d == 1;
}

Int GroundModel::effective_modulus(const Int& m) const {
  if (m < 1) throw std::invalid_argument("modulus must be >= 1");
  if (discrete()) return m;
  if (prime_ == 0) return 1;
  Int r = m;
  while (r % prime_ == 0) r /= prime_;
  return r;
}

Int GroundModel::residue(const Rat& g, const Int& m) const {
  if (!contains(g)) throw std::invalid_argument(to_string(g) + " is not an element of " + spec());
  Int em = effective_modulus(m);
  if (em == 1) return 0;
  if (discrete()) return mod_floor(g.get_num(), em);
  // g = u / p^k with p invertible modulo em.
  return mod_floor(g.get_num() * mod_inverse(g.get_den(), em), em);
}

std::optional<Rat> GroundModel::coset_witness(const ExtQRat& lo, const ExtQRat& hi, const Int& m,
                                              const Rat& g) const {
  if (!(lo < hi)) return std::nullopt;
  Int em = effective_modulus(m);
  if (!lo.finite() && !hi.finite()) return g;
  if (!lo.finite()) {
    auto w = coset_witness(-hi, ExtQRat::pos_inf(), m, Rat(-g));
    if (!w) return std::nullopt;
    return Rat(-*w);
  }
  // Step c in mG with 0 < c < hi - lo; then g - n*c lands in (lo, lo + c].
  Rat step;
  if (discrete()) {
    step = em;
  } else if (!hi.finite()) {
    step = em;
  } else {
    Rat width = hi.value() - lo.value();
    if (prime_ == 0) {
      step = width / 2;
    } else {
      step = em;
      while (step >= width) step /= prime_;
    }
  }
  Int n = ceil_of(Rat((g - lo.value()) / step)) - 1;
  Rat e = g - n * step;
  if (!(ExtQRat(e) < hi)) return std::nullopt;
  return e;
}

Int GroundModel::height(const Rat& g) {
  Int n = abs_of(g.get_num());
  return n > g.get_den() ? n : Int(g.get_den());
}

std::optional<Rat> GroundModel::min_height_element(const ExtQRat& lo, const ExtQRat& hi) const {
  if (!(lo < hi)) return std::nullopt;
  std::optional<Rat> best;
  Int best_h;
  Int q = 1;
  while (true) {
    if (best && q > best_h) break;
    // Numerators k with lo < k/q < hi, nearest zero.
    std::optional<Int> k;
    bool lo_neg = !lo.finite() || lo.value() < 0;
    bool hi_pos = !hi.finite() || hi.value() > 0;
    if (lo_neg && hi_pos) {
      k = Int(0);
    } else if (!lo_neg) {
      Int cand = floor_of(Rat(lo.value() * q)) + 1;
      if (ExtQRat(Rat(cand, q)) < hi) k = cand;
    } else {
      Int cand = ceil_of(Rat(hi.value() * q)) - 1;
      if (lo < ExtQRat(Rat(cand, q))) k = cand;
    }
    if (k) {
      Rat v(*k, q);
      v.canonicalize();
      Int h = height(v);
      if (!best || h < best_h || (h == best_h && v < *best)) {
        best = v;
        best_h = h;
      }
    }
    if (discrete()) break;
    q = prime_ == 0 ? Int(q + 1) : Int(q * prime_);
  }
  return best;
}

}  // namespace oag
