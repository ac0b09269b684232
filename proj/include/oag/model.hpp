#pragma once

#include <optional>
#include <string>

#include "oag/numeric.hpp"

namespace oag {

enum class Mode { Discrete, Dense };

/// The ambient archimedean group: the integers (discrete, with 1 as the least
/// positive element), the rationals, or the localization Z[1/p] (dense).
class GroundModel {
 public:
  static GroundModel integers();
  static GroundModel rationals();
  /// Z[1/p]; p must be prime.
  static GroundModel localized(const Int& p);
  /// Parses "z", "q" or "zp:<p>".
  static GroundModel parse(const std::string& spec);

  Mode mode() const { return mode_; }
  bool discrete() const { return mode_ == Mode::Discrete; }
  bool dense() const { return mode_ == Mode::Dense; }
  /// The localizing prime; zero for Z and Q.
  const Int& prime() const { return prime_; }
  std::string spec() const;

  bool contains(const Rat& g) const;
  /// Index [G : mG]. mG = m'G where m' drops the prime factors that are units in G.
  Int effective_modulus(const Int& m) const;
  /// Representative in [0, [G:mG]) of the coset g + mG. Representatives are integers.
  Int residue(const Rat& g, const Int& m) const;
  /// g in mG.
  bool in_multiple(const Rat& g, const Int& m) const { return residue(g, m) == 0; }

  /// An element of (lo, hi) in the coset mG + g, if any. In dense models the
  /// answer exists whenever lo < hi.
  std::optional<Rat> coset_witness(const ExtQRat& lo, const ExtQRat& hi, const Int& m, const Rat& g) const;

  /// Height of an element: max(|num|, den) of the reduced fraction.
  static Int height(const Rat& g);
  /// The element of G in (lo, hi) of least height, ties broken by smaller value.
  std::optional<Rat> min_height_element(const ExtQRat& lo, const ExtQRat& hi) const;

  friend bool operator==(const GroundModel& a, const GroundModel& b) {
    return a.mode_ == b.mode_ && a.prime_ == b.prime_;
  }

 private:
  GroundModel(Mode m, Int p) : mode_(m), prime_(std::move(p)) {}
  Mode mode_;
  Int prime_;
};

}  // namespace oag
