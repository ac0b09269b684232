#pragma once

#include <vector>

#include <json.hpp>

#include "oag/model.hpp"
#include "oag/numeric.hpp"

namespace oag {

using IntMatrix = std::vector<std::vector<Int>>;  // row-major
using RatVector = std::vector<Rat>;

IntMatrix identity_matrix(std::size_t n);
IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);
/// Exact determinant (fraction-free elimination). Square input only.
Int determinant(const IntMatrix& a);

/// U * A * V = S with U, V unimodular and S diagonal, s_i >= 0, s_i | s_{i+1}.
struct SnfResult {
  IntMatrix U, S, V;
  std::vector<Int> diagonal() const;
};

/// Throws std::invalid_argument on an empty or ragged matrix.
SnfResult smith_normal_form(const IntMatrix& a);

/// Row-style Hermite normal form of the lattice spanned by the rows: echelon,
/// positive pivots, entries above a pivot reduced into [0, pivot). Zero rows
/// are dropped, so the result is a basis.
IntMatrix hermite_normal_form(const IntMatrix& a);

/// Finitely generated subgroup of Q^d (hence free of finite rank).
class LatticeGroup {
 public:
  /// {0} in Q^d.
  explicit LatticeGroup(std::size_t dim);
  /// Throws std::invalid_argument when a generator has the wrong length.
  LatticeGroup(std::size_t dim, std::vector<RatVector> generators);

  /// Z^d.
  static LatticeGroup standard(std::size_t dim);
  /// Accepts [[ "p/q", ... ], ...]; an empty list needs "dim".
  static LatticeGroup from_json(const nlohmann::json& j, std::size_t dim_if_empty = 1);

  std::size_t dim() const { return dim_; }
  const std::vector<RatVector>& generators() const { return gens_; }
  /// Canonical basis: HNF of the generators after clearing denominators.
  const std::vector<RatVector>& basis() const { return basis_; }

  bool contains(const RatVector& v) const;
  /// Every basis vector of other lies in this group.
  bool contains(const LatticeGroup& other) const;

  /// Equal HNF bases.
  friend bool operator==(const LatticeGroup& a, const LatticeGroup& b) { return a.dim_ == b.dim_ && a.basis_ == b.basis_; }

  /// {"dim": d, "basis": [[...]]}; rationals as strings.
  nlohmann::json to_json() const;

 private:
  std::size_t dim_;
  std::vector<RatVector> gens_;
  std::vector<RatVector> basis_;
  Int denom_ = 1;  // basis_ * denom_ is integral
};

/// Dimension of the rational span.
std::size_t rank(const LatticeGroup& g);
std::size_t rank(const std::vector<RatVector>& vectors);
/// v lies in the rational span of vectors.
bool in_span(const std::vector<RatVector>& vectors, const RatVector& v);

/// |G / mG|, always finite for finitely generated G (it equals m^rank).
/// Throws std::invalid_argument for m < 1.
Int quotient_card(const LatticeGroup& g, const Int& m);

struct QuotientEntry {
  Int m;
  Int card;
  Int bound;  // m^d
  bool within_bound;
};

std::vector<QuotientEntry> has_small_quotients(const LatticeGroup& g, const Int& up_to);
nlohmann::json to_json(const std::vector<QuotientEntry>& table);

/// (rational span of A together with the definable closure of 0) ∩ G.
/// Dense: span(A) ∩ G. Discrete: G must be a rank-1 group in Q containing 1,
/// and then the answer is G. Throws std::invalid_argument if A is not inside G.
LatticeGroup acl_closure(const LatticeGroup& g, const std::vector<RatVector>& a, Mode mode);

}  // namespace oag
