#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "oag/model.hpp"
#include "oag/numeric.hpp"

namespace oag {

/// Open generalized interval (lo, hi) with rational or infinite endpoints.
/// Its realized set is the intersection with the ground model.
struct IntervalQ {
  ExtQRat lo = ExtQRat::neg_inf();
  ExtQRat hi = ExtQRat::pos_inf();

  bool contains(const Rat& g) const { return lo < ExtQRat(g) && ExtQRat(g) < hi; }
  bool bounded() const { return lo.finite() && hi.finite(); }
  friend bool operator==(const IntervalQ&, const IntervalQ&) = default;
};

/// interval intersected with the coset modulus*G + residue.
struct Component {
  IntervalQ interval;
  Int residue;
  friend bool operator==(const Component&, const Component&) = default;
};

/// Input to DefSet::normalize: a singleton, or an interval restricted to a
/// coset of a local modulus.
struct RawPiece {
  bool is_point = false;
  Rat point;
  IntervalQ interval;
  Rat residue;
  Int modulus = 1;

  static RawPiece singleton(Rat g);
  static RawPiece piece(IntervalQ iv, Rat residue = 0, Int modulus = 1);
};

/// A unary definable set in normal form: one common modulus m, finitely many
/// singletons and finitely many components I ∩ (mG + r).
///
/// Invariants after construction:
///  - modulus is [G : mG]-effective (1 in Q, prime-to-p part in Z[1/p]);
///  - residues are integers in [0, modulus);
///  - every component's realized set is infinite (bounded discrete pieces are
///    demoted to singletons);
///  - components of one residue are disjoint and non-adjacent, sorted by
///    (residue, lo); discrete endpoints are tightened to coset elements;
///  - no singleton lies inside a component.
/// Equality via operator== is structural; same_set compares realized sets.
class DefSet {
 public:
  explicit DefSet(GroundModel model);

  static DefSet normalize(const GroundModel& model, const std::vector<RawPiece>& pieces);
  static DefSet empty(const GroundModel& model) { return DefSet(model); }
  static DefSet full(const GroundModel& model);
  static DefSet coset(const GroundModel& model, const Int& m, const Rat& g);
  static DefSet interval(const GroundModel& model, const ExtQRat& lo, const ExtQRat& hi);
  static DefSet finite(const GroundModel& model, const std::vector<Rat>& points);

  const GroundModel& model() const { return model_; }
  const Int& modulus() const { return modulus_; }
  const std::vector<Rat>& singletons() const { return singletons_; }
  const std::vector<Component>& components() const { return components_; }

  bool member(const Rat& g) const;
  bool is_empty() const { return singletons_.empty() && components_.empty(); }
  bool bounded_below() const;
  bool bounded_above() const;
  /// Pointwise equality.
  bool same_set(const DefSet& other) const;

  friend bool operator==(const DefSet& a, const DefSet& b);

  nlohmann::json to_json() const;
  /// Re-normalizes the document, so any valid description is accepted.
  static DefSet from_json(const nlohmann::json& j);

 private:
  GroundModel model_;
  Int modulus_ = 1;
  std::vector<Rat> singletons_;
  std::vector<Component> components_;

  friend class DefSetBuilder;
};

enum class BoolOp { Union, Intersect, Complement, Difference };

/// Pointwise Boolean combination; rhs is ignored for Complement and required otherwise.
DefSet boolean_op(BoolOp op, const DefSet& lhs, const DefSet* rhs = nullptr);
DefSet set_union(const DefSet& a, const DefSet& b);
DefSet set_intersect(const DefSet& a, const DefSet& b);
DefSet set_difference(const DefSet& a, const DefSet& b);
DefSet set_complement(const DefSet& a);

struct AffineOp {
  enum class Kind { Translate, Reflect, DivideBy, ScaleBy };
  Kind kind = Kind::Translate;
  Rat arg;  // translation element, or n >= 1 for DivideBy/ScaleBy

  static AffineOp translate(Rat g) { return {Kind::Translate, std::move(g)}; }
  static AffineOp reflect() { return {Kind::Reflect, 0}; }
  static AffineOp divide_by(const Int& n) { return {Kind::DivideBy, Rat(n)}; }
  static AffineOp scale_by(const Int& n) { return {Kind::ScaleBy, Rat(n)}; }
};

/// Translate(g): D + g.  Reflect: -D.  DivideBy(n): {a : n*a in D}.  ScaleBy(n): n*D.
DefSet affine_op(const AffineOp& op, const DefSet& d);

/// Outcome of the finite/cofinite test on every residue fiber.
struct GroupDefinability {
  enum class End { PlusInf, MinusInf, None };

  bool definable = false;
  // definable: D = (union of core cosets) plus extra_points minus missing_points.
  Int period;
  std::vector<Int> core_residues;
  std::vector<Rat> extra_points;
  std::vector<Rat> missing_points;
  // not definable: a fiber that is infinite and co-infinite in its coset.
  Int witness_residue;
  End witness_end = End::None;      // the unique unbounded side, if exactly one
  std::optional<Rat> witness_bound;  // first finite endpoint of the fiber

  nlohmann::json to_json() const;
};

GroupDefinability is_group_definable(const DefSet& d);

}  // namespace oag
