#pragma once

#include <map>
#include <string>

#include "oag/defset.hpp"
#include "oag/formula.hpp"

namespace oag {

/// Equivalent quantifier-free formula over the ground model.
/// Discrete: Cooper-style elimination (least witness over the lcm period).
/// Dense: endpoint/epsilon substitution, split by residue classes in Z[1/p].
/// Output atoms are t < s, t <= s (dense), t = s, !(t = s), t =_m s.
Formula eliminate_quantifiers(const Formula& f, const GroundModel& model);

/// The set {g : f(g)} of a quantifier-free formula whose only free variable
/// is x. Throws FormulaError on other free variables or quantifiers.
DefSet qfree_to_defset(const Formula& f, const std::string& x, const GroundModel& model);

/// Binds params, eliminates quantifiers, then normalizes.
DefSet formula_to_defset(const Formula& f, const std::string& x, const std::map<std::string, Rat>& params,
                         const GroundModel& model);

/// A quantifier-free formula in x defining d: singletons as equations,
/// components as lo < x & x < hi & x =_m r.
Formula defset_formula(const DefSet& d, const std::string& x);

}  // namespace oag
