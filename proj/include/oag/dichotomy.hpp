#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "oag/defset.hpp"
#include "oag/formula.hpp"

namespace oag {

class GroupDefinableInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One operation of an extraction, applied to earlier states of the trace.
/// State 0 is the input set; state i > 0 is the result of step i - 1.
/// The only right operands that are not earlier states are cosets and finite
/// sets, both definable from + alone.
struct TraceOp {
  enum class Kind {
    Intersect,
    Difference,
    Complement,
    Translate,
    Reflect,
    DivideBy,
    // {g in E, g != 0 : E ∩ (E - g) strictly contains E ∩ (E - arg)}, for E
    // a single dense interval. Definable from E and + by quantifying over g.
    ShiftFamily,
  };
  enum class Operand { State, Coset, Points };

  Kind kind = Kind::Intersect;
  std::vector<std::size_t> inputs;
  Operand operand = Operand::State;
  Int modulus = 1;         // Coset operand: modulus*G + arg
  Rat arg;                 // translation, divisor, coset representative, or family parameter
  std::vector<Rat> points; // Points operand

  nlohmann::json to_json() const;
};

struct TraceStep {
  std::string tag;  // coset-restriction, translate, divide-by-m, remove-points, complement-swap,
                    // discrete-min, dense-midpoint, final-intersection
  std::string justification;
  TraceOp op;
  DefSet after;
};

struct ExtractionTrace {
  DefSet input;
  std::vector<TraceStep> steps;

  explicit ExtractionTrace(DefSet in) : input(std::move(in)) {}

  /// Recomputes every step from the input; returns the final state.
  DefSet replay() const;
  /// Every recorded state matches its recomputation exactly.
  bool replays() const;
  nlohmann::json to_json() const;
};

/// Applies op to the given states.
DefSet apply_trace_op(const TraceOp& op, const std::vector<DefSet>& states);

struct IntervalResult {
  ExtQRat b;        // element of G or +inf
  DefSet interval;  // realizes (0, b)
  ExtractionTrace trace;

  nlohmann::json to_json() const;
};

/// From a set that is not definable in (G, +), an infinite interval (0, b)
/// reached using Boolean and affine operations on the set only.
/// Throws GroupDefinableInput otherwise.
IntervalResult extract_interval(const DefSet& d);

/// R(x1, x2) :<=> x2 - x1 in (0, b). On the interval it is the order.
class OrderRelation {
 public:
  explicit OrderRelation(DefSet interval) : interval_(std::move(interval)) {}
  bool holds(const Rat& x1, const Rat& x2) const { return interval_.member(x2 - x1); }
  Formula formula(const std::string& x1 = "x1", const std::string& x2 = "x2") const;

 private:
  DefSet interval_;
};

OrderRelation order_relation(const IntervalResult& r);

/// chi(y, z) detecting "phi(., z) defines exactly [0, y] with y > 0", for
/// phi with free variables among x and z. Discrete models only (uses 1).
/// y must not occur free in phi.
Formula build_chi(const Formula& phi, const GroundModel& model, const std::string& x = "x",
                  const std::string& z = "z", const std::string& y = "y");

/// psi(x) = E y, z (chi(y, z) & phi(x, z)). Discrete models only.
Formula build_psi(const Formula& phi, const GroundModel& model, const std::string& x = "x",
                  const std::string& z = "z");

/// Experimental. theta(z) saying that phi(., z) is an initial interval:
/// discrete  A x (phi(x, z) <-> x > 0);
/// dense     E y (y > 0 & A x (phi(x, z) <-> 0 < x & x < y)).
Formula build_theta(const Formula& phi, const GroundModel& model, const std::string& x = "x",
                    const std::string& z = "z");

struct Classification {
  enum class Verdict { GroupDefinable, OrderRecovered };
  Verdict verdict = Verdict::GroupDefinable;
  DefSet set;
  GroupDefinability group;              // always filled
  std::optional<IntervalResult> order;  // OrderRecovered only

  nlohmann::json to_json() const;
};

/// formula_to_defset, then exactly one of: the periodic-core witness, or an
/// extracted interval with its order relation.
Classification classify(const Formula& f, const std::string& x, const std::map<std::string, Rat>& params,
                        const GroundModel& model);

}  // namespace oag
