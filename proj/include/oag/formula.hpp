#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "oag/model.hpp"
#include "oag/numeric.hpp"

namespace oag {

/// Integer linear combination of variables plus a constant group element.
/// In discrete mode the constant is an integer multiple of the named 1; in
/// dense mode it is a parameter from the ground model. Zero coefficients are
/// never stored, so structural equality is semantic equality of terms.
class LinearTerm {
 public:
  LinearTerm() = default;
  explicit LinearTerm(Rat constant) : constant_(std::move(constant)) {}
  static LinearTerm variable(const std::string& name, const Int& coeff = 1);

  const std::map<std::string, Int>& coeffs() const { return coeffs_; }
  const Rat& constant() const { return constant_; }
  Int coeff(const std::string& var) const;
  bool is_constant() const { return coeffs_.empty(); }
  bool mentions(const std::string& var) const { return coeffs_.count(var) != 0; }

  LinearTerm operator+(const LinearTerm& o) const;
  LinearTerm operator-(const LinearTerm& o) const;
  LinearTerm operator-() const;
  LinearTerm scaled(const Int& k) const;
  LinearTerm plus_constant(const Rat& c) const;
  /// The term with var's coefficient removed.
  LinearTerm without(const std::string& var) const;
  LinearTerm substitute(const std::string& var, const LinearTerm& value) const;
  Rat evaluate(const std::map<std::string, Rat>& env) const;

  friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
  friend bool operator<(const LinearTerm& a, const LinearTerm& b);

  std::string str() const;

 private:
  std::map<std::string, Int> coeffs_;
  Rat constant_;
};

class FormulaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable first-order formula over {+, -, <, 0, 1} with congruences =_m.
/// Nodes are shared; copying a Formula is cheap.
class Formula {
 public:
  enum class Kind { True, False, Atom, Not, And, Or, Implies, Iff, Exists, Forall };
  enum class Rel { Eq, Lt, Le, Cong };

  static Formula truth();
  static Formula falsity();
  /// Throws FormulaError for a congruence with modulus < 2.
  static Formula atom(Rel rel, LinearTerm lhs, LinearTerm rhs, Int modulus = 0);
  static Formula negation(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula implies(Formula a, Formula b);
  static Formula iff(Formula a, Formula b);
  static Formula exists(const std::string& var, Formula body);
  static Formula forall(const std::string& var, Formula body);
  static Formula conj_all(const std::vector<Formula>& fs);
  static Formula disj_all(const std::vector<Formula>& fs);

  Kind kind() const;
  Rel rel() const;
  const Int& modulus() const;
  const LinearTerm& lhs() const;
  const LinearTerm& rhs() const;
  const std::string& var() const;
  const Formula& left() const;   // Not, binary connectives, quantifier body
  const Formula& right() const;  // binary connectives
  bool is_quantifier() const;
  bool is_binary() const;

  std::set<std::string> free_vars() const;
  std::set<std::string> bound_vars() const;
  bool quantifier_free() const;
  int quantifier_depth() const;
  std::size_t size() const;

  friend bool operator==(const Formula& a, const Formula& b);

  /// Re-parseable text; see parse_formula.
  std::string str() const;

 private:
  struct Node;
  static std::shared_ptr<Node> new_node(Kind k);
  static Formula make_binary(Kind k, Formula a, Formula b);
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Grammar:
///   formula := iff
///   iff     := implies ("<->" implies)*
///   implies := or ("->" implies)?
///   or      := and ("|" and)*
///   and     := unary ("&" unary)*
///   unary   := "!" unary | ("E"|"A") var ("," var)* "(" formula ")"
///            | "(" formula ")" | "true" | "false" | term rel term
///   rel     := "=" | "!=" | "<" | "<=" | ">" | ">=" | "=_" INT
///   term    := ["-"] summand (("+"|"-") summand)*
///   summand := INT "*" (var | literal) | var | literal
///   literal := INT | INT "/" INT
/// Integer literals denote multiples of 1 in discrete mode; rational literals
/// are parameter constants in dense mode and must lie in the ground model.
class ParseError : public FormulaError {
 public:
  ParseError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

Formula parse_formula(const std::string& text, const GroundModel& model);

/// Truth of a quantifier-free formula under a full assignment.
bool eval_formula(const Formula& f, const std::map<std::string, Rat>& assignment, const GroundModel& model);
bool eval_atom(const Formula& atom, const std::map<std::string, Rat>& assignment, const GroundModel& model);

/// Replaces free occurrences of the bound names by constants.
/// Throws FormulaError if a name is bound by a quantifier inside f.
Formula substitute_params(const Formula& f, const std::map<std::string, Rat>& bindings);

/// Capture-avoiding substitution of a term for the free variable var.
Formula substitute(const Formula& f, const std::string& var, const LinearTerm& value);

/// First name of the form base, base1, base2, ... not in avoid.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

}  // namespace oag
