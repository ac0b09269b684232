#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "oag/defset.hpp"
#include "oag/formula.hpp"

namespace oag {

/// Finite stand-in for the model: [-N, N] (discrete), or every element of
/// height <= H in [-B, B] (dense).
class Window {
 public:
  static Window discrete(long n);
  static Window dense(const GroundModel& model, long height, long bound);
  /// Default window for the model: N = 1000, or H = 64 and B = 100.
  static Window standard(const GroundModel& model);

  const GroundModel& model() const { return model_; }
  long radius() const { return radius_; }
  long height() const { return height_; }
  /// Sorted ascending.
  const std::vector<Rat>& elements() const { return elements_; }

  nlohmann::json to_json() const;

 private:
  Window(GroundModel m, long radius, long height);
  GroundModel model_;
  long radius_;
  long height_;
  std::vector<Rat> elements_;
};

class OracleBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleConfig {
  /// Quantifiers without a bound in their body search [-search_radius,
  /// search_radius] instead (window radius plus the quantifier margin).
  long search_radius = 1200;
  /// Maximum number of body evaluations per top-level query.
  long long budget = 50'000'000;
};

/// Semantic evaluation with quantifiers, independent of the elimination code.
///
/// A quantifier whose body is quantifier-free is decided exactly by testing
/// every point where the body can change truth value, plus one element of
/// each residue class per cell between those points. Other quantifiers are
/// searched over the bounds found in the top-level conjunction of their body
/// (a guard -k <= y <= k, say), which is exact when both bounds exist; when
/// one is missing the search is clamped to search_radius and the answer is
/// only window-relative, reported through clamped().
class OracleEvaluator {
 public:
  OracleEvaluator(const Formula& f, const GroundModel& model, OracleConfig cfg = {});
  ~OracleEvaluator();
  OracleEvaluator(OracleEvaluator&&) noexcept;
  OracleEvaluator& operator=(OracleEvaluator&&) noexcept;

  /// Every free variable of f must be assigned.
  bool eval(const std::map<std::string, Rat>& env);
  bool clamped() const;
  long long evaluations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Truth value of f(x := g) for each window element, in window order.
std::vector<bool> brute_window(const Formula& f, const std::string& x, const Window& w, const OracleConfig& cfg = {});

struct Report {
  bool agree = true;
  std::optional<Rat> counterexample;  // least |g|, then least g
  bool formula_value = false;         // at the counterexample
  std::size_t checked = 0;
  std::size_t formula_members = 0;
  std::size_t set_members = 0;
  bool clamped = false;
  double runtime_ms = 0;

  /// Runtime is left out so that artifacts are byte-stable.
  nlohmann::json to_json() const;
};

/// Compares member(D, .) with the oracle pointwise on the window.
Report compare_report(const Formula& f, const std::string& x, const DefSet& d, const Window& w,
                      const OracleConfig& cfg = {});

}  // namespace oag
