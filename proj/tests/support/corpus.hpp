#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oag/formula.hpp"

namespace oag::testing {

/// Shape limits for random formulas.
struct CorpusOptions {
  int max_depth = 3;
  int max_coeff = 7;
  int max_modulus = 12;
  int max_constant = 20;
  bool allow_z_free = true;  // z may stay free next to x
};

/// Random formulas over x (always free), y, z.
///
/// Discrete models: quantifiers whose body still has quantifiers carry a
/// box guard -k <= v <= k (k <= 6), so bounded search over them is exact;
/// the innermost quantifier is unguarded. Dense models: depth <= 1.
class CorpusGenerator {
 public:
  CorpusGenerator(GroundModel model, std::uint64_t seed, CorpusOptions opts = {});

  Formula next();
  std::vector<Formula> take(std::size_t n);

  /// phi(x, z) with both variables free, biased toward interval-like sets.
  Formula next_two_var();

  Formula random_qf(const std::vector<std::string>& vars, int atoms, const std::string& must_mention = "");

 private:
  int uniform(int lo, int hi);
  bool coin(double p);
  Int coeff();
  Rat constant();
  LinearTerm term(const std::vector<std::string>& vars, const std::string& must_mention);
  Formula atom(const std::vector<std::string>& vars, const std::string& must_mention);
  Formula quantified(int depth, std::vector<std::string> scope);
  Formula guard(const std::string& v, int k);

  GroundModel model_;
  std::mt19937_64 rng_;
  CorpusOptions opts_;
};

}  // namespace oag::testing
