#include <doctest.h>

#include "oag/formula.hpp"
#include "support/corpus.hpp"

using namespace oag;

namespace {

const GroundModel Z = GroundModel::integers();
const GroundModel Q = GroundModel::rationals();

std::map<std::string, Rat> env(std::initializer_list<std::pair<const std::string, Rat>> kv) { return kv; }

// Direct definitional semantics, kept separate from eval_formula on purpose:
// congruence is tested as "(l - r)/m lies in G" rather than via residues.
bool naive_eval(const Formula& f, const std::map<std::string, Rat>& e, const GroundModel& m) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: return true;
    case K::False: return false;
    case K::Atom: {
      Rat l = 0, r = 0;
      for (const auto& [v, c] : f.lhs().coeffs()) l += c * e.at(v);
      for (const auto& [v, c] : f.rhs().coeffs()) r += c * e.at(v);
      l += f.lhs().constant();
      r += f.rhs().constant();
      switch (f.rel()) {
        case Formula::Rel::Eq: return l == r;
        case Formula::Rel::Lt: return l < r;
        case Formula::Rel::Le: return l <= r;
        case Formula::Rel::Cong: return m.contains(Rat((l - r) / f.modulus()));
      }
      return false;
    }
    case K::Not: return !naive_eval(f.left(), e, m);
    case K::And: return naive_eval(f.left(), e, m) && naive_eval(f.right(), e, m);
    case K::Or: return naive_eval(f.left(), e, m) || naive_eval(f.right(), e, m);
    case K::Implies: return !naive_eval(f.left(), e, m) || naive_eval(f.right(), e, m);
    case K::Iff: return naive_eval(f.left(), e, m) == naive_eval(f.right(), e, m);
    default: throw std::logic_error("naive_eval: quantifier");
  }
}

}  // namespace

TEST_CASE("parse: grammar cases") {
  Formula f = parse_formula("E x (x + x = y)", Z);
  CHECK(f.kind() == Formula::Kind::Exists);
  CHECK(f.var() == "x");
  CHECK(f.left().lhs() == LinearTerm::variable("x", 2));
  CHECK(f.free_vars() == std::set<std::string>{"y"});

  Formula g = parse_formula("x =_2 0 & x > 0", Z);
  REQUIRE(g.kind() == Formula::Kind::And);
  CHECK(g.left().rel() == Formula::Rel::Cong);
  CHECK(g.left().modulus() == 2);
  CHECK(g.right().rel() == Formula::Rel::Lt);
  CHECK(g.right().lhs().is_constant());  // x > 0 is read as 0 < x

  CHECK_THROWS_AS(parse_formula("x =_1 0", Z), ParseError);
  CHECK_THROWS_AS(parse_formula("x < 1/2", Z), ParseError);
  CHECK_THROWS_AS(parse_formula("x < 1/3", GroundModel::localized(2)), ParseError);
  CHECK_NOTHROW(parse_formula("x < 3/4", GroundModel::localized(2)));
  CHECK_NOTHROW(parse_formula("A x,y (x < y -> E z (x < z & z < y))", Q));
}

TEST_CASE("parse: error positions") {
  try {
    parse_formula("x < 1 &\n  & y = 2", Z);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
}

TEST_CASE("eval: examples") {
  CHECK(eval_formula(parse_formula("2*x = y", Z), env({{"x", 2}, {"y", 4}}), Z));
  CHECK(eval_formula(parse_formula("x =_3 1", Z), env({{"x", -2}}), Z));
  auto Z2 = GroundModel::localized(2);
  CHECK(eval_formula(parse_formula("x =_2 0", Z2), env({{"x", Rat(1, 2)}}), Z2));
  auto Z3 = GroundModel::localized(3);
  CHECK_FALSE(eval_formula(parse_formula("x =_2 0", Z3), env({{"x", Rat(1, 3)}}), Z3));
  CHECK(eval_formula(parse_formula("x =_2 0", Z3), env({{"x", Rat(2, 3)}}), Z3));
  CHECK_THROWS_AS(eval_formula(parse_formula("x < y", Z), env({{"x", 1}}), Z), FormulaError);
  CHECK_THROWS_AS(eval_formula(parse_formula("E y (x < y)", Z), env({{"x", 1}}), Z), FormulaError);
}

TEST_CASE("eval: congruence is divisibility of the difference") {
  for (int m = 2; m <= 12; ++m)
    for (int a = -30; a <= 30; ++a)
      for (int b = -7; b <= 7; ++b) {
        Formula f = Formula::atom(Formula::Rel::Cong, LinearTerm(Rat(a)), LinearTerm(Rat(b)), m);
        CHECK(eval_formula(f, {}, Z) == ((a - b) % m == 0));
      }
}

TEST_CASE("substitute_params") {
  Formula f = parse_formula("x < z", Z);
  CHECK(substitute_params(f, {{"z", 5}}) == parse_formula("x < 5", Z));
  Formula g = parse_formula("x =_2 0", Z);
  CHECK(substitute_params(g, {}) == g);
  Formula h = parse_formula("E y (x + y = z)", Z);
  CHECK(substitute_params(h, {{"z", 3}}) == parse_formula("E y (x + y = 3)", Z));
  CHECK_THROWS_AS(substitute_params(h, {{"y", 1}}), FormulaError);
}

TEST_CASE("substitute avoids capture") {
  Formula f = parse_formula("E y (x < y)", Z);
  Formula g = substitute(f, "x", LinearTerm::variable("y"));
  CHECK(g.free_vars() == std::set<std::string>{"y"});
  CHECK(g.var() != "y");
}

TEST_CASE("printer round trip on the corpus") {
  for (const auto& model : {Z, Q, GroundModel::localized(2), GroundModel::localized(3)}) {
    testing::CorpusGenerator gen(model, 7);
    for (int i = 0; i < 300; ++i) {
      Formula f = gen.next();
      Formula back = parse_formula(f.str(), model);
      CHECK_MESSAGE(back == f, f.str());
    }
  }
}

TEST_CASE("evaluator agrees with the naive reference") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (const auto& model : {Z, Q, GroundModel::localized(3)}) {
    testing::CorpusGenerator gen(model, 99);
    std::uniform_int_distribution<int> val(-40, 40), den(1, 4);
    for (int i = 0; i < 400; ++i) {
      Formula f = gen.random_qf({"x", "y", "z"}, 4);
      std::map<std::string, Rat> e;
      for (const char* v : {"x", "y", "z"}) {
        Int d = 1;
        if (model.dense()) {
          int k = den(rng);
          d = model.prime() == 0 ? Int(k) : Int(k == 1 ? 1 : k == 2 ? 3 : 9);
        }
        Rat g(Int(val(rng)), d);
        g.canonicalize();
        e[v] = g;
      }
      CHECK(eval_formula(f, e, model) == naive_eval(f, e, model));
      ++checked;
    }
  }
  CHECK(checked == 1200);
}
