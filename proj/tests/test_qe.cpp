#include <doctest.h>

#include "oag/oracle.hpp"
#include "oag/qe.hpp"
#include "support/corpus.hpp"

using namespace oag;

namespace {

const GroundModel Z = GroundModel::integers();
const GroundModel Q = GroundModel::rationals();

Formula P(const std::string& s, const GroundModel& m = Z) { return parse_formula(s, m); }

std::string qe(const std::string& s, const GroundModel& m) { return eliminate_quantifiers(P(s, m), m).str(); }

// Atoms of the output only use the shapes t < s, t <= s, t = s, t =_m s.
bool atoms_only(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: return false;
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Atom: return true;
    case Formula::Kind::Not: return atoms_only(f.left());
    default: return atoms_only(f.left()) && atoms_only(f.right());
  }
}

}  // namespace

TEST_CASE("eliminate: worked examples") {
  CHECK(qe("E x (2*x = y)", Z) == "y =_2 0");
  CHECK(qe("E x (x < y & z < x)", Q) == "z < y");
  CHECK(qe("E x (x < y & z < x)", Z) == "z + 1 < y");
  CHECK(qe("E x (2*x = y)", Q) == "true");
  CHECK(qe("E y (0 < y & y < x)", Z) == "1 < x");
  CHECK(qe("A y ((y < x | y > z))", Q) == "z < x");
}

TEST_CASE("eliminate: z + 1 < y matches the quantified form on a grid") {
  Formula f = P("E x (x < y & z < x)");
  Formula q = eliminate_quantifiers(f, Z);
  OracleEvaluator ev(f, Z);
  for (int y = -15; y <= 15; ++y)
    for (int z = -15; z <= 15; ++z) {
      std::map<std::string, Rat> env{{"y", Rat(y)}, {"z", Rat(z)}};
      CHECK(eval_formula(q, env, Z) == ev.eval(env));
    }
}

TEST_CASE("eliminate: localized models keep prime-to-p congruences only") {
  GroundModel Z3 = GroundModel::localized(3);
  // 3G = G, so the 3-part of a modulus disappears.
  CHECK(qe("E x (3*x = y)", Z3) == "true");
  Formula f = P("E x (2*x = y & 0 < x)", Z3);
  Formula q = eliminate_quantifiers(f, Z3);
  CHECK(q.quantifier_free());
  for (int num = -20; num <= 20; ++num)
    for (int den : {1, 3, 9}) {
      Rat y(num, den);
      y.canonicalize();
      bool want = y > 0 && Z3.in_multiple(y, 2);
      CHECK(eval_formula(q, {{"y", y}}, Z3) == want);
    }
}

TEST_CASE("eliminate: corpus soundness (small sample)") {
  for (const auto& model : {Z, Q, GroundModel::localized(2)}) {
    testing::CorpusGenerator gen(model, 11);
    Window w = Window::standard(model);
    for (int i = 0; i < 60; ++i) {
      Formula f = gen.next();
      Formula q = eliminate_quantifiers(f, model);
      REQUIRE(atoms_only(q));
      OracleEvaluator ev(f, model);
      auto fv = f.free_vars();
      for (std::size_t k = 0; k < 25; ++k) {
        std::map<std::string, Rat> env;
        std::size_t j = k * 37;
        for (const auto& v : fv) {
          env[v] = w.elements()[(j * 7919 + v[0]) % w.elements().size()];
          j += 13;
        }
        CHECK_MESSAGE(eval_formula(q, env, model) == ev.eval(env), f.str());
      }
    }
  }
}

TEST_CASE("qfree_to_defset: examples") {
  DefSet a = qfree_to_defset(P("x > 0 & x =_2 0"), "x", Z);
  CHECK(a.modulus() == 2);
  REQUIRE(a.components().size() == 1);
  CHECK(a.components()[0] == Component{{ExtQRat(0), ExtQRat::pos_inf()}, 0});

  DefSet b = qfree_to_defset(P("!(x < 5)"), "x", Z);
  CHECK(b.modulus() == 1);
  REQUIRE(b.components().size() == 1);
  CHECK(b.components()[0] == Component{{ExtQRat(4), ExtQRat::pos_inf()}, 0});

  CHECK(qfree_to_defset(P("3*x = 7"), "x", Z).is_empty());
  CHECK(qfree_to_defset(P("3*x = 7", Q), "x", Q).singletons() == std::vector<Rat>{Rat(7, 3)});

  CHECK_THROWS_AS(qfree_to_defset(P("x < y"), "x", Z), FormulaError);
  CHECK_THROWS_AS(qfree_to_defset(P("E y (x < y)"), "x", Z), FormulaError);
}

TEST_CASE("formula_to_defset: examples") {
  DefSet evens = formula_to_defset(P("E y (x = y + y)"), "x", {}, Z);
  CHECK(evens.same_set(DefSet::coset(Z, 2, 0)));
  CHECK(evens.modulus() == 2);

  DefSet above = formula_to_defset(P("E y (0 < y & y < x)"), "x", {}, Z);
  CHECK(above.same_set(DefSet::interval(Z, 1, ExtQRat::pos_inf())));

  DefSet box = formula_to_defset(P("0 <= x & x <= z"), "x", {{"z", Rat(10)}}, Z);
  CHECK(box.same_set(DefSet::interval(Z, -1, 11)));
  CHECK(box.singletons().size() == 11);
  CHECK(box.components().empty());
}

TEST_CASE("formula_to_defset: agrees with the oracle on corpus formulas") {
  for (const auto& model : {Z, GroundModel::localized(3)}) {
    testing::CorpusGenerator gen(model, 5);
    Window w = model.discrete() ? Window::discrete(300) : Window::dense(model, 27, 20);
    for (int i = 0; i < 40; ++i) {
      Formula f = gen.next();
      std::map<std::string, Rat> params;
      if (f.free_vars().count("z")) params["z"] = Rat(i % 9 - 4);
      DefSet d = formula_to_defset(f, "x", params, model);
      Report r = compare_report(substitute_params(f, params), "x", d, w);
      CHECK_MESSAGE(r.agree, f.str());
    }
  }
}
