#include <doctest.h>

#include <random>
#include <set>

#include "oag/lattice.hpp"

using namespace oag;

namespace {

IntMatrix M(std::initializer_list<std::initializer_list<long>> rows) {
  IntMatrix m;
  for (auto r : rows) {
    std::vector<Int> row;
    for (long x : r) row.emplace_back(x);
    m.push_back(row);
  }
  return m;
}

RatVector V(std::initializer_list<Rat> xs) { return RatVector(xs); }

bool snf_ok(const IntMatrix& a, const SnfResult& r) {
  if (multiply(multiply(r.U, a), r.V) != r.S) return false;
  if (abs_of(determinant(r.U)) != 1 || abs_of(determinant(r.V)) != 1) return false;
  for (std::size_t i = 0; i < r.S.size(); ++i)
    for (std::size_t j = 0; j < r.S[i].size(); ++j)
      if (i != j && r.S[i][j] != 0) return false;
  auto d = r.diagonal();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 0) return false;
    if (i + 1 < d.size() && !(d[i] == 0 ? d[i + 1] == 0 : d[i + 1] % d[i] == 0)) return false;
  }
  return true;
}

// Counts cosets of mG met by sum c_i g_i with 0 <= c_i < m; these images
// generate G/mG and each has order dividing m, so this is |G/mG|.
std::size_t brute_cosets(const LatticeGroup& g, long m) {
  const auto& gens = g.generators();
  std::vector<RatVector> reps;
  std::vector<long> c(gens.size(), 0);
  for (;;) {
    RatVector v(g.dim(), Rat(0));
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (std::size_t l = 0; l < g.dim(); ++l) v[l] += c[i] * gens[i][l];
    bool seen = false;
    for (const auto& r : reps) {
      RatVector diff(g.dim());
      for (std::size_t l = 0; l < g.dim(); ++l) diff[l] = (v[l] - r[l]) / m;
      if (g.contains(diff)) {
        seen = true;
        break;
      }
    }
    if (!seen) reps.push_back(v);
    std::size_t k = 0;
    while (k < c.size() && ++c[k] == m) c[k++] = 0;
    if (k == c.size()) break;
  }
  return reps.size();
}

}  // namespace

TEST_CASE("snf: examples") {
  auto a = smith_normal_form(M({{2, 0}, {0, 3}}));
  CHECK(a.diagonal() == std::vector<Int>{1, 6});
  CHECK(snf_ok(M({{2, 0}, {0, 3}}), a));

  auto b = smith_normal_form(identity_matrix(4));
  CHECK(b.S == identity_matrix(4));

  IntMatrix c = M({{2, 4}, {6, 8}});
  auto s = smith_normal_form(c);
  CHECK(s.diagonal() == std::vector<Int>{2, 4});
  CHECK(snf_ok(c, s));
  CHECK(abs_of(determinant(c)) == 8);

  IntMatrix rect = M({{0, 0, 0}, {0, 6, 4}});
  CHECK(snf_ok(rect, smith_normal_form(rect)));
  CHECK(smith_normal_form(rect).diagonal() == std::vector<Int>{2, 0});
  CHECK_THROWS_AS(smith_normal_form({}), std::invalid_argument);
}

TEST_CASE("snf: random matrices") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> dim(1, 6), entry(-20, 20);
  for (int t = 0; t < 150; ++t) {
    IntMatrix a(dim(rng), std::vector<Int>(dim(rng)));
    for (auto& row : a)
      for (auto& x : row) x = entry(rng);
    auto r = smith_normal_form(a);
    REQUIRE(snf_ok(a, r));
    if (a.size() == a[0].size()) {
      Int prod = 1;
      for (const auto& s : r.diagonal()) prod *= s;
      CHECK(prod == abs_of(determinant(a)));
    }
  }
}

TEST_CASE("hnf: canonical bases") {
  IntMatrix h = hermite_normal_form(M({{2, 4}, {6, 8}}));
  CHECK(h == M({{2, 0}, {0, 4}}));
  CHECK(hermite_normal_form(M({{3, 0}, {6, 0}})) == M({{3, 0}}));
  // Same lattice, different generators.
  CHECK(hermite_normal_form(M({{1, 1}, {0, 2}})) == hermite_normal_form(M({{1, -1}, {1, 1}, {3, 1}})));
}

TEST_CASE("rank") {
  CHECK(rank(LatticeGroup::standard(2)) == 2);
  CHECK(rank(LatticeGroup(2, {V({1, 2}), V({2, 4})})) == 1);
  CHECK(rank(LatticeGroup(3)) == 0);
}

TEST_CASE("quotient_card: examples") {
  CHECK(quotient_card(LatticeGroup::standard(2), 3) == 9);
  LatticeGroup half(1, {V({Rat(1, 2)})});
  CHECK(quotient_card(half, 2) == 2);
  CHECK(brute_cosets(half, 2) == 2);
  CHECK(quotient_card(LatticeGroup::standard(2), 1) == 1);
  CHECK_THROWS_AS(quotient_card(half, 0), std::invalid_argument);
  for (std::size_t d = 1; d <= 4; ++d)
    for (long m = 1; m <= 10; ++m) {
      Int want = 1;
      for (std::size_t i = 0; i < d; ++i) want *= m;
      CHECK(quotient_card(LatticeGroup::standard(d), m) == want);
    }
}

TEST_CASE("has_small_quotients: examples") {
  auto z = has_small_quotients(LatticeGroup::standard(1), 5);
  REQUIRE(z.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(z[i].card == Int(i + 1));
    CHECK(z[i].within_bound);
  }
  LatticeGroup g(2, {V({1, 0}), V({0, 1}), V({Rat(1, 2), Rat(1, 2)})});
  auto t = has_small_quotients(g, 2);
  CHECK(t[1].card <= 4);
  CHECK(t[1].card == Int(brute_cosets(g, 2)));
  for (const auto& e : has_small_quotients(LatticeGroup(3), 6)) CHECK(e.card == 1);
}

TEST_CASE("quotients of random subgroups of Q^3 respect m^d") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(-6, 6), den(1, 4), count(0, 3);
  for (int t = 0; t < 40; ++t) {
    std::vector<RatVector> gens;
    int k = count(rng);
    for (int i = 0; i < k; ++i) {
      RatVector v;
      for (int l = 0; l < 3; ++l) {
        Rat q(num(rng), den(rng));
        q.canonicalize();
        v.push_back(q);
      }
      gens.push_back(v);
    }
    LatticeGroup g(3, gens);
    for (long m = 1; m <= 4; ++m) {
      Int card = quotient_card(g, m);
      CHECK(card <= m * m * m);
      if (card <= 64) CHECK(card == Int(brute_cosets(g, m)));
    }
  }
}

TEST_CASE("lattice membership and json") {
  LatticeGroup g(2, {V({Rat(1, 2), Rat(1, 2)}), V({Rat(1, 2), Rat(-1, 2)})});
  CHECK(g.contains(V({1, 0})));
  CHECK(g.contains(V({Rat(3, 2), Rat(1, 2)})));
  CHECK_FALSE(g.contains(V({Rat(1, 2), 0})));
  LatticeGroup h(2, {V({1, 0}), V({Rat(1, 2), Rat(1, 2)})});
  CHECK(g == h);
  CHECK(LatticeGroup::from_json(g.to_json()["basis"]) == g);
  auto j = LatticeGroup::from_json(nlohmann::json::parse(R"([["1/2", 0], [0, 1]])"));
  CHECK(j.contains(V({Rat(1, 2), 3})));
}

TEST_CASE("acl_closure: examples") {
  LatticeGroup z2 = LatticeGroup::standard(2);
  LatticeGroup a = acl_closure(z2, {V({1, 1})}, Mode::Dense);
  CHECK(a == LatticeGroup(2, {V({1, 1})}));
  // Brute force: the small elements of Z^2 on the diagonal are exactly a's.
  for (int x = -6; x <= 6; ++x)
    for (int y = -6; y <= 6; ++y) CHECK(a.contains(V({x, y})) == (x == y));

  CHECK(acl_closure(z2, {}, Mode::Dense) == LatticeGroup(2));
  LatticeGroup z = LatticeGroup::standard(1);
  CHECK(acl_closure(z, {}, Mode::Discrete) == z);
  CHECK_THROWS_AS(acl_closure(z2, {V({Rat(1, 2), 0})}, Mode::Dense), std::invalid_argument);
  CHECK_THROWS_AS(acl_closure(z2, {}, Mode::Discrete), std::invalid_argument);

  // Saturation: span{(2, 4)} meets Z^2 in <(1, 2)>, not just <(2, 4)>.
  CHECK(acl_closure(z2, {V({2, 4})}, Mode::Dense) == LatticeGroup(2, {V({1, 2})}));
}

TEST_CASE("exchange at the level of spans") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> num(-3, 3);
  auto vec = [&] {
    RatVector v;
    for (int l = 0; l < 3; ++l) v.emplace_back(num(rng));
    return v;
  };
  int tested = 0;
  for (int t = 0; t < 400 && tested < 60; ++t) {
    std::vector<RatVector> c{vec()};
    RatVector b = vec();
    // a in span(C, b) but not in span(C)
    RatVector a(3);
    int k1 = num(rng), k2 = num(rng) | 1;
    for (int l = 0; l < 3; ++l) a[l] = k1 * c[0][l] + k2 * b[l];
    if (in_span(c, a)) continue;
    ++tested;
    std::vector<RatVector> ca = c;
    ca.push_back(a);
    CHECK(in_span(ca, b));
  }
  CHECK(tested >= 50);
}
