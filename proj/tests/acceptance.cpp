// Acceptance run: one PASS/FAIL line per criterion, JSON artifacts per
// criterion under the output directory (argv[1], default "acceptance_out").
// Exit status is 1 if any criterion fails.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "oag/dichotomy.hpp"
#include "oag/lattice.hpp"
#include "oag/oracle.hpp"
#include "oag/qe.hpp"
#include "support/corpus.hpp"

using namespace oag;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  json artifact;
};

const std::vector<std::string> kModels{"z", "q", "zp:2", "zp:3"};

// --- 1: elimination agrees with bounded brute evaluation -----------------

Outcome qe_soundness() {
  Outcome o;
  long total_bad = 0;
  std::ostringstream detail;
  for (const auto& spec : kModels) {
    GroundModel m = GroundModel::parse(spec);
    testing::CorpusGenerator gen(m, 2024);
    std::mt19937_64 rng(7);
    long bad = 0, points = 0, clamped = 0;
    json first_bad = nullptr;
    for (int i = 0; i < 500; ++i) {
      Formula f = gen.next();
      Formula q = eliminate_quantifiers(f, m);
      OracleEvaluator ev(f, m);
      auto fv = f.free_vars();
      // 201 assignments drawn from the subgrid {-1000, -990, ..., 1000}^vars.
      for (int k = 0; k < 201; ++k) {
        std::map<std::string, Rat> env;
        for (const auto& v : fv) env[v] = Rat(long(rng() % 201) * 10 - 1000);
        ++points;
        if (eval_formula(q, env, m) != ev.eval(env)) {
          if (first_bad.is_null()) first_bad = {{"index", i}, {"formula", f.str()}, {"qe", q.str()}};
          ++bad;
          break;
        }
      }
      clamped += ev.clamped();
    }
    total_bad += bad;
    detail << spec << ":" << bad << " ";
    o.artifact[spec] = {{"formulas", 500}, {"assignments", points}, {"disagreements", bad},
                        {"clamped", clamped}, {"first_disagreement", first_bad}};
  }
  o.pass = total_bad == 0;
  o.detail = "disagreements " + detail.str() + "(500 formulas x 201 assignments per model)";
  return o;
}

// --- 2: normal forms agree with the oracle on the full window -------------

bool invariants_hold(const DefSet& d) {
  const GroundModel& m = d.model();
  if (d.modulus() < 1 || d.modulus() != m.effective_modulus(d.modulus())) return false;
  for (std::size_t i = 0; i < d.singletons().size(); ++i) {
    if (!m.contains(d.singletons()[i])) return false;
    if (i > 0 && !(d.singletons()[i - 1] < d.singletons()[i])) return false;
  }
  for (const auto& c : d.components()) {
    if (!(c.interval.lo < c.interval.hi)) return false;
    if (c.residue < 0 || c.residue >= d.modulus()) return false;
  }
  return true;
}

Outcome normal_form_soundness() {
  Outcome o;
  long total_bad = 0;
  std::ostringstream detail;
  for (const auto& spec : kModels) {
    GroundModel m = GroundModel::parse(spec);
    testing::CorpusGenerator gen(m, 2024);
    Window w = Window::standard(m);
    long bad = 0, broken = 0;
    json sets = json::array();
    json first_bad = nullptr;
    for (int i = 0; i < 500; ++i) {
      Formula f = gen.next();
      std::map<std::string, Rat> params;
      if (f.free_vars().count("z")) params["z"] = Rat(i % 41 - 20);
      DefSet d = formula_to_defset(f, "x", params, m);
      Report r = compare_report(substitute_params(f, params), "x", d, w);
      bool ok_inv = invariants_hold(d);
      broken += !ok_inv;
      if (!r.agree) {
        ++bad;
        if (first_bad.is_null()) first_bad = {{"index", i}, {"formula", f.str()}, {"report", r.to_json()}};
      }
      sets.push_back(d.to_json());
    }
    total_bad += bad + broken;
    detail << spec << ":" << bad << "/" << broken << " ";
    o.artifact[spec] = {{"disagreements", bad}, {"invariant_violations", broken}, {"window", w.to_json()},
                        {"first_disagreement", first_bad}, {"sets", sets}};
  }
  o.pass = total_bad == 0;
  o.detail = "disagreements/invariant violations " + detail.str() + "(500 sets per model)";
  return o;
}

// --- 3: intervals meet every coset ----------------------------------------

Outcome coset_density() {
  Outcome o;
  long failures = 0;
  GroundModel Z = GroundModel::integers();
  Window w = Window::discrete(1000);
  long least = -1;
  std::size_t discrete_checks = 0;
  for (long a = -300; a <= 300; a += 25)
    for (int side = 0; side < 2; ++side) {
      DefSet iv = side == 0 ? DefSet::interval(Z, a, ExtQRat::pos_inf()) : DefSet::interval(Z, ExtQRat::neg_inf(), a);
      for (long m = 1; m <= 12; ++m)
        for (long r = 0; r < m; ++r) {
          DefSet s = set_intersect(iv, DefSet::coset(Z, m, r));
          long hits = 0;
          for (const auto& g : w.elements())
            if (s.member(g)) {
              // checked by hand as well: in the interval and in the coset
              bool inside = side == 0 ? g > a : g < a;
              Rat diff = g - r;
              if (!inside || diff.get_num() % m != 0) ++failures;
              ++hits;
            }
          ++discrete_checks;
          if (least < 0 || hits < least) least = hits;
          if (hits < 50) ++failures;
        }
    }
  o.artifact["discrete"] = {{"checks", discrete_checks}, {"least_witnesses", least}};

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> num(-40, 40), den(1, 24), mod(1, 12);
  for (const auto& spec : {"q", "zp:2", "zp:3"}) {
    GroundModel m = GroundModel::parse(spec);
    auto element = [&] {
      for (;;) {
        Rat q(num(rng), den(rng));
        q.canonicalize();
        if (m.contains(q)) return q;
      }
    };
    long bad = 0;
    json sample = json::array();
    for (int t = 0; t < 200; ++t) {
      Rat a = element(), b = element();
      while (a == b) b = element();
      if (b < a) std::swap(a, b);
      Int mm = mod(rng);
      Rat g = element();
      auto wit = m.coset_witness(a, b, mm, g);
      bool ok = wit && a < *wit && *wit < b && m.contains(*wit) && m.contains(Rat((*wit - g) / mm));
      bad += !ok;
      if (t < 5) sample.push_back({to_string(a), to_string(b), to_string(mm), to_string(g), wit ? to_string(*wit) : "none"});
    }
    failures += bad;
    o.artifact[spec] = {{"instances", 200}, {"failures", bad}, {"sample", sample}};
  }
  o.pass = failures == 0;
  o.detail = "failures " + std::to_string(failures) + ", least discrete witness count " + std::to_string(least);
  return o;
}

// --- 4: the dichotomy on corpus sets ---------------------------------------

// g in period*G + r, decided with model membership only.
bool in_coset(const GroundModel& m, const Rat& g, const Int& period, const Int& r) {
  return m.contains(Rat((g - r) / period));
}

// Checks a GroupDefinable verdict against the oracle alone: the brute table
// must equal (core cosets + extra - missing), and must be periodic by the
// stated period away from the exceptional points.
bool periodicity_oracle(const Formula& f, const Classification& c, const GroundModel& m, const Window& w) {
  const auto& v = c.group;
  auto table = brute_window(f, "x", w);
  OracleEvaluator ev(f, m);
  Rat reach = 0;
  for (const auto& p : v.extra_points) reach = std::max(reach, Rat(abs(p)));
  for (const auto& p : v.missing_points) reach = std::max(reach, Rat(abs(p)));
  for (std::size_t i = 0; i < table.size(); ++i) {
    const Rat& g = w.elements()[i];
    bool core = false;
    for (const auto& r : v.core_residues) core = core || in_coset(m, g, v.period, r);
    bool want = core;
    if (std::binary_search(v.extra_points.begin(), v.extra_points.end(), g)) want = true;
    if (std::binary_search(v.missing_points.begin(), v.missing_points.end(), g)) want = false;
    if (table[i] != want) return false;
    Rat shifted = g + Rat(v.period);
    if (Rat(abs(g)) > reach && Rat(abs(shifted)) > reach && ev.eval({{"x", shifted}}) != table[i]) return false;
  }
  return true;
}

Outcome dichotomy() {
  Outcome o;
  long failures = 0, group = 0, order = 0;
  json rows = json::array();
  for (const auto& spec : {"z", "q"}) {
    GroundModel m = GroundModel::parse(spec);
    testing::CorpusGenerator gen(m, 77);
    Window w = Window::standard(m);
    for (int i = 0; i < 100; ++i) {
      Formula f = gen.next();
      std::map<std::string, Rat> params;
      if (f.free_vars().count("z")) params["z"] = Rat(i % 21 - 10);
      Formula g = substitute_params(f, params);
      Classification c = classify(f, "x", params, m);
      json row = {{"model", spec}, {"formula", g.str()}};
      bool ok = true;
      std::string why;
      bool order_verdict = c.verdict == Classification::Verdict::OrderRecovered;
      if (order_verdict != c.order.has_value() || c.group.definable == order_verdict) {
        ok = false;
        why = "verdict not exclusive";
      } else if (!order_verdict) {
        ++group;
        if (!periodicity_oracle(g, c, m, w)) ok = false, why = "periodicity oracle";
      } else {
        ++order;
        const IntervalResult& r = *c.order;
        OrderRelation R = order_relation(r);
        std::vector<Rat> inside;
        for (const auto& e : w.elements())
          if (r.interval.member(e)) inside.push_back(e);
        row["interval_members"] = inside.size();
        row["b"] = r.b.str();
        if (inside.size() < 100) ok = false, why = "fewer than 100 window members";
        for (std::size_t a = 0; a < inside.size() && ok; ++a)
          for (std::size_t b = 0; b < inside.size() && ok; ++b)
            if (R.holds(inside[a], inside[b]) != (a < b)) ok = false, why = "R differs from <";
        if (ok && !(r.trace.replays() && r.trace.replay() == r.interval)) ok = false, why = "trace does not replay";
      }
      row["verdict"] = order_verdict ? "OrderRecovered" : "GroupDefinable";
      row["ok"] = ok;
      if (!ok) row["failure"] = why;
      failures += !ok;
      rows.push_back(row);
    }
  }
  o.pass = failures == 0;
  o.detail = std::to_string(group) + " group-definable, " + std::to_string(order) + " order-recovered, " +
             std::to_string(failures) + " failures";
  o.artifact = {{"sets", rows}, {"failures", failures}};
  return o;
}

// --- 5: the interval detector ----------------------------------------------

Outcome chi_detector() {
  Outcome o;
  GroundModel Z = GroundModel::integers();
  testing::CorpusGenerator gen(Z, 555);
  Window w = Window::discrete(1000);
  long bad = 0, positives = 0, checked = 0;
  json rows = json::array();
  for (int i = 0; i < 50; ++i) {
    Formula phi = gen.next_two_var();
    Formula chi = eliminate_quantifiers(build_chi(phi, Z), Z);
    long local_bad = 0;
    for (long c = -50; c <= 50; ++c) {
      auto table = brute_window(substitute_params(phi, {{"z", Rat(c)}}), "x", w);
      // The b > 0 with table == [0, b], if any.
      long realized = 0;
      std::size_t zero = 1000;
      if (table[zero] && !table[zero - 1]) {
        std::size_t k = zero;
        while (k + 1 < table.size() && table[k + 1]) ++k;
        bool rest = false;
        for (std::size_t j = k + 1; j < table.size() && !rest; ++j) rest = table[j];
        for (std::size_t j = 0; j < zero && !rest; ++j) rest = table[j];
        // k at the window edge means the realization may continue past it.
        if (!rest && k > zero && k + 1 < table.size()) realized = long(k - zero);
      }
      for (long b = -50; b <= 50; ++b) {
        bool want = b > 0 && b == realized;
        bool got = eval_formula(chi, {{"y", Rat(b)}, {"z", Rat(c)}}, Z);
        ++checked;
        positives += got;
        if (got != want) ++local_bad;
      }
    }
    bad += local_bad;
    rows.push_back({{"phi", phi.str()}, {"disagreements", local_bad}});
  }
  o.pass = bad == 0;
  o.detail = std::to_string(bad) + " disagreements over " + std::to_string(checked) + " (phi, b, c), " +
             std::to_string(positives) + " positive";
  o.artifact = {{"formulas", rows}, {"checked", checked}, {"positives", positives}};
  return o;
}

// --- 6: lattices -----------------------------------------------------------

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

Outcome lattice_suite() {
  Outcome o;
  long failures = 0;
  std::mt19937_64 rng(2025);

  std::uniform_int_distribution<int> dim(1, 6), entry(-20, 20);
  long snf_bad = 0;
  json diagonals = json::array();
  for (int t = 0; t < 200; ++t) {
    IntMatrix a(dim(rng), std::vector<Int>(dim(rng)));
    for (auto& row : a)
      for (auto& x : row) x = entry(rng);
    SnfResult r = smith_normal_form(a);
    bool ok = snf_ok(a, r);
    if (ok && a.size() == a[0].size()) {
      Int prod = 1;
      for (const auto& s : r.diagonal()) prod *= s;
      ok = prod == abs_of(determinant(a));
    }
    snf_bad += !ok;
    json d = json::array();
    for (const auto& s : r.diagonal()) d.push_back(to_string(s));
    diagonals.push_back(d);
  }

  long zd_bad = 0;
  for (std::size_t d = 1; d <= 4; ++d)
    for (long m = 1; m <= 10; ++m) {
      Int want = 1;
      for (std::size_t i = 0; i < d; ++i) want *= m;
      zd_bad += quotient_card(LatticeGroup::standard(d), m) != want;
    }

  std::uniform_int_distribution<int> num(-6, 6), den(1, 4), count(0, 3), mod(1, 8);
  auto rvec = [&] {
    RatVector v;
    for (int l = 0; l < 3; ++l) {
      Rat q(num(rng), den(rng));
      q.canonicalize();
      v.push_back(q);
    }
    return v;
  };
  long sub_bad = 0, cross = 0;
  json cards = json::array();
  for (int t = 0; t < 100; ++t) {
    std::vector<RatVector> gens;
    int k = count(rng);
    for (int i = 0; i < k; ++i) gens.push_back(rvec());
    LatticeGroup g(3, gens);
    long m = mod(rng);
    Int card = quotient_card(g, m);
    bool ok = rank(g) <= 3 && card <= Int(m * m * m);
    if (card <= 64) {
      ++cross;
      ok = ok && card == Int(brute_cosets(g, m));
    }
    sub_bad += !ok;
    cards.push_back({m, to_string(card)});
  }

  // acl instances: G = Z^3 or a random full-rank overlattice; A, B from G.
  long acl_bad = 0, exchanges = 0;
  std::uniform_int_distribution<int> small(-4, 4), pick(0, 2);
  for (int t = 0; t < 50; ++t) {
    std::vector<RatVector> ggens{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    if (t % 2) ggens.push_back({Rat(1, 2), Rat(1, 2), Rat(small(rng) & 1, 2)});
    LatticeGroup g(3, ggens);
    auto elem = [&] {
      RatVector v(3, Rat(0));
      for (const auto& b : g.basis()) {
        int c = small(rng);
        for (int l = 0; l < 3; ++l) v[l] += c * b[l];
      }
      return v;
    };
    std::vector<RatVector> a, b;
    for (int i = pick(rng); i > 0; --i) a.push_back(elem());
    b = a;
    b.push_back(elem());
    LatticeGroup acl_a = acl_closure(g, a, Mode::Dense);
    LatticeGroup acl_b = acl_closure(g, b, Mode::Dense);
    bool ok = true;
    for (const auto& v : a) ok = ok && acl_a.contains(v);                  // closure
    ok = ok && acl_b.contains(acl_a);                                      // monotone
    ok = ok && acl_closure(g, acl_a.basis(), Mode::Dense) == acl_a;        // idempotent
    ok = ok && g.contains(acl_a);
    // exchange: x in acl(A, y) \ acl(A) implies y in acl(A, x)
    RatVector y = elem();
    std::vector<RatVector> ay = a;
    ay.push_back(y);
    for (int tries = 0; tries < 20; ++tries) {
      RatVector x(3, Rat(0));
      for (const auto& v : a) {
        int c = small(rng);
        for (int l = 0; l < 3; ++l) x[l] += c * v[l];
      }
      int k1 = small(rng) | 1;
      for (int l = 0; l < 3; ++l) x[l] += k1 * y[l];
      if (!acl_closure(g, ay, Mode::Dense).contains(x) || acl_a.contains(x)) continue;
      std::vector<RatVector> ax = a;
      ax.push_back(x);
      ok = ok && acl_closure(g, ax, Mode::Dense).contains(y);
      ++exchanges;
    }
    acl_bad += !ok;
  }

  failures = snf_bad + zd_bad + sub_bad + acl_bad;
  o.pass = failures == 0;
  o.detail = "snf " + std::to_string(snf_bad) + ", Z^d quotients " + std::to_string(zd_bad) + ", subgroups " +
             std::to_string(sub_bad) + " (" + std::to_string(cross) + " brute-checked), acl " +
             std::to_string(acl_bad) + " failures (" + std::to_string(exchanges) + " exchange instances)";
  o.artifact = {{"snf_diagonals", diagonals}, {"subgroup_cards", cards}, {"failures", failures}};
  return o;
}

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> run;
  double budget_s;  // 0: none
};

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path dir = argc > 1 ? argv[1] : "acceptance_out";
  std::filesystem::create_directories(dir);
  std::vector<Criterion> criteria{
      {1, "qe-soundness", qe_soundness, 60},
      {2, "normal-form-soundness", normal_form_soundness, 0},
      {3, "coset-density", coset_density, 0},
      {4, "dichotomy", dichotomy, 120},
      {5, "chi-detector", chi_detector, 0},
      {6, "lattice-suite", lattice_suite, 30},
  };

  int failed = 0;
  std::vector<std::string> first_run;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o = c.run();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = c.budget_s == 0 || secs < c.budget_s;
    bool pass = o.pass && in_time;
    failed += !pass;
    std::string text = o.artifact.dump(2) + "\n";
    first_run.push_back(text);
    std::ofstream(dir / (c.name + ".json")) << text;
    std::printf("%s %d %s: %s%s (%.1f s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                in_time ? "" : ", over time budget", secs);
    std::fflush(stdout);
  }

  // 7: a second full run must reproduce every artifact byte for byte.
  std::vector<std::string> differing;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string again = criteria[i].run().artifact.dump(2) + "\n";
    std::ifstream in(dir / (criteria[i].name + ".json"));
    std::stringstream on_disk;
    on_disk << in.rdbuf();
    if (again != first_run[i] || on_disk.str() != again) differing.push_back(criteria[i].name);
  }
  bool det = differing.empty();
  failed += !det;
  std::string list;
  for (const auto& d : differing) list += " " + d;
  std::printf("%s 7 determinism: %zu artifacts compared, %zu differ%s\n", det ? "PASS" : "FAIL", criteria.size(),
              differing.size(), list.c_str());
  return failed == 0 ? 0 : 1;
}
