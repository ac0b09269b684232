#include "oag/qe.hpp"

#include <algorithm>
#include <functional>
#include <optional>

namespace oag {

namespace {

// Literals are "t REL 0"; Dvd means t in mG.
enum class LK { Lt, Le, Eq, Ne, Dvd, NDvd };

struct Lit {
  LK kind;
  LinearTerm t;
  Int m;
};

struct Node {
  enum class K { True, False, Lit, And, Or };
  K kind = K::True;
  Lit lit{LK::Eq, {}, 0};
  std::vector<Node> kids;

  static Node truth() { return Node{}; }
  static Node falsity() {
    Node n;
    n.kind = K::False;
    return n;
  }
  static Node of(Lit l) {
    Node n;
    n.kind = K::Lit;
    n.lit = std::move(l);
    return n;
  }
};

int cmp_term(const LinearTerm& a, const LinearTerm& b) { return a < b ? -1 : b < a ? 1 : 0; }

int cmp_node(const Node& a, const Node& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.kind == Node::K::Lit) {
    if (a.lit.kind != b.lit.kind) return a.lit.kind < b.lit.kind ? -1 : 1;
    if (a.lit.m != b.lit.m) return a.lit.m < b.lit.m ? -1 : 1;
    return cmp_term(a.lit.t, b.lit.t);
  }
  std::size_t n = std::min(a.kids.size(), b.kids.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = cmp_node(a.kids[i], b.kids[i])) return c;
  return a.kids.size() < b.kids.size() ? -1 : a.kids.size() > b.kids.size() ? 1 : 0;
}

bool mentions(const Node& n, const std::string& x) {
  if (n.kind == Node::K::Lit) return n.lit.t.mentions(x);
  return std::any_of(n.kids.begin(), n.kids.end(), [&](const Node& k) { return mentions(k, x); });
}

void collect_lits(const Node& n, std::vector<const Lit*>& out) {
  if (n.kind == Node::K::Lit) out.push_back(&n.lit);
  for (const auto& k : n.kids) collect_lits(k, out);
}

Int coeff_gcd(const LinearTerm& t) {
  Int g = 0;
  for (const auto& [v, c] : t.coeffs()) g = gcd(g, c);
  return g;
}

// Variable part with the constant dropped, used as a key for bound merging.
LinearTerm var_part(const LinearTerm& t) { return t.plus_constant(-t.constant()); }

LinearTerm divided(const LinearTerm& t, const Int& g) {
  LinearTerm r(Rat(t.constant() / g));
  for (const auto& [v, c] : t.coeffs()) r = r + LinearTerm::variable(v, Int(c / g));
  return r;
}

bool first_coeff_negative(const LinearTerm& t) { return !t.coeffs().empty() && t.coeffs().begin()->second < 0; }

class Engine {
 public:
  explicit Engine(const GroundModel& m) : model_(m) {}

  // -- literal normalization ------------------------------------------------

  Node lit(LK kind, LinearTerm t, Int m = 0) const {
    bool disc = model_.discrete();
    if (disc && kind == LK::Le) {
      kind = LK::Lt;
      t = t.plus_constant(-1);
    }
    if (kind == LK::Dvd || kind == LK::NDvd) return dvd_lit(kind, std::move(t), m);
    if (t.is_constant()) {
      const Rat& c = t.constant();
      bool v = kind == LK::Lt ? c < 0 : kind == LK::Le ? c <= 0 : kind == LK::Eq ? c == 0 : c != 0;
      return v ? Node::truth() : Node::falsity();
    }
    Int g = coeff_gcd(t);
    const Rat& c = t.constant();
    if (kind == LK::Lt || kind == LK::Le) {
      if (disc) {
        // g*s + c < 0  <=>  s + floor(c/g) < 0 over the integers
        LinearTerm s = divided(var_part(t), g);
        return Node::of({kind, s.plus_constant(Rat(floor_of(Rat(c / g)))), 0});
      }
      if (g != 1 && model_.contains(Rat(c / g))) t = divided(t, g);
      return Node::of({kind, std::move(t), 0});
    }
    // Eq / Ne
    if (!model_.contains(Rat(c / g))) return kind == LK::Eq ? Node::falsity() : Node::truth();
    t = divided(t, g);
    if (first_coeff_negative(t)) t = -t;
    return Node::of({kind, std::move(t), 0});
  }

  Node dvd_lit(LK kind, LinearTerm t, const Int& m) const {
    Node yes = kind == LK::Dvd ? Node::truth() : Node::falsity();
    Node no = kind == LK::Dvd ? Node::falsity() : Node::truth();
    Int M = model_.effective_modulus(m);
    if (M == 1) return yes;
    // Coefficients and constant only matter modulo M.
    LinearTerm r(Rat(model_.residue(t.constant(), M)));
    for (const auto& [v, c] : t.coeffs()) {
      Int cc = mod_floor(c, M);
      if (cc != 0) r = r + LinearTerm::variable(v, cc);
    }
    if (r.is_constant()) return r.constant() == 0 ? yes : no;
    Int g = gcd(coeff_gcd(r), gcd(r.constant().get_num(), M));
    if (g != 1) {
      r = divided(r, g);
      M /= g;
      if (M == 1) return yes;
    }
    return Node::of({kind, std::move(r), M});
  }

  Node negate_lit(const Lit& l) const {
    switch (l.kind) {
      case LK::Lt: return model_.discrete() ? lit(LK::Lt, (-l.t).plus_constant(-1)) : lit(LK::Le, -l.t);
      case LK::Le: return lit(LK::Lt, -l.t);
      case LK::Eq: return lit(LK::Ne, l.t);
      case LK::Ne: return lit(LK::Eq, l.t);
      case LK::Dvd: return lit(LK::NDvd, l.t, l.m);
      case LK::NDvd: return lit(LK::Dvd, l.t, l.m);
    }
    return Node::truth();
  }

  // -- connectives ------------------------------------------------------------

  Node mk(Node::K kind, std::vector<Node> in) const {
    bool is_and = kind == Node::K::And;
    Node::K absorbing = is_and ? Node::K::False : Node::K::True;
    std::vector<Node> kids;
    for (auto& n : in) {
      if (n.kind == absorbing) return n;
      if (n.kind == (is_and ? Node::K::True : Node::K::False)) continue;
      if (n.kind == kind) {
        for (auto& k : n.kids) kids.push_back(std::move(k));
      } else {
        kids.push_back(std::move(n));
      }
    }
    std::sort(kids.begin(), kids.end(), [](const Node& a, const Node& b) { return cmp_node(a, b) < 0; });
    kids.erase(std::unique(kids.begin(), kids.end(), [](const Node& a, const Node& b) { return cmp_node(a, b) == 0; }),
               kids.end());
    if (!merge_bounds(kids, is_and)) return is_and ? Node::falsity() : Node::truth();
    // complementary literals
    for (const auto& k : kids) {
      if (k.kind != Node::K::Lit || (k.lit.kind != LK::Eq && k.lit.kind != LK::Dvd)) continue;
      Node neg = negate_lit(k.lit);
      if (neg.kind == Node::K::Lit &&
          std::binary_search(kids.begin(), kids.end(), neg, [](const Node& a, const Node& b) { return cmp_node(a, b) < 0; }))
        return is_and ? Node::falsity() : Node::truth();
    }
    if (kids.empty()) return is_and ? Node::truth() : Node::falsity();
    if (kids.size() == 1) return std::move(kids[0]);
    Node n;
    n.kind = kind;
    n.kids = std::move(kids);
    return n;
  }

  Node mk_and(std::vector<Node> in) const { return mk(Node::K::And, std::move(in)); }
  Node mk_or(std::vector<Node> in) const { return mk(Node::K::Or, std::move(in)); }

  // Keeps only the tightest (And) or loosest (Or) bound per variable part and
  // detects empty/total pairs of opposite bounds. Returns false when the
  // connective collapses to its absorbing value.
  bool merge_bounds(std::vector<Node>& kids, bool is_and) const {
    struct Bound {
      Rat v;  // s < v  or  s <= v
      bool strict;
      std::size_t idx;
    };
    std::map<LinearTerm, Bound> best;
    std::vector<char> drop(kids.size(), 0);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const Node& k = kids[i];
      if (k.kind != Node::K::Lit || (k.lit.kind != LK::Lt && k.lit.kind != LK::Le)) continue;
      LinearTerm s = var_part(k.lit.t);
      Bound b{Rat(-k.lit.t.constant()), k.lit.kind == LK::Lt, i};
      auto it = best.find(s);
      if (it == best.end()) {
        best.emplace(s, b);
        continue;
      }
      Bound& o = it->second;
      bool b_tighter = b.v < o.v || (b.v == o.v && b.strict && !o.strict);
      bool keep_new = is_and ? b_tighter : !b_tighter && !(b.v == o.v && b.strict == o.strict);
      if (keep_new) {
        drop[o.idx] = 1;
        o = b;
      } else {
        drop[i] = 1;
      }
    }
    for (const auto& [s, up] : best) {
      auto it = best.find(-s);
      if (it == best.end() || !(s < -s)) continue;
      // up: s < U ; other: -s < V  i.e.  s > -V
      const Bound& lo = it->second;
      Rat U = up.v, L = -lo.v;
      if (is_and) {
        bool empty = model_.discrete() ? U - L <= 1 : (L > U || (L == U && (up.strict || lo.strict)));
        if (empty) return false;
      } else {
        bool total = model_.discrete() ? U > L : (U > L || (U == L && !(up.strict && lo.strict)));
        if (total) return false;
      }
    }
    std::vector<Node> out;
    for (std::size_t i = 0; i < kids.size(); ++i)
      if (!drop[i]) out.push_back(std::move(kids[i]));
    kids = std::move(out);
    return true;
  }

  Node negate(const Node& n) const {
    switch (n.kind) {
      case Node::K::True: return Node::falsity();
      case Node::K::False: return Node::truth();
      case Node::K::Lit: return negate_lit(n.lit);
      case Node::K::And:
      case Node::K::Or: {
        std::vector<Node> ks;
        for (const auto& k : n.kids) ks.push_back(negate(k));
        return n.kind == Node::K::And ? mk_or(std::move(ks)) : mk_and(std::move(ks));
      }
    }
    return n;
  }

  Node map_lits(const Node& n, const std::function<Node(const Lit&)>& f) const {
    switch (n.kind) {
      case Node::K::Lit: return f(n.lit);
      case Node::K::And:
      case Node::K::Or: {
        std::vector<Node> ks;
        ks.reserve(n.kids.size());
        for (const auto& k : n.kids) ks.push_back(map_lits(k, f));
        return n.kind == Node::K::And ? mk_and(std::move(ks)) : mk_or(std::move(ks));
      }
      default: return n;
    }
  }

  // -- formula conversion -------------------------------------------------------

  Node from_formula(const Formula& f) const {
    using FK = Formula::Kind;
    switch (f.kind()) {
      case FK::True: return Node::truth();
      case FK::False: return Node::falsity();
      case FK::Atom: {
        LinearTerm t = f.lhs() - f.rhs();
        switch (f.rel()) {
          case Formula::Rel::Eq: return lit(LK::Eq, t);
          case Formula::Rel::Lt: return lit(LK::Lt, t);
          case Formula::Rel::Le: return lit(LK::Le, t);
          case Formula::Rel::Cong: return lit(LK::Dvd, t, f.modulus());
        }
        return Node::truth();
      }
      case FK::Not: return negate(from_formula(f.left()));
      case FK::And: return mk_and({from_formula(f.left()), from_formula(f.right())});
      case FK::Or: return mk_or({from_formula(f.left()), from_formula(f.right())});
      case FK::Implies: return mk_or({negate(from_formula(f.left())), from_formula(f.right())});
      case FK::Iff: {
        Node a = from_formula(f.left()), b = from_formula(f.right());
        return mk_or({mk_and({a, b}), mk_and({negate(a), negate(b)})});
      }
      case FK::Exists: return eliminate(f.var(), from_formula(f.left()));
      case FK::Forall: return negate(eliminate(f.var(), negate(from_formula(f.left()))));
    }
    return Node::truth();
  }

  static Formula to_formula(const Node& n) {
    switch (n.kind) {
      case Node::K::True: return Formula::truth();
      case Node::K::False: return Formula::falsity();
      case Node::K::Lit: {
        // Split t into positive part P and negative part N: t = P - N.
        LinearTerm P, N;
        for (const auto& [v, c] : n.lit.t.coeffs()) {
          if (c > 0) P = P + LinearTerm::variable(v, c);
          else N = N + LinearTerm::variable(v, Int(-c));
        }
        const Rat& k = n.lit.t.constant();
        if (k > 0) P = P.plus_constant(k);
        else if (k < 0) N = N.plus_constant(Rat(-k));
        using R = Formula::Rel;
        switch (n.lit.kind) {
          case LK::Lt: return Formula::atom(R::Lt, P, N);
          case LK::Le: return Formula::atom(R::Le, P, N);
          case LK::Eq: return Formula::atom(R::Eq, P, N);
          case LK::Ne: return Formula::negation(Formula::atom(R::Eq, P, N));
          case LK::Dvd: return Formula::atom(R::Cong, P, N, n.lit.m);
          case LK::NDvd: return Formula::negation(Formula::atom(R::Cong, P, N, n.lit.m));
        }
        return Formula::truth();
      }
      case Node::K::And:
      case Node::K::Or: {
        std::vector<Formula> fs;
        for (const auto& k : n.kids) fs.push_back(to_formula(k));
        return n.kind == Node::K::And ? Formula::conj_all(fs) : Formula::disj_all(fs);
      }
    }
    return Formula::truth();
  }

  // -- elimination ------------------------------------------------------------

  Node eliminate(const std::string& x, const Node& phi) const {
    if (!mentions(phi, x)) return phi;
    if (phi.kind == Node::K::Or) {
      std::vector<Node> ks;
      for (const auto& k : phi.kids) ks.push_back(eliminate(x, k));
      return mk_or(std::move(ks));
    }
    if (phi.kind == Node::K::And) {
      std::vector<Node> with, without;
      for (const auto& k : phi.kids) (mentions(k, x) ? with : without).push_back(k);
      Node inner = with.size() == 1 ? with[0] : mk_and(with);
      if (inner.kind == Node::K::Or) {
        without.push_back(eliminate(x, inner));
      } else {
        without.push_back(model_.discrete() ? cooper(x, inner) : virtual_subst(x, inner));
      }
      return mk_and(std::move(without));
    }
    return model_.discrete() ? cooper(x, phi) : virtual_subst(x, phi);
  }

  // The top-level equality with the smallest |coefficient| on x, if any.
  static std::optional<Lit> pick_equation(const std::string& x, const Node& psi) {
    std::optional<Lit> best;
    auto consider = [&](const Node& k) {
      if (k.kind != Node::K::Lit || k.lit.kind != LK::Eq || !k.lit.t.mentions(x)) return;
      if (!best || abs_of(k.lit.t.coeff(x)) < abs_of(best->t.coeff(x))) best = k.lit;
    };
    if (psi.kind == Node::K::And)
      for (const auto& k : psi.kids) consider(k);
    else
      consider(psi);
    return best;
  }

  // Integer bounds lo <= x <= hi from top-level literals in x alone (discrete).
  static std::optional<std::pair<Int, Int>> constant_range(const std::string& x, const Node& psi) {
    std::optional<Int> lo, hi;
    auto consider = [&](const Node& k) {
      if (k.kind != Node::K::Lit || k.lit.kind != LK::Lt || k.lit.t.coeffs().size() != 1) return;
      Int c = k.lit.t.coeff(x);
      Rat r = k.lit.t.constant();
      // normalized, so c = +-1 and r is an integer
      if (c == 1) {
        Int h = Int(-r.get_num()) - 1;
        if (!hi || h < *hi) hi = h;
      } else if (c == -1) {
        Int l = r.get_num() + 1;
        if (!lo || l > *lo) lo = l;
      }
    };
    if (psi.kind == Node::K::And)
      for (const auto& k : psi.kids) consider(k);
    else
      consider(psi);
    if (!lo || !hi) return std::nullopt;
    return std::make_pair(*lo, *hi);
  }

  // (A & (B | C)) becomes (A & B) | (A & C) for the first disjunction in x.
  std::optional<Node> distribute(const std::string& x, const Node& psi) const {
    if (psi.kind != Node::K::And) return std::nullopt;
    for (std::size_t i = 0; i < psi.kids.size(); ++i) {
      const Node& k = psi.kids[i];
      if (k.kind != Node::K::Or || !mentions(k, x)) continue;
      std::vector<Node> rest;
      for (std::size_t j = 0; j < psi.kids.size(); ++j)
        if (j != i) rest.push_back(psi.kids[j]);
      std::vector<Node> alts;
      for (const auto& d : k.kids) {
        std::vector<Node> conj = rest;
        conj.push_back(d);
        alts.push_back(mk_and(std::move(conj)));
      }
      return mk_or(std::move(alts));
    }
    return std::nullopt;
  }

  // psi[x := u/d] multiplied through by d > 0.
  Node subst_point(const Node& psi, const std::string& x, const LinearTerm& u, const Int& d) const {
    return map_lits(psi, [&](const Lit& l) {
      Int c = l.t.coeff(x);
      if (c == 0) return Node::of(l);
      LinearTerm t = l.t.without(x).scaled(d) + u.scaled(c);
      return lit(l.kind, t, l.kind == LK::Dvd || l.kind == LK::NDvd ? Int(l.m * d) : Int(0));
    });
  }

  Node cooper(const std::string& x, const Node& psi) const {
    if (auto eq = pick_equation(x, psi)) {
      // a*x + s = 0: x = -s/a must exist, then substitute.
      Int a = eq->t.coeff(x);
      LinearTerm s = eq->t.without(x);
      if (a < 0) {
        a = -a;
        s = -s;
      }
      return mk_and({lit(LK::Dvd, s, a), subst_point(psi, x, -s, a)});
    }
    if (auto range = constant_range(x, psi); range && range->second - range->first < 64) {
      // x is boxed in by constants: a finite disjunction is exact.
      std::vector<Node> out;
      for (Int v = range->first; v <= range->second; ++v)
        out.push_back(map_lits(psi, [&](const Lit& l) {
          if (!l.t.mentions(x)) return Node::of(l);
          return lit(l.kind, l.t.substitute(x, LinearTerm(Rat(v))), l.m);
        }));
      return mk_or(std::move(out));
    }
    if (auto d = distribute(x, psi)) return eliminate(x, *d);
    std::vector<const Lit*> lits;
    collect_lits(psi, lits);
    Int L = 1;
    for (const Lit* l : lits)
      if (l->t.mentions(x)) L = lcm(L, abs_of(l->t.coeff(x)));
    // Scale every literal so x has coefficient +-L, then rename L*x to x.
    Node scaled = map_lits(psi, [&](const Lit& l) {
      Int c = l.t.coeff(x);
      if (c == 0) return Node::of(l);
      Int k = L / abs_of(c);
      LinearTerm t = l.t.without(x).scaled(k) + LinearTerm::variable(x, c > 0 ? Int(1) : Int(-1));
      bool dv = l.kind == LK::Dvd || l.kind == LK::NDvd;
      return lit(l.kind, t, dv ? Int(l.m * k) : Int(0));
    });
    if (L > 1) scaled = mk_and({scaled, lit(LK::Dvd, LinearTerm::variable(x), L)});

    lits.clear();
    collect_lits(scaled, lits);
    Int delta = 1;
    std::vector<LinearTerm> B, A;
    for (const Lit* l : lits) {
      Int c = l->t.coeff(x);
      if (c == 0) continue;
      if (l->kind == LK::Dvd || l->kind == LK::NDvd) {
        delta = lcm(delta, l->m);
        continue;
      }
      LinearTerm r = l->t.without(x);
      // c = +1: x + r REL 0 ; c = -1: -x + r REL 0
      LinearTerm root = c > 0 ? -r : r;
      switch (l->kind) {
        case LK::Lt: (c > 0 ? A : B).push_back(root); break;
        case LK::Eq:
          B.push_back(root.plus_constant(-1));
          A.push_back(root.plus_constant(1));
          break;
        case LK::Ne:
          B.push_back(root);
          A.push_back(root);
          break;
        default: break;
      }
    }
    auto uniq = [](std::vector<LinearTerm>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(B);
    uniq(A);
    bool lower = B.size() <= A.size();
    const auto& pts = lower ? B : A;
    // psi at x -> -inf (lower) or +inf (upper)
    Node inf = map_lits(scaled, [&](const Lit& l) {
      Int c = l.t.coeff(x);
      if (c == 0 || l.kind == LK::Dvd || l.kind == LK::NDvd) return Node::of(l);
      switch (l.kind) {
        case LK::Lt: return ((c > 0) == lower) ? Node::truth() : Node::falsity();
        case LK::Eq: return Node::falsity();
        case LK::Ne: return Node::truth();
        default: return Node::of(l);
      }
    });
    auto at = [&](const Node& n, const LinearTerm& v) {
      return map_lits(n, [&](const Lit& l) {
        if (!l.t.mentions(x)) return Node::of(l);
        return lit(l.kind, l.t.substitute(x, v), l.m);
      });
    };
    std::vector<Node> out;
    for (Int j = 1; j <= delta; ++j) {
      Rat off = lower ? Rat(j) : Rat(-j);
      out.push_back(at(inf, LinearTerm(off)));
      for (const auto& b : pts) out.push_back(at(scaled, b.plus_constant(off)));
    }
    return mk_or(std::move(out));
  }

  Node virtual_subst(const std::string& x, const Node& psi) const {
    if (auto eq = pick_equation(x, psi)) {
      Int a = eq->t.coeff(x);
      LinearTerm s = eq->t.without(x);
      if (a < 0) {
        a = -a;
        s = -s;
      }
      return mk_and({lit(LK::Dvd, s, a), subst_point(psi, x, -s, a)});
    }
    std::vector<const Lit*> lits;
    collect_lits(psi, lits);
    Int delta = 1;
    for (const Lit* l : lits)
      if (l->t.mentions(x) && (l->kind == LK::Dvd || l->kind == LK::NDvd)) delta = lcm(delta, l->m);

    std::vector<Node> out;
    for (Int r = 0; r < delta; ++r) {
      // Inside the class x = r (mod delta) every congruence on x is decided by r.
      Node pr = map_lits(psi, [&](const Lit& l) {
        if (!l.t.mentions(x) || (l.kind != LK::Dvd && l.kind != LK::NDvd)) return Node::of(l);
        return lit(l.kind, l.t.substitute(x, LinearTerm(Rat(r))), l.m);
      });
      std::vector<const Lit*> ol;
      collect_lits(pr, ol);
      std::vector<std::pair<LinearTerm, Int>> crit;  // x = u/d
      for (const Lit* l : ol) {
        Int c = l->t.coeff(x);
        if (c == 0) continue;
        LinearTerm s = l->t.without(x);
        crit.emplace_back(c > 0 ? -s : s, abs_of(c));
      }
      std::sort(crit.begin(), crit.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
      });
      crit.erase(std::unique(crit.begin(), crit.end()), crit.end());

      out.push_back(map_lits(pr, [&](const Lit& l) {
        Int c = l.t.coeff(x);
        if (c == 0) return Node::of(l);
        switch (l.kind) {
          case LK::Lt:
          case LK::Le: return c > 0 ? Node::truth() : Node::falsity();
          case LK::Eq: return Node::falsity();
          case LK::Ne: return Node::truth();
          default: return Node::of(l);
        }
      }));
      for (const auto& [u, d] : crit) {
        // u/d lies in the class r: u - d*r in d*delta*G.
        Node member = lit(LK::Dvd, u.plus_constant(Rat(-d * r)), d * delta);
        out.push_back(mk_and({member, subst_point(pr, x, u, d)}));
        out.push_back(map_lits(pr, [&](const Lit& l) {
          Int c = l.t.coeff(x);
          if (c == 0) return Node::of(l);
          LinearTerm w = l.t.without(x).scaled(d) + u.scaled(c);  // d * value at the point
          switch (l.kind) {
            case LK::Lt:
            case LK::Le: return c > 0 ? lit(LK::Lt, w) : lit(LK::Le, w);
            case LK::Eq: return Node::falsity();
            case LK::Ne: return Node::truth();
            default: return Node::of(l);
          }
        }));
      }
    }
    return mk_or(std::move(out));
  }

 private:
  const GroundModel& model_;
};

DefSet atom_set(const Formula& a, const std::string& x, const GroundModel& model) {
  LinearTerm t = a.lhs() - a.rhs();
  for (const auto& [v, c] : t.coeffs())
    if (v != x) throw FormulaError("qfree_to_defset: free variable '" + v + "' besides '" + x + "'");
  Int c = t.coeff(x);
  Rat k = t.constant();
  if (a.rel() == Formula::Rel::Cong) {
    // c*x + k in mG depends only on the class of x.
    Int M = model.effective_modulus(a.modulus());
    std::vector<RawPiece> pieces;
    for (Int r = 0; r < M; ++r)
      if (model.in_multiple(Rat(c * r + k), M)) pieces.push_back(RawPiece::piece({}, Rat(r), M));
    if (pieces.empty()) pieces.push_back(RawPiece::piece({ExtQRat(0), ExtQRat(0)}, 0, M));
    return DefSet::normalize(model, pieces);
  }
  if (c == 0) {
    bool v = a.rel() == Formula::Rel::Eq ? k == 0 : a.rel() == Formula::Rel::Lt ? k < 0 : k <= 0;
    return v ? DefSet::full(model) : DefSet::empty(model);
  }
  Rat root = -k / c;
  std::vector<RawPiece> pieces;
  if (a.rel() != Formula::Rel::Lt && model.contains(root)) pieces.push_back(RawPiece::singleton(root));
  if (a.rel() != Formula::Rel::Eq)
    pieces.push_back(RawPiece::piece(c > 0 ? IntervalQ{ExtQRat::neg_inf(), ExtQRat(root)}
                                           : IntervalQ{ExtQRat(root), ExtQRat::pos_inf()}));
  return DefSet::normalize(model, pieces);
}

}  // namespace

Formula eliminate_quantifiers(const Formula& f, const GroundModel& model) {
  Engine e(model);
  return Engine::to_formula(e.from_formula(f));
}

DefSet qfree_to_defset(const Formula& f, const std::string& x, const GroundModel& model) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: return DefSet::full(model);
    case K::False: return DefSet::empty(model);
    case K::Atom: return atom_set(f, x, model);
    case K::Not: return set_complement(qfree_to_defset(f.left(), x, model));
    case K::And: return set_intersect(qfree_to_defset(f.left(), x, model), qfree_to_defset(f.right(), x, model));
    case K::Or: return set_union(qfree_to_defset(f.left(), x, model), qfree_to_defset(f.right(), x, model));
    case K::Implies:
      return set_union(set_complement(qfree_to_defset(f.left(), x, model)), qfree_to_defset(f.right(), x, model));
    case K::Iff: {
      DefSet a = qfree_to_defset(f.left(), x, model), b = qfree_to_defset(f.right(), x, model);
      return set_union(set_intersect(a, b), set_intersect(set_complement(a), set_complement(b)));
    }
    case K::Exists:
    case K::Forall: throw FormulaError("qfree_to_defset: quantifier over '" + f.var() + "'");
  }
  return DefSet::empty(model);
}

DefSet formula_to_defset(const Formula& f, const std::string& x, const std::map<std::string, Rat>& params,
                         const GroundModel& model) {
  Formula bound = substitute_params(f, params);
  for (const auto& v : bound.free_vars())
    if (v != x) throw FormulaError("formula_to_defset: unbound free variable '" + v + "'");
  return qfree_to_defset(eliminate_quantifiers(bound, model), x, model);
}

Formula defset_formula(const DefSet& d, const std::string& x) {
  using R = Formula::Rel;
  LinearTerm X = LinearTerm::variable(x);
  std::vector<Formula> parts;
  for (const auto& s : d.singletons()) parts.push_back(Formula::atom(R::Eq, X, LinearTerm(s)));
  for (const auto& c : d.components()) {
    std::vector<Formula> conj;
    if (c.interval.lo.finite()) conj.push_back(Formula::atom(R::Lt, LinearTerm(c.interval.lo.value()), X));
    if (c.interval.hi.finite()) conj.push_back(Formula::atom(R::Lt, X, LinearTerm(c.interval.hi.value())));
    if (d.modulus() > 1) conj.push_back(Formula::atom(R::Cong, X, LinearTerm(Rat(c.residue)), d.modulus()));
    parts.push_back(conj.empty() ? Formula::truth() : Formula::conj_all(conj));
  }
  return parts.empty() ? Formula::falsity() : Formula::disj_all(parts);
}

}  // namespace oag
