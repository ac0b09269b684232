#include "oag/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <functional>

namespace oag {

// ---------------------------------------------------------------------------
// Window

Window::Window(GroundModel m, long radius, long height) : model_(std::move(m)), radius_(radius), height_(height) {}

Window Window::discrete(long n) {
  if (n < 0) throw std::invalid_argument("window radius must be >= 0");
  Window w(GroundModel::integers(), n, 1);
  for (long i = -n; i <= n; ++i) w.elements_.emplace_back(i);
  return w;
}

Window Window::dense(const GroundModel& model, long height, long bound) {
  if (!model.dense()) throw std::invalid_argument("dense window over a discrete model");
  if (height < 1 || bound < 0) throw std::invalid_argument("window needs height >= 1 and bound >= 0");
  Window w(model, bound, height);
  std::vector<Int> dens;
  if (model.prime() == 0) {
    for (long q = 1; q <= height; ++q) dens.emplace_back(q);
  } else {
    for (Int q = 1; q <= height; q *= model.prime()) dens.push_back(q);
  }
  for (const auto& q : dens)
    for (long p = -height; p <= height; ++p) {
      if (gcd(Int(p), q) != 1 && !(p == 0 && q == 1)) continue;
      Rat v(Int(p), q);
      if (abs(v) <= bound) w.elements_.push_back(v);
    }
  std::sort(w.elements_.begin(), w.elements_.end());
  w.elements_.erase(std::unique(w.elements_.begin(), w.elements_.end()), w.elements_.end());
  return w;
}

Window Window::standard(const GroundModel& model) {
  return model.discrete() ? discrete(1000) : dense(model, 64, 100);
}

nlohmann::json Window::to_json() const {
  nlohmann::json j{{"mode", model_.spec()}, {"size", elements_.size()}};
  if (model_.discrete()) {
    j["radius"] = radius_;
  } else {
    j["height"] = height_;
    j["bound"] = radius_;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Evaluator

namespace {

using I128 = __int128;

I128 gcd128(I128 a, I128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    I128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

template <class V>
struct Arith;

// Integers (discrete fast path).
template <>
struct Arith<I128> {
  static bool representable(const Rat& q) {
    static const Int limit = Int(1) << 60;
    return q.get_den() == 1 && abs(q.get_num()) < limit;
  }
  static I128 of(const Rat& q) {
    const Int& n = q.get_num();
    bool neg = n < 0;
    Int a = abs(n);
    I128 v = static_cast<I128>(mpz_get_ui(Int(a >> 64).get_mpz_t())) << 64;
    v |= static_cast<I128>(mpz_get_ui(Int(a & ((Int(1) << 64) - 1)).get_mpz_t()));
    return neg ? -v : v;
  }
  static Rat to_rat(I128 v) {
    bool neg = v < 0;
    unsigned __int128 a = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    Int hi(static_cast<unsigned long>(a >> 64));
    Int lo(static_cast<unsigned long>(a & 0xFFFFFFFFFFFFFFFFULL));
    Int r = (hi << 64) + lo;
    return Rat(neg ? Int(-r) : r);
  }
  static I128 floor_div(I128 a, I128 b) {
    I128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
  }
  static I128 ceil_div(I128 a, I128 b) { return -floor_div(-a, b); }
  static bool cong(I128 t, I128 m, const GroundModel&) { return t % m == 0; }
};

// Exact rationals (dense models and oversized discrete input).
template <>
struct Arith<Rat> {
  static bool representable(const Rat&) { return true; }
  static Rat of(const Rat& q) { return q; }
  static Rat to_rat(const Rat& v) { return v; }
  static Rat floor_div(const Rat& a, const Rat& b) { return Rat(floor_of(Rat(a / b))); }
  static Rat ceil_div(const Rat& a, const Rat& b) { return Rat(ceil_of(Rat(a / b))); }
  static bool cong(const Rat& t, const Rat& m, const GroundModel& model) {
    return model.in_multiple(t, m.get_num());
  }
};

class ProgramBase {
 public:
  virtual ~ProgramBase() = default;
  virtual bool run(const std::map<std::string, Rat>& env) = 0;
  bool clamped = false;
  long long evaluations = 0;
};

template <class V>
class Program : public ProgramBase {
  using A = Arith<V>;

  struct Atom {
    Formula::Rel rel;
    std::vector<std::pair<int, V>> coeffs;  // lhs - rhs
    V constant;
    V modulus;
    Int modulus_int;
  };

  struct Node {
    Formula::Kind kind;
    int a = -1, b = -1;
    int atom = -1;
    int slot = -1;
    bool qf = true;
    std::vector<std::pair<int, V>> body_atoms;  // (atom, coefficient of slot)
    std::vector<std::pair<int, bool>> bounds;   // (atom, polarity) from the top-level conjunction
  };

 public:
  Program(const Formula& f, const GroundModel& model, const OracleConfig& cfg) : model_(model), cfg_(cfg) {
    root_ = compile(f);
    for (const auto& v : f.free_vars()) free_.push_back({v, slot(v)});
    env_.assign(slots_.size(), V(0));
  }

  static bool fits(const Formula& f) {
    using K = Formula::Kind;
    if (f.kind() == K::Atom) {
      auto ok = [](const LinearTerm& t) {
        for (const auto& [v, c] : t.coeffs())
          if (!A::representable(Rat(c))) return false;
        return A::representable(t.constant());
      };
      return ok(f.lhs()) && ok(f.rhs()) && A::representable(Rat(f.modulus()));
    }
    if (f.kind() == K::True || f.kind() == K::False) return true;
    if (!fits(f.left())) return false;
    return !f.is_binary() || fits(f.right());
  }

  bool run(const std::map<std::string, Rat>& env) override {
    for (const auto& [name, s] : free_) {
      auto it = env.find(name);
      if (it == env.end()) throw FormulaError("oracle: free variable '" + name + "' is unassigned");
      if (!model_.contains(it->second))
        throw FormulaError("oracle: " + to_string(it->second) + " is not an element of " + model_.spec());
      env_[s] = A::of(it->second);
    }
    budget_left_ = cfg_.budget;
    return eval(root_);
  }

 private:
  int slot(const std::string& v) {
    auto it = slots_.find(v);
    if (it != slots_.end()) return it->second;
    int s = static_cast<int>(slots_.size());
    slots_.emplace(v, s);
    return s;
  }

  int add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  int compile(const Formula& f) {
    using K = Formula::Kind;
    Node n;
    n.kind = f.kind();
    switch (f.kind()) {
      case K::True:
      case K::False: break;
      case K::Atom: {
        Atom a;
        a.rel = f.rel();
        LinearTerm t = f.lhs() - f.rhs();
        for (const auto& [v, c] : t.coeffs()) a.coeffs.emplace_back(slot(v), A::of(Rat(c)));
        a.constant = A::of(t.constant());
        a.modulus_int = f.rel() == Formula::Rel::Cong ? f.modulus() : Int(0);
        a.modulus = A::of(Rat(a.modulus_int));
        atoms_.push_back(std::move(a));
        n.atom = static_cast<int>(atoms_.size()) - 1;
        break;
      }
      case K::Exists:
      case K::Forall: {
        n.slot = slot(f.var());
        n.a = compile(f.left());
        n.qf = false;
        const Node& body = nodes_[n.a];
        if (body.qf) {
          collect_atoms(n.a, n.slot, n.body_atoms);
        } else {
          collect_bounds(n.a, f.kind() == K::Exists, n.slot, n.bounds);
        }
        break;
      }
      default: {
        n.a = compile(f.left());
        if (f.is_binary()) n.b = compile(f.right());
        n.qf = nodes_[n.a].qf && (n.b < 0 || nodes_[n.b].qf);
      }
    }
    return add(std::move(n));
  }

  V coeff_of(const Atom& a, int s) const {
    for (const auto& [sl, c] : a.coeffs)
      if (sl == s) return c;
    return V(0);
  }

  void collect_atoms(int idx, int s, std::vector<std::pair<int, V>>& out) const {
    const Node& n = nodes_[idx];
    if (n.kind == Formula::Kind::Atom) {
      V c = coeff_of(atoms_[n.atom], s);
      if (c != V(0)) out.emplace_back(n.atom, c);
      return;
    }
    if (n.a >= 0) collect_atoms(n.a, s, out);
    if (n.b >= 0) collect_atoms(n.b, s, out);
  }

  // Atoms that must hold (with the given polarity) for the body to take the
  // searched-for value: true for an existential, false for a universal.
  void collect_bounds(int idx, bool positive, int s, std::vector<std::pair<int, bool>>& out) const {
    using K = Formula::Kind;
    const Node& n = nodes_[idx];
    switch (n.kind) {
      case K::Atom:
        if (coeff_of(atoms_[n.atom], s) != V(0)) out.emplace_back(n.atom, positive);
        break;
      case K::Not: collect_bounds(n.a, !positive, s, out); break;
      case K::And:
        if (positive) {
          collect_bounds(n.a, true, s, out);
          collect_bounds(n.b, true, s, out);
        }
        break;
      case K::Or:
        if (!positive) {
          collect_bounds(n.a, false, s, out);
          collect_bounds(n.b, false, s, out);
        }
        break;
      case K::Implies:
        if (!positive) {
          collect_bounds(n.a, true, s, out);
          collect_bounds(n.b, false, s, out);
        }
        break;
      default: break;
    }
  }

  V term_value(const Atom& a) const {
    V t = a.constant;
    for (const auto& [s, c] : a.coeffs) t += c * env_[s];
    return t;
  }

  bool eval_atom(const Atom& a) const {
    V t = term_value(a);
    switch (a.rel) {
      case Formula::Rel::Eq: return t == V(0);
      case Formula::Rel::Lt: return t < V(0);
      case Formula::Rel::Le: return t <= V(0);
      case Formula::Rel::Cong: return A::cong(t, a.modulus, model_);
    }
    return false;
  }

  bool eval(int idx) {
    using K = Formula::Kind;
    const Node& n = nodes_[idx];
    switch (n.kind) {
      case K::True: return true;
      case K::False: return false;
      case K::Atom: return eval_atom(atoms_[n.atom]);
      case K::Not: return !eval(n.a);
      case K::And: return eval(n.a) && eval(n.b);
      case K::Or: return eval(n.a) || eval(n.b);
      case K::Implies: return !eval(n.a) || eval(n.b);
      case K::Iff: return eval(n.a) == eval(n.b);
      case K::Exists:
      case K::Forall: return eval_quantifier(idx);
    }
    return false;
  }

  bool eval_quantifier(int idx) {
    const Node& n = nodes_[idx];
    bool want = n.kind == Formula::Kind::Exists;
    V saved = env_[n.slot];
    bool found = false;
    auto try_value = [&](const V& v) {
      if (--budget_left_ < 0) throw OracleBudgetError("oracle: evaluation budget exhausted");
      ++evaluations;
      env_[n.slot] = v;
      if (eval(n.a) == want) found = true;
      return found;
    };
    if (n.qf) {
      // unreachable: quantifier nodes are never marked quantifier-free
    } else if (nodes_[n.a].qf) {
      exact_candidates(n, try_value);
    } else {
      bounded_candidates(n, try_value);
    }
    env_[n.slot] = saved;
    return want ? found : !found;
  }

  // Value of the atom's term with the quantified slot set to zero.
  V rest_value(const Atom& a, int s) {
    V saved = env_[s];
    env_[s] = V(0);
    V r = term_value(a);
    env_[s] = saved;
    return r;
  }

  template <class F>
  void exact_candidates(const Node& n, F&& try_value) {
    if (model_.discrete()) {
      std::vector<V> crit;
      V L(1);
      for (const auto& [ai, c] : n.body_atoms) {
        const Atom& a = atoms_[ai];
        if (a.rel == Formula::Rel::Cong) {
          L = L / gcd_v(L, a.modulus) * a.modulus;
          continue;
        }
        V r = rest_value(a, n.slot);
        crit.push_back(A::floor_div(-r, c));
        crit.push_back(A::ceil_div(-r, c));
      }
      std::sort(crit.begin(), crit.end());
      crit.erase(std::unique(crit.begin(), crit.end()), crit.end());
      // Between consecutive critical points every order atom is constant and
      // congruences repeat with period L, so L + 1 steps per cell suffice.
      std::vector<std::pair<V, V>> ranges;
      if (crit.empty()) {
        ranges.emplace_back(V(0), L);
      } else {
        ranges.emplace_back(crit.front() - L - V(1), crit.front());
        for (std::size_t i = 0; i < crit.size(); ++i) {
          V hi = crit[i] + L + V(1);
          if (i + 1 < crit.size() && crit[i + 1] < hi) hi = crit[i + 1];
          ranges.emplace_back(crit[i], hi);
        }
      }
      bool have_last = false;
      V last(0);
      for (const auto& [lo, hi] : ranges) {
        for (V v = lo; v <= hi; v += V(1)) {
          if (have_last && v <= last) continue;
          have_last = true;
          last = v;
          if (try_value(v)) return;
        }
      }
      return;
    }
    // Dense: critical points plus one element of every class in every cell.
    std::vector<Rat> crit;
    Int M = 1;
    for (const auto& [ai, c] : n.body_atoms) {
      const Atom& a = atoms_[ai];
      if (a.rel == Formula::Rel::Cong) {
        M = lcm(M, model_.effective_modulus(a.modulus_int));
        continue;
      }
      crit.push_back(Rat(-A::to_rat(rest_value(a, n.slot)) / A::to_rat(c)));
    }
    std::sort(crit.begin(), crit.end());
    crit.erase(std::unique(crit.begin(), crit.end()), crit.end());
    for (const auto& q : crit)
      if (model_.contains(q) && try_value(A::of(q))) return;
    for (std::size_t i = 0; i <= crit.size(); ++i) {
      ExtQRat lo = i == 0 ? ExtQRat::neg_inf() : ExtQRat(crit[i - 1]);
      ExtQRat hi = i == crit.size() ? ExtQRat::pos_inf() : ExtQRat(crit[i]);
      for (Int r = 0; r < M; ++r) {
        auto w = model_.coset_witness(lo, hi, M, Rat(r));
        if (w && try_value(A::of(*w))) return;
      }
    }
  }

  static V gcd_v(const V& a, const V& b) {
    if constexpr (std::is_same_v<V, I128>) {
      return gcd128(a, b);
    } else {
      return Rat(gcd(a.get_num(), b.get_num()));
    }
  }

  template <class F>
  void bounded_candidates(const Node& n, F&& try_value) {
    std::optional<V> lo, hi;
    auto lower = [&](const V& v) { if (!lo || v > *lo) lo = v; };
    auto upper = [&](const V& v) { if (!hi || v < *hi) hi = v; };
    bool empty = false;
    for (const auto& [ai, positive] : n.bounds) {
      const Atom& a = atoms_[ai];
      V c = coeff_of(a, n.slot);
      V r = rest_value(a, n.slot);
      // positive: c*v + r REL 0 must hold; negative: its negation must.
      Formula::Rel rel = a.rel;
      if (rel == Formula::Rel::Cong) continue;
      if (!positive) {
        if (rel == Formula::Rel::Eq) continue;
        // !(t < 0) == -t <= 0 ; !(t <= 0) == -t < 0
        rel = rel == Formula::Rel::Lt ? Formula::Rel::Le : Formula::Rel::Lt;
        c = -c;
        r = -r;
      }
      if (model_.discrete()) {
        if (rel == Formula::Rel::Eq) {
          if (A::floor_div(-r, c) != A::ceil_div(-r, c)) empty = true;
          lower(A::floor_div(-r, c));
          upper(A::floor_div(-r, c));
        } else if (rel == Formula::Rel::Lt) {
          if (c > V(0)) upper(A::ceil_div(-r, c) - V(1));
          else lower(A::floor_div(-r, c) + V(1));
        } else {
          if (c > V(0)) upper(A::floor_div(-r, c));
          else lower(A::ceil_div(-r, c));
        }
      } else {
        V root = A::of(Rat(-A::to_rat(r) / A::to_rat(c)));
        if (rel == Formula::Rel::Eq || c > V(0)) upper(root);
        if (rel == Formula::Rel::Eq || c < V(0)) lower(root);
      }
    }
    if (empty) return;
    V R = A::of(Rat(cfg_.search_radius));
    if (!lo || !hi) clamped = true;
    V from = lo ? *lo : -R, to = hi ? *hi : R;
    if (model_.discrete()) {
      for (V v = from; v <= to; v += V(1))
        if (try_value(v)) return;
      return;
    }
    // Dense nested search is never exact: scan small-height elements.
    clamped = true;
    for (const auto& q : Window::dense(model_, 24, 24).elements()) {
      V v = A::of(q);
      if (v >= from && v <= to && try_value(v)) return;
    }
  }

  GroundModel model_;
  OracleConfig cfg_;
  std::map<std::string, int> slots_;
  std::vector<std::pair<std::string, int>> free_;
  std::vector<Atom> atoms_;
  std::vector<Node> nodes_;
  std::vector<V> env_;
  int root_ = -1;
  long long budget_left_ = 0;
};

}  // namespace

struct OracleEvaluator::Impl {
  std::unique_ptr<ProgramBase> program;
};

OracleEvaluator::OracleEvaluator(const Formula& f, const GroundModel& model, OracleConfig cfg)
    : impl_(std::make_unique<Impl>()) {
  if (model.discrete() && Program<I128>::fits(f))
    impl_->program = std::make_unique<Program<I128>>(f, model, cfg);
  else
    impl_->program = std::make_unique<Program<Rat>>(f, model, cfg);
}

OracleEvaluator::~OracleEvaluator() = default;
OracleEvaluator::OracleEvaluator(OracleEvaluator&&) noexcept = default;
OracleEvaluator& OracleEvaluator::operator=(OracleEvaluator&&) noexcept = default;

bool OracleEvaluator::eval(const std::map<std::string, Rat>& env) { return impl_->program->run(env); }
bool OracleEvaluator::clamped() const { return impl_->program->clamped; }
long long OracleEvaluator::evaluations() const { return impl_->program->evaluations; }

std::vector<bool> brute_window(const Formula& f, const std::string& x, const Window& w, const OracleConfig& cfg) {
  for (const auto& v : f.free_vars())
    if (v != x) throw FormulaError("brute_window: free variable '" + v + "' besides '" + x + "'");
  OracleEvaluator ev(f, w.model(), cfg);
  std::vector<bool> out;
  out.reserve(w.elements().size());
  std::map<std::string, Rat> env;
  for (const auto& g : w.elements()) {
    env[x] = g;
    out.push_back(ev.eval(env));
  }
  return out;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["verdict"] = agree ? "agree" : "disagree";
  j["counterexample"] = counterexample ? nlohmann::json(to_string(*counterexample)) : nlohmann::json(nullptr);
  if (counterexample) j["formula_value"] = formula_value;
  j["checked"] = checked;
  j["formula_members"] = formula_members;
  j["set_members"] = set_members;
  j["scope"] = clamped ? "window-relative (unbounded quantifier search clamped)" : "window-relative";
  return j;
}

Report compare_report(const Formula& f, const std::string& x, const DefSet& d, const Window& w,
                      const OracleConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  Report r;
  for (const auto& v : f.free_vars())
    if (v != x) throw FormulaError("compare_report: free variable '" + v + "' besides '" + x + "'");
  OracleEvaluator ev(f, w.model(), cfg);
  std::map<std::string, Rat> env;
  for (const auto& g : w.elements()) {
    env[x] = g;
    bool fv = ev.eval(env);
    bool dv = d.member(g);
    ++r.checked;
    r.formula_members += fv;
    r.set_members += dv;
    if (fv != dv) {
      bool better = !r.counterexample || abs(g) < abs(*r.counterexample) ||
                    (abs(g) == abs(*r.counterexample) && g < *r.counterexample);
      if (better) {
        r.counterexample = g;
        r.formula_value = fv;
      }
      r.agree = false;
    }
  }
  r.clamped = ev.clamped();
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace oag
