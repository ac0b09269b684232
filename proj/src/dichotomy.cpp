#include "oag/dichotomy.hpp"

#include "oag/qe.hpp"

namespace oag {

namespace {

using Kind = TraceOp::Kind;

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::Intersect: return "intersect";
    case Kind::Difference: return "difference";
    case Kind::Complement: return "complement";
    case Kind::Translate: return "translate";
    case Kind::Reflect: return "reflect";
    case Kind::DivideBy: return "divide-by";
    case Kind::ShiftFamily: return "shift-family";
  }
  return "?";
}

// E is (l, h) in a dense model; see TraceOp::Kind::ShiftFamily.
DefSet shift_family(const DefSet& e_set, const Rat& e) {
  const GroundModel& model = e_set.model();
  if (!model.dense() || e_set.modulus() != 1 || !e_set.singletons().empty() || e_set.components().size() != 1)
    throw std::logic_error("shift-family: expected a single dense interval");
  const IntervalQ& iv = e_set.components()[0].interval;
  if (!iv.bounded()) throw std::logic_error("shift-family: expected a bounded interval");
  const Rat& l = iv.lo.value();
  const Rat& h = iv.hi.value();
  // C_g = (max(l, l-g), min(h, h-g)); for g >= 0 it is (l, h-g), else (l-g, h).
  // C_g strictly contains C_e exactly for g strictly between 0 and e,
  // as long as C_e is nonempty; otherwise every nonempty C_g does.
  DefSet out(model);
  if (abs(e) >= h - l) {
    out = DefSet::interval(model, Rat(l - h), Rat(h - l));
  } else if (e > 0) {
    out = DefSet::interval(model, 0, e);
  } else if (e < 0) {
    out = DefSet::interval(model, e, 0);
  } else {
    return DefSet::empty(model);  // C_0 = E is maximal
  }
  out = set_intersect(out, e_set);
  return set_difference(out, DefSet::finite(model, {Rat(0)}));
}

DefSet operand_set(const TraceOp& op, const std::vector<DefSet>& states, const GroundModel& model) {
  switch (op.operand) {
    case TraceOp::Operand::State: return states.at(op.inputs.at(1));
    case TraceOp::Operand::Coset: return DefSet::coset(model, op.modulus, op.arg);
    case TraceOp::Operand::Points: return DefSet::finite(model, op.points);
  }
  return DefSet::empty(model);
}

}  // namespace

nlohmann::json TraceOp::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_name(kind);
  j["inputs"] = inputs;
  if (kind == Kind::Intersect || kind == Kind::Difference) {
    if (operand == Operand::Coset) j["operand"] = {{"coset", {{"modulus", to_string(modulus)}, {"residue", to_string(arg)}}}};
    if (operand == Operand::Points) {
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& p : points) pts.push_back(to_string(p));
      j["operand"] = {{"points", pts}};
    }
  }
  if (kind == Kind::Translate || kind == Kind::DivideBy || kind == Kind::ShiftFamily) j["arg"] = to_string(arg);
  return j;
}

DefSet apply_trace_op(const TraceOp& op, const std::vector<DefSet>& states) {
  const DefSet& a = states.at(op.inputs.at(0));
  switch (op.kind) {
    case Kind::Intersect: return set_intersect(a, operand_set(op, states, a.model()));
    case Kind::Difference: return set_difference(a, operand_set(op, states, a.model()));
    case Kind::Complement: return set_complement(a);
    case Kind::Translate: return affine_op(AffineOp::translate(op.arg), a);
    case Kind::Reflect: return affine_op(AffineOp::reflect(), a);
    case Kind::DivideBy: return affine_op(AffineOp::divide_by(op.arg.get_num()), a);
    case Kind::ShiftFamily: return shift_family(a, op.arg);
  }
  throw std::logic_error("unknown trace op");
}

DefSet ExtractionTrace::replay() const {
  std::vector<DefSet> states{input};
  for (const auto& s : steps) states.push_back(apply_trace_op(s.op, states));
  return states.back();
}

bool ExtractionTrace::replays() const {
  std::vector<DefSet> states{input};
  for (const auto& s : steps) {
    DefSet next = apply_trace_op(s.op, states);
    if (!(next == s.after)) return false;
    states.push_back(std::move(next));
  }
  return true;
}

nlohmann::json ExtractionTrace::to_json() const {
  nlohmann::json j;
  j["input"] = input.to_json();
  j["steps"] = nlohmann::json::array();
  for (const auto& s : steps)
    j["steps"].push_back(
        {{"step_tag", s.tag}, {"justification", s.justification}, {"op", s.op.to_json()}, {"defset_after", s.after.to_json()}});
  return j;
}

nlohmann::json IntervalResult::to_json() const {
  return {{"b", b.str()}, {"interval", interval.to_json()}, {"trace", trace.to_json()}};
}

namespace {

// Builds the trace as a straight-line program over numbered states.
class Extractor {
 public:
  explicit Extractor(const DefSet& d) : trace_(d) { states_.push_back(d); }

  const DefSet& cur() const { return states_.back(); }
  std::size_t cur_index() const { return states_.size() - 1; }

  std::size_t emit(std::string tag, std::string why, TraceOp op) {
    DefSet after = apply_trace_op(op, states_);
    trace_.steps.push_back(TraceStep{std::move(tag), std::move(why), op, after});
    states_.push_back(std::move(after));
    return cur_index();
  }

  std::size_t unary(std::string tag, std::string why, Kind k, Rat arg = 0, std::optional<std::size_t> from = {}) {
    TraceOp op;
    op.kind = k;
    op.inputs = {from.value_or(cur_index())};
    op.arg = std::move(arg);
    return emit(std::move(tag), std::move(why), std::move(op));
  }

  std::size_t remove_points(std::string tag, std::string why) {
    TraceOp op;
    op.kind = Kind::Difference;
    op.inputs = {cur_index()};
    op.operand = TraceOp::Operand::Points;
    op.points = cur().singletons();
    return emit(std::move(tag), std::move(why), std::move(op));
  }

  IntervalResult run() {
    const DefSet d = states_[0];  // states_ grows, so no references into it
    const GroundModel model = d.model();
    GroupDefinability gd = is_group_definable(d);
    if (gd.definable) throw GroupDefinableInput("extract_interval: the set is definable in (G, +)");
    const Int m = d.modulus();
    const Int r = gd.witness_residue;

    if (m != 1) {
      TraceOp op;
      op.kind = Kind::Intersect;
      op.inputs = {cur_index()};
      op.operand = TraceOp::Operand::Coset;
      op.modulus = m;
      op.arg = Rat(r);
      emit("coset-restriction", "keep the least residue class whose fiber is neither finite nor cofinite", op);
    }
    if (r != 0) unary("translate", "move the fiber onto mG", Kind::Translate, Rat(-r));
    if (m != 1) unary("divide-by-m", "pass from a subset of mG to its quotient by m", Kind::DivideBy, Rat(m));
    if (!cur().singletons().empty()) remove_points("remove-points", "drop finitely many isolated points");

    if (!cur().bounded_below()) {
      unary("complement-swap", "the complement of a set unbounded below is bounded below", Kind::Complement);
      if (!cur().singletons().empty())
        remove_points("remove-points", "drop the finitely many points left over by the complement");
    }
    if (cur().modulus() != 1 || cur().components().empty() || !cur().singletons().empty())
      throw std::logic_error("extract_interval: expected a union of intervals");

    const IntervalQ j1 = cur().components().front().interval;  // leftmost, bounded below
    if (model.discrete()) return discrete_branch(j1);
    return dense_branch(j1);
  }

 private:
  IntervalResult discrete_branch(const IntervalQ& j1) {
    const GroundModel model = cur().model();
    // min J1 = lo + 1; move it to 1.
    unary("discrete-min", "translate the least element of the first interval to 1", Kind::Translate, -j1.lo.value());
    // Infinite intervals of Z are unbounded, so the first one is (0, inf) and
    // it must be all of the set once the set is bounded below.
    if (!(cur() == DefSet::interval(model, 0, ExtQRat::pos_inf())))
      throw std::logic_error("extract_interval: discrete set is not a single half-line");
    return finish(ExtQRat::pos_inf());
  }

  IntervalResult dense_branch(const IntervalQ& j1) {
    const GroundModel model = cur().model();
    const Rat& lo = j1.lo.value();
    ExtQRat mid = j1.hi.finite() ? ExtQRat(Rat((lo + j1.hi.value()) / 2)) : ExtQRat::pos_inf();
    auto c_opt = model.min_height_element(j1.lo, mid);
    if (!c_opt) throw std::logic_error("extract_interval: no element below the midpoint of the first interval");
    Rat c = *c_opt;
    Rat d = c - lo;

    std::size_t base = cur_index();
    std::size_t shifted = unary("dense-midpoint", "D - c", Kind::Translate, -c, base);
    unary("dense-midpoint", "-D", Kind::Reflect, 0, base);
    std::size_t mirrored = unary("dense-midpoint", "-D + c", Kind::Translate, c);
    TraceOp meet;
    meet.kind = Kind::Intersect;
    meet.inputs = {shifted, mirrored};
    emit("dense-midpoint", "E = (D - c) ∩ (-D + c) = (-d, d) with d = c - inf(J1)", meet);
    if (!(cur() == DefSet::interval(model, Rat(-d), d))) throw std::logic_error("extract_interval: E is not (-d, d)");

    auto e_opt = model.min_height_element(ExtQRat(0), ExtQRat(d));
    if (!e_opt) throw std::logic_error("extract_interval: (0, d) has no element");
    unary("final-intersection", "E2 = {g != 0 in E : C_g strictly contains C_e} = (0, e)", Kind::ShiftFamily, *e_opt);
    return finish(ExtQRat(*e_opt));
  }

  IntervalResult finish(ExtQRat b) { return IntervalResult{std::move(b), cur(), std::move(trace_)}; }

  ExtractionTrace trace_;
  std::vector<DefSet> states_;
};

}  // namespace

IntervalResult extract_interval(const DefSet& d) { return Extractor(d).run(); }

Formula OrderRelation::formula(const std::string& x1, const std::string& x2) const {
  Formula in = defset_formula(interval_, "x");
  return substitute(in, "x", LinearTerm::variable(x2) - LinearTerm::variable(x1));
}

OrderRelation order_relation(const IntervalResult& r) { return OrderRelation(r.interval); }

// ---------------------------------------------------------------------------
// Formula constructors

namespace {

std::set<std::string> all_vars(const Formula& f) {
  std::set<std::string> v = f.free_vars();
  auto b = f.bound_vars();
  v.insert(b.begin(), b.end());
  return v;
}

Formula at(const Formula& phi, const std::string& x, const LinearTerm& t) { return substitute(phi, x, t); }

void require_discrete(const GroundModel& model, const char* what) {
  if (!model.discrete()) throw std::invalid_argument(std::string(what) + ": needs a discrete model (it uses the constant 1)");
}

}  // namespace

Formula build_chi(const Formula& phi, const GroundModel& model, const std::string& x, const std::string& z,
                  const std::string& y) {
  require_discrete(model, "build_chi");
  if (phi.free_vars().count(y) || y == x || y == z)
    throw FormulaError("build_chi: '" + y + "' clashes with a variable of phi");
  using R = Formula::Rel;
  auto avoid = all_vars(phi);
  avoid.insert({x, y, z});
  std::string w = fresh_name("w", avoid);
  LinearTerm Y = LinearTerm::variable(y), W = LinearTerm::variable(w);
  Formula chi1 = Formula::conj_all({at(phi, x, LinearTerm(Rat(0))), at(phi, x, Y),
                                    Formula::negation(at(phi, x, LinearTerm(Rat(-1)))),
                                    Formula::negation(at(phi, x, Y.plus_constant(1))),
                                    Formula::negation(at(phi, x, Y.scaled(2)))});
  Formula w_nonzero = Formula::negation(Formula::atom(R::Eq, W, LinearTerm()));
  Formula w_not_y = Formula::negation(Formula::atom(R::Eq, W, Y));
  Formula chi2 = Formula::forall(
      w, Formula::implies(Formula::conj(w_nonzero, at(phi, x, W)), at(phi, x, W.plus_constant(-1))));
  Formula chi3 =
      Formula::forall(w, Formula::implies(Formula::conj(w_not_y, at(phi, x, W)), at(phi, x, W.plus_constant(1))));
  return Formula::conj_all({chi1, chi2, chi3});
}

Formula build_psi(const Formula& phi, const GroundModel& model, const std::string& x, const std::string& z) {
  require_discrete(model, "build_psi");
  auto avoid = all_vars(phi);
  avoid.insert({x, z});
  std::string y = fresh_name("y", avoid);
  Formula chi = build_chi(phi, model, x, z, y);
  return Formula::exists(y, Formula::exists(z, Formula::conj(chi, phi)));
}

Formula build_theta(const Formula& phi, const GroundModel& model, const std::string& x, const std::string& z) {
  using R = Formula::Rel;
  LinearTerm X = LinearTerm::variable(x), zero;
  if (model.discrete()) return Formula::forall(x, Formula::iff(phi, Formula::atom(R::Lt, zero, X)));
  auto avoid = all_vars(phi);
  avoid.insert({x, z});
  std::string y = fresh_name("y", avoid);
  LinearTerm Y = LinearTerm::variable(y);
  Formula inside = Formula::conj(Formula::atom(R::Lt, zero, X), Formula::atom(R::Lt, X, Y));
  return Formula::exists(y, Formula::conj(Formula::atom(R::Lt, zero, Y), Formula::forall(x, Formula::iff(phi, inside))));
}

// ---------------------------------------------------------------------------

nlohmann::json Classification::to_json() const {
  nlohmann::json j;
  j["set"] = set.to_json();
  if (verdict == Verdict::GroupDefinable) {
    j["verdict"] = "GroupDefinable";
    j["group_definable"] = group.to_json();
  } else {
    j["verdict"] = "OrderRecovered";
    j["order"] = order->to_json();
    j["relation"] = order_relation(*order).formula().str();
  }
  return j;
}

Classification classify(const Formula& f, const std::string& x, const std::map<std::string, Rat>& params,
                        const GroundModel& model) {
  Classification c{Classification::Verdict::GroupDefinable, formula_to_defset(f, x, params, model), {}, {}};
  c.group = is_group_definable(c.set);
  if (!c.group.definable) {
    c.verdict = Classification::Verdict::OrderRecovered;
    c.order = extract_interval(c.set);
  }
  return c;
}

}  // namespace oag
