#include "oag/defset.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace oag {

RawPiece RawPiece::singleton(Rat g) {
  RawPiece p;
  p.is_point = true;
  p.point = std::move(g);
  return p;
}

RawPiece RawPiece::piece(IntervalQ iv, Rat residue, Int modulus) {
  RawPiece p;
  p.interval = std::move(iv);
  p.residue = std::move(residue);
  p.modulus = std::move(modulus);
  return p;
}

namespace {

// A subset of one coset fiber, described on the divisible hull: sorted
// breakpoints, a flag per breakpoint and a flag per open cell between them.
// cell[i] covers (pts[i-1], pts[i]) with the obvious infinite ends.
struct Fiber {
  std::vector<Rat> pts;
  std::vector<char> at;
  std::vector<char> cell{0};

  bool query(const Rat& q) const {
    auto it = std::lower_bound(pts.begin(), pts.end(), q);
    std::size_t i = static_cast<std::size_t>(it - pts.begin());
    if (it != pts.end() && *it == q) return at[i];
    return cell[i];
  }

  ExtQRat cell_lo(std::size_t i) const { return i == 0 ? ExtQRat::neg_inf() : ExtQRat(pts[i - 1]); }
  ExtQRat cell_hi(std::size_t i) const { return i == pts.size() ? ExtQRat::pos_inf() : ExtQRat(pts[i]); }
};

Rat cell_sample(const std::vector<Rat>& pts, std::size_t i) {
  if (pts.empty()) return 0;
  if (i == 0) return pts.front() - 1;
  if (i == pts.size()) return pts.back() + 1;
  return (pts[i - 1] + pts[i]) / 2;
}

void sort_unique(std::vector<Rat>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

Fiber build_fiber(const std::vector<IntervalQ>& ivs, const std::vector<Rat>& points) {
  Fiber f;
  for (const auto& iv : ivs) {
    if (iv.lo.finite()) f.pts.push_back(iv.lo.value());
    if (iv.hi.finite()) f.pts.push_back(iv.hi.value());
  }
  f.pts.insert(f.pts.end(), points.begin(), points.end());
  sort_unique(f.pts);
  auto in_some = [&](const Rat& q) {
    return std::any_of(ivs.begin(), ivs.end(), [&](const IntervalQ& iv) { return iv.contains(q); });
  };
  f.at.resize(f.pts.size());
  f.cell.resize(f.pts.size() + 1);
  for (std::size_t i = 0; i < f.pts.size(); ++i)
    f.at[i] = in_some(f.pts[i]) || std::binary_search(points.begin(), points.end(), f.pts[i]);
  for (std::size_t i = 0; i <= f.pts.size(); ++i) f.cell[i] = in_some(cell_sample(f.pts, i));
  return f;
}

Fiber combine(const Fiber& a, const Fiber& b, const std::function<bool(bool, bool)>& op) {
  Fiber f;
  f.pts = a.pts;
  f.pts.insert(f.pts.end(), b.pts.begin(), b.pts.end());
  sort_unique(f.pts);
  f.at.resize(f.pts.size());
  f.cell.resize(f.pts.size() + 1);
  for (std::size_t i = 0; i < f.pts.size(); ++i) f.at[i] = op(a.query(f.pts[i]), b.query(f.pts[i]));
  for (std::size_t i = 0; i <= f.pts.size(); ++i) {
    Rat s = cell_sample(f.pts, i);
    f.cell[i] = op(a.query(s), b.query(s));
  }
  return f;
}

// Greatest coset element <= x, least coset element >= x (discrete).
Int coset_floor(const Rat& x, const Int& m, const Int& r) {
  Int l = floor_of(x);
  return l - mod_floor(Int(l - r), m);
}
Int coset_ceil(const Rat& x, const Int& m, const Int& r) {
  Int h = ceil_of(x);
  return h + mod_floor(Int(r - h), m);
}

}  // namespace

// Turns fibers back into canonical components and singletons.
class DefSetBuilder {
 public:
  DefSetBuilder(const GroundModel& model, Int m) : set_(model) { set_.modulus_ = std::move(m); }

  void add_fiber(const Fiber& f, const Int& r) {
    const GroundModel& model = set_.model_;
    const Int& m = set_.modulus_;
    std::size_t n = f.pts.size();
    auto point_vacuous = [&](std::size_t i) {
      return !model.contains(f.pts[i]) || model.residue(f.pts[i], m) != r;
    };
    auto cell_vacuous = [&](std::size_t i) {
      if (model.dense()) return false;
      return !model.coset_witness(f.cell_lo(i), f.cell_hi(i), m, Rat(r)).has_value();
    };
    // Items in order: cell 0, point 0, cell 1, ..., point n-1, cell n.
    // item 2i is cell i, item 2i+1 is point i.
    std::size_t items = 2 * n + 1;
    auto item_true = [&](std::size_t k) { return k % 2 == 0 ? f.cell[k / 2] != 0 : f.at[k / 2] != 0; };
    auto item_vacuous = [&](std::size_t k) { return k % 2 == 0 ? cell_vacuous(k / 2) : point_vacuous(k / 2); };

    std::size_t k = 0;
    while (k < items) {
      if (!item_true(k) && !item_vacuous(k)) {
        ++k;
        continue;
      }
      std::size_t start = k;
      while (k < items && (item_true(k) || item_vacuous(k))) ++k;
      std::size_t end = k;  // [start, end)
      // Span of genuine true cells in the run.
      std::optional<std::size_t> first, last;
      for (std::size_t j = start; j < end; j += 1) {
        if (j % 2 == 0 && item_true(j) && !cell_vacuous(j / 2)) {
          if (!first) first = j;
          last = j;
        }
      }
      ExtQRat lo, hi;
      if (first) {
        lo = f.cell_lo(*first / 2);
        hi = f.cell_hi(*last / 2);
        // Discrete: true points at the edges of the run widen the component,
        // so [5, inf) comes out as (4, inf) rather than {5} plus (5, inf).
        if (model.discrete()) {
          for (std::size_t j = start; j < *first; ++j)
            if (j % 2 == 1 && item_true(j) && !point_vacuous(j / 2)) {
              lo = ExtQRat(Rat(f.pts[j / 2] - Rat(1, 2)));
              first = j;
              break;
            }
          for (std::size_t j = end; j-- > *last + 1;)
            if (j % 2 == 1 && item_true(j) && !point_vacuous(j / 2)) {
              hi = ExtQRat(Rat(f.pts[j / 2] + Rat(1, 2)));
              last = j;
              break;
            }
        }
      }
      for (std::size_t j = start; j < end; ++j) {
        if (j % 2 == 1 && item_true(j) && !point_vacuous(j / 2) && !(first && *first <= j && j <= *last))
          set_.singletons_.push_back(f.pts[j / 2]);
      }
      if (first) add_component(IntervalQ{lo, hi}, r);
    }
  }

  DefSet finish() {
    sort_unique(set_.singletons_);
    std::sort(set_.components_.begin(), set_.components_.end(), [](const Component& a, const Component& b) {
      if (a.residue != b.residue) return a.residue < b.residue;
      return a.interval.lo < b.interval.lo;
    });
    return std::move(set_);
  }

 private:
  void add_component(IntervalQ iv, const Int& r) {
    const Int& m = set_.modulus_;
    if (set_.model_.discrete()) {
      if (iv.bounded()) {
        // Finite in standard Z: demote to singletons.
        for (Int g = coset_ceil(Rat(floor_of(iv.lo.value()) + 1), m, r); ExtQRat(g) < iv.hi; g += m)
          set_.singletons_.push_back(Rat(g));
        return;
      }
      if (iv.lo.finite()) iv.lo = ExtQRat(coset_floor(iv.lo.value(), m, r));
      if (iv.hi.finite()) iv.hi = ExtQRat(coset_ceil(iv.hi.value(), m, r));
    }
    set_.components_.push_back(Component{std::move(iv), r});
  }

  DefSet set_;
};

namespace {

Fiber fiber_of(const DefSet& d, const Int& m, const Int& r) {
  std::vector<IntervalQ> ivs;
  Int rr = mod_floor(r, d.modulus());
  for (const auto& c : d.components())
    if (c.residue == rr) ivs.push_back(c.interval);
  std::vector<Rat> points;
  for (const auto& s : d.singletons())
    if (d.model().residue(s, m) == r) points.push_back(s);
  return build_fiber(ivs, points);
}

}  // namespace

DefSet::DefSet(GroundModel model) : model_(std::move(model)) {}

DefSet DefSet::normalize(const GroundModel& model, const std::vector<RawPiece>& pieces) {
  Int m = 1;
  for (const auto& p : pieces) {
    if (p.is_point) {
      if (!model.contains(p.point))
        throw std::invalid_argument(to_string(p.point) + " is not an element of " + model.spec());
      continue;
    }
    if (p.modulus < 1) throw std::invalid_argument("local modulus must be >= 1");
    if (!model.contains(p.residue))
      throw std::invalid_argument("residue " + to_string(p.residue) + " is not an element of " + model.spec());
    m = lcm(m, model.effective_modulus(p.modulus));
  }
  DefSetBuilder builder(model, m);
  for (Int r = 0; r < m; ++r) {
    std::vector<IntervalQ> ivs;
    std::vector<Rat> points;
    for (const auto& p : pieces) {
      if (p.is_point) {
        if (model.residue(p.point, m) == r) points.push_back(p.point);
      } else if (!(p.interval.lo < p.interval.hi)) {
        continue;
      } else if (model.residue(p.residue, p.modulus) == mod_floor(r, model.effective_modulus(p.modulus))) {
        ivs.push_back(p.interval);
      }
    }
    sort_unique(points);
    builder.add_fiber(build_fiber(ivs, points), r);
  }
  return builder.finish();
}

DefSet DefSet::full(const GroundModel& model) { return normalize(model, {RawPiece::piece(IntervalQ{})}); }

DefSet DefSet::coset(const GroundModel& model, const Int& m, const Rat& g) {
  return normalize(model, {RawPiece::piece(IntervalQ{}, g, m)});
}

DefSet DefSet::interval(const GroundModel& model, const ExtQRat& lo, const ExtQRat& hi) {
  return normalize(model, {RawPiece::piece(IntervalQ{lo, hi})});
}

DefSet DefSet::finite(const GroundModel& model, const std::vector<Rat>& points) {
  std::vector<RawPiece> pieces;
  for (const auto& p : points) pieces.push_back(RawPiece::singleton(p));
  return normalize(model, pieces);
}

bool DefSet::member(const Rat& g) const {
  if (!model_.contains(g)) return false;
  if (std::binary_search(singletons_.begin(), singletons_.end(), g)) return true;
  Int r = model_.residue(g, modulus_);
  for (const auto& c : components_)
    if (c.residue == r && c.interval.contains(g)) return true;
  return false;
}

bool DefSet::bounded_below() const {
  return std::none_of(components_.begin(), components_.end(),
                      [](const Component& c) { return c.interval.lo.is_neg_inf(); });
}

bool DefSet::bounded_above() const {
  return std::none_of(components_.begin(), components_.end(),
                      [](const Component& c) { return c.interval.hi.is_pos_inf(); });
}

bool DefSet::same_set(const DefSet& other) const {
  if (!(model_ == other.model_)) return false;
  return boolean_op(BoolOp::Difference, *this, &other).is_empty() &&
         boolean_op(BoolOp::Difference, other, this).is_empty();
}

bool operator==(const DefSet& a, const DefSet& b) {
  return a.model_ == b.model_ && a.modulus_ == b.modulus_ && a.singletons_ == b.singletons_ &&
         a.components_ == b.components_;
}

nlohmann::json DefSet::to_json() const {
  nlohmann::json j;
  j["mode"] = model_.spec();
  j["modulus"] = to_string(modulus_);
  j["singletons"] = nlohmann::json::array();
  for (const auto& s : singletons_) j["singletons"].push_back(to_string(s));
  j["components"] = nlohmann::json::array();
  for (const auto& c : components_)
    j["components"].push_back({{"lo", c.interval.lo.str()}, {"hi", c.interval.hi.str()}, {"residue", to_string(c.residue)}});
  return j;
}

DefSet DefSet::from_json(const nlohmann::json& j) {
  GroundModel model = GroundModel::parse(j.at("mode").get<std::string>());
  Int m(j.at("modulus").get<std::string>());
  // An empty piece keeps the declared modulus even without components.
  std::vector<RawPiece> pieces{RawPiece::piece({ExtQRat(0), ExtQRat(0)}, 0, m)};
  for (const auto& s : j.value("singletons", nlohmann::json::array()))
    pieces.push_back(RawPiece::singleton(parse_rat(s.get<std::string>())));
  for (const auto& c : j.value("components", nlohmann::json::array())) {
    IntervalQ iv{ExtQRat::parse(c.at("lo").get<std::string>()), ExtQRat::parse(c.at("hi").get<std::string>())};
    pieces.push_back(RawPiece::piece(iv, parse_rat(c.at("residue").get<std::string>()), m));
  }
  return normalize(model, pieces);
}

DefSet boolean_op(BoolOp op, const DefSet& lhs, const DefSet* rhs) {
  if (op != BoolOp::Complement) {
    if (!rhs) throw std::invalid_argument("boolean_op: binary operation needs two operands");
    if (!(lhs.model() == rhs->model())) throw std::invalid_argument("boolean_op: operands over different models");
  }
  DefSet empty_rhs = DefSet::empty(lhs.model());
  const DefSet& b = op == BoolOp::Complement ? empty_rhs : *rhs;
  Int m = lcm(lhs.modulus(), b.modulus());
  std::function<bool(bool, bool)> f;
  switch (op) {
    case BoolOp::Union: f = [](bool x, bool y) { return x || y; }; break;
    case BoolOp::Intersect: f = [](bool x, bool y) { return x && y; }; break;
    case BoolOp::Complement: f = [](bool x, bool) { return !x; }; break;
    case BoolOp::Difference: f = [](bool x, bool y) { return x && !y; }; break;
  }
  DefSetBuilder builder(lhs.model(), m);
  for (Int r = 0; r < m; ++r) builder.add_fiber(combine(fiber_of(lhs, m, r), fiber_of(b, m, r), f), r);
  return builder.finish();
}

DefSet set_union(const DefSet& a, const DefSet& b) { return boolean_op(BoolOp::Union, a, &b); }
DefSet set_intersect(const DefSet& a, const DefSet& b) { return boolean_op(BoolOp::Intersect, a, &b); }
DefSet set_difference(const DefSet& a, const DefSet& b) { return boolean_op(BoolOp::Difference, a, &b); }
DefSet set_complement(const DefSet& a) { return boolean_op(BoolOp::Complement, a); }

DefSet affine_op(const AffineOp& op, const DefSet& d) {
  const GroundModel& model = d.model();
  const Int& m = d.modulus();
  std::vector<RawPiece> out;
  switch (op.kind) {
    case AffineOp::Kind::Translate: {
      if (!model.contains(op.arg)) throw std::invalid_argument("translation by a non-element");
      for (const auto& s : d.singletons()) out.push_back(RawPiece::singleton(s + op.arg));
      for (const auto& c : d.components())
        out.push_back(RawPiece::piece({c.interval.lo + op.arg, c.interval.hi + op.arg}, c.residue + op.arg, m));
      break;
    }
    case AffineOp::Kind::Reflect: {
      for (const auto& s : d.singletons()) out.push_back(RawPiece::singleton(-s));
      for (const auto& c : d.components())
        out.push_back(RawPiece::piece({-c.interval.hi, -c.interval.lo}, Rat(-c.residue), m));
      break;
    }
    case AffineOp::Kind::DivideBy: {
      if (!is_integer(op.arg) || op.arg < 1) throw std::invalid_argument("DivideBy needs n >= 1");
      Int n = op.arg.get_num();
      for (const auto& s : d.singletons()) {
        Rat q = s / n;
        if (model.contains(q)) out.push_back(RawPiece::singleton(q));
      }
      // n*s = r (mod m) has solutions iff gcd(n, m) | r; they form one class mod m/g.
      Int nm = mod_floor(n, m);
      Int g = gcd(nm, m);
      Int mg = m / g;
      for (const auto& c : d.components()) {
        if (c.residue % g != 0) continue;
        Int s0 = mg == 1 ? Int(0) : mod_floor(Int((c.residue / g) * mod_inverse(Int(nm / g), mg)), mg);
        out.push_back(RawPiece::piece({c.interval.lo.divided(n), c.interval.hi.divided(n)}, Rat(s0), mg));
      }
      break;
    }
    case AffineOp::Kind::ScaleBy: {
      if (!is_integer(op.arg) || op.arg < 1) throw std::invalid_argument("ScaleBy needs n >= 1");
      Int n = op.arg.get_num();
      for (const auto& s : d.singletons()) out.push_back(RawPiece::singleton(s * n));
      for (const auto& c : d.components())
        out.push_back(RawPiece::piece({c.interval.lo.scaled(n), c.interval.hi.scaled(n)}, Rat(c.residue * n),
                                      Int(m * n)));
      break;
    }
  }
  return DefSet::normalize(model, out);
}

nlohmann::json GroupDefinability::to_json() const {
  nlohmann::json j;
  j["definable"] = definable;
  if (definable) {
    j["period"] = to_string(period);
    j["core_residues"] = nlohmann::json::array();
    for (const auto& r : core_residues) j["core_residues"].push_back(to_string(r));
    j["extra_points"] = nlohmann::json::array();
    for (const auto& p : extra_points) j["extra_points"].push_back(to_string(p));
    j["missing_points"] = nlohmann::json::array();
    for (const auto& p : missing_points) j["missing_points"].push_back(to_string(p));
  } else {
    j["witness_residue"] = to_string(witness_residue);
    j["witness_end"] = witness_end == End::PlusInf ? "inf" : witness_end == End::MinusInf ? "-inf" : "none";
    j["witness_bound"] = witness_bound ? nlohmann::json(to_string(*witness_bound)) : nlohmann::json(nullptr);
  }
  return j;
}

GroupDefinability is_group_definable(const DefSet& d) {
  const GroundModel& model = d.model();
  const Int& m = d.modulus();
  GroupDefinability v;
  v.period = m;
  std::vector<Rat> extra;
  for (Int r = 0; r < m; ++r) {
    std::vector<const Component*> comps;
    for (const auto& c : d.components())
      if (c.residue == r) comps.push_back(&c);
    if (comps.empty()) continue;  // finite fiber
    bool chain = comps.front()->interval.lo.is_neg_inf() && comps.back()->interval.hi.is_pos_inf();
    if (chain && model.discrete()) chain = comps.size() <= 2;
    if (chain && model.dense())
      for (std::size_t i = 0; i + 1 < comps.size(); ++i)
        if (comps[i]->interval.hi != comps[i + 1]->interval.lo) chain = false;
    if (!chain) {
      v.definable = false;
      v.witness_residue = r;
      bool below = comps.front()->interval.lo.is_neg_inf();
      bool above = comps.back()->interval.hi.is_pos_inf();
      v.witness_end = below == above ? GroupDefinability::End::None
                      : above        ? GroupDefinability::End::PlusInf
                                     : GroupDefinability::End::MinusInf;
      for (const auto* c : comps) {
        if (c->interval.lo.finite()) {
          v.witness_bound = c->interval.lo.value();
          break;
        }
        if (c->interval.hi.finite()) {
          v.witness_bound = c->interval.hi.value();
          break;
        }
      }
      return v;
    }
    v.core_residues.push_back(r);
    // Cofinite fiber: the gaps are finite.
    if (model.discrete() && comps.size() == 2) {
      Int lo = comps[0]->interval.hi.value().get_num();
      Int hi = comps[1]->interval.lo.value().get_num();
      for (Int g = lo; g <= hi; g += m)
        if (!std::binary_search(d.singletons().begin(), d.singletons().end(), Rat(g)))
          v.missing_points.push_back(Rat(g));
    } else if (model.dense()) {
      for (std::size_t i = 0; i + 1 < comps.size(); ++i) {
        const Rat& g = comps[i]->interval.hi.value();
        if (!std::binary_search(d.singletons().begin(), d.singletons().end(), g)) v.missing_points.push_back(g);
      }
    }
  }
  v.definable = true;
  for (const auto& s : d.singletons()) {
    Int r = model.residue(s, m);
    if (!std::binary_search(v.core_residues.begin(), v.core_residues.end(), r)) v.extra_points.push_back(s);
  }
  std::sort(v.missing_points.begin(), v.missing_points.end());
  return v;
}

}  // namespace oag
