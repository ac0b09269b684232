#include "oag/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace oag {

IntMatrix identity_matrix(std::size_t n) {
  IntMatrix m(n, std::vector<Int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  std::size_t n = a.size(), k = b.size(), p = b.empty() ? 0 : b[0].size();
  IntMatrix c(n, std::vector<Int>(p, 0));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != k) throw std::invalid_argument("multiply: shape mismatch");
    for (std::size_t l = 0; l < k; ++l)
      if (a[i][l] != 0)
        for (std::size_t j = 0; j < p; ++j) c[i][j] += a[i][l] * b[l][j];
  }
  return c;
}

// Bareiss fraction-free elimination.
Int determinant(const IntMatrix& a) {
  std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("determinant: square matrix required");
  if (n == 0) return 1;
  IntMatrix m = a;
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t s = k + 1;
      while (s < n && m[s][k] == 0) ++s;
      if (s == n) return 0;
      std::swap(m[k], m[s]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

// ---------------------------------------------------------------------------
// Smith normal form

std::vector<Int> SnfResult::diagonal() const {
  std::vector<Int> d;
  for (std::size_t i = 0; i < S.size() && i < (S.empty() ? 0 : S[0].size()); ++i) d.push_back(S[i][i]);
  return d;
}

namespace {

void check_shape(const IntMatrix& a, const char* who) {
  if (a.empty() || a[0].empty()) throw std::invalid_argument(std::string(who) + ": empty matrix");
  for (const auto& row : a)
    if (row.size() != a[0].size()) throw std::invalid_argument(std::string(who) + ": ragged matrix");
}

void add_row(IntMatrix& m, std::size_t dst, std::size_t src, const Int& k) {
  for (std::size_t j = 0; j < m[dst].size(); ++j) m[dst][j] += k * m[src][j];
}
void add_col(IntMatrix& m, std::size_t dst, std::size_t src, const Int& k) {
  for (auto& row : m) row[dst] += k * row[src];
}
void swap_cols(IntMatrix& m, std::size_t a, std::size_t b) {
  for (auto& row : m) std::swap(row[a], row[b]);
}

}  // namespace

SnfResult smith_normal_form(const IntMatrix& a) {
  check_shape(a, "smith_normal_form");
  std::size_t rows = a.size(), cols = a[0].size();
  SnfResult r{identity_matrix(rows), a, identity_matrix(cols)};
  IntMatrix& S = r.S;

  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    // Smallest nonzero entry of the trailing block becomes the pivot.
    auto bring_min = [&](bool whole_block) {
      std::size_t bi = rows, bj = cols;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j) {
          if (!whole_block && i != t && j != t) continue;
          if (S[i][j] != 0 && (bi == rows || abs(S[i][j]) < abs(S[bi][bj]))) bi = i, bj = j;
        }
      if (bi == rows) return false;
      std::swap(S[t], S[bi]);
      std::swap(r.U[t], r.U[bi]);
      swap_cols(S, t, bj);
      swap_cols(r.V, t, bj);
      return true;
    };
    if (!bring_min(true)) break;

    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (S[i][t] == 0) continue;
        Int q = S[i][t] / S[t][t];  // truncating
        add_row(S, i, t, -q);
        add_row(r.U, i, t, -q);
        if (S[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (S[t][j] == 0) continue;
        Int q = S[t][j] / S[t][t];
        add_col(S, j, t, -q);
        add_col(r.V, j, t, -q);
        if (S[t][j] != 0) clean = false;
      }
      if (!clean) {
        bring_min(false);
        continue;
      }
      // Pivot must divide the whole trailing block.
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (S[i][j] % S[t][t] != 0) {
            add_row(S, t, i, 1);
            add_row(r.U, t, i, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (S[t][t] < 0) {
      for (auto& x : S[t]) x = -x;
      for (auto& x : r.U[t]) x = -x;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Hermite normal form

IntMatrix hermite_normal_form(const IntMatrix& a) {
  if (a.empty()) return {};
  check_shape(a, "hermite_normal_form");
  IntMatrix h = a;
  std::size_t rows = h.size(), cols = h[0].size(), p = 0;
  for (std::size_t c = 0; c < cols && p < rows; ++c) {
    for (std::size_t i = p + 1; i < rows; ++i) {
      if (h[i][c] == 0) continue;
      // [s t; -b/g a/g] is unimodular and clears h[i][c].
      Int g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), h[p][c].get_mpz_t(), h[i][c].get_mpz_t());
      Int ag = h[p][c] / g, bg = h[i][c] / g;
      for (std::size_t j = 0; j < cols; ++j) {
        Int top = s * h[p][j] + t * h[i][j];
        Int bottom = -bg * h[p][j] + ag * h[i][j];
        h[p][j] = top;
        h[i][j] = bottom;
      }
    }
    if (h[p][c] == 0) continue;
    if (h[p][c] < 0)
      for (auto& x : h[p]) x = -x;
    for (std::size_t i = 0; i < p; ++i) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), h[i][c].get_mpz_t(), h[p][c].get_mpz_t());
      add_row(h, i, p, -q);
    }
    ++p;
  }
  h.resize(p);
  return h;
}

// ---------------------------------------------------------------------------
// Rational linear algebra

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(std::vector<RatVector>& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t p = 0;
  for (std::size_t c = 0; c < cols && p < m.size(); ++c) {
    std::size_t s = p;
    while (s < m.size() && m[s][c] == 0) ++s;
    if (s == m.size()) continue;
    std::swap(m[p], m[s]);
    Rat inv = 1 / m[p][c];
    for (auto& x : m[p]) x *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == p || m[i][c] == 0) continue;
      Rat k = m[i][c];
      for (std::size_t j = 0; j < cols; ++j) m[i][j] -= k * m[p][j];
    }
    pivots.push_back(c);
    ++p;
  }
  m.resize(p);
  return pivots;
}

// Basis of {w : v . w = 0 for all rows v}.
std::vector<RatVector> orthogonal_complement(std::vector<RatVector> rows, std::size_t dim) {
  auto pivots = rref(rows, dim);
  std::vector<RatVector> out;
  for (std::size_t f = 0; f < dim; ++f) {
    if (std::binary_search(pivots.begin(), pivots.end(), f)) continue;
    RatVector w(dim, Rat(0));
    w[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) w[pivots[i]] = -rows[i][f];
    out.push_back(std::move(w));
  }
  return out;
}

Int denominator_lcm(const std::vector<RatVector>& vs) {
  Int d = 1;
  for (const auto& v : vs)
    for (const auto& x : v) d = lcm(d, Int(x.get_den()));
  return d;
}

IntMatrix scaled_integral(const std::vector<RatVector>& vs, const Int& d) {
  IntMatrix m;
  for (const auto& v : vs) {
    std::vector<Int> row;
    for (const auto& x : v) row.push_back(Int(x * d));
    m.push_back(std::move(row));
  }
  return m;
}

RatVector to_rat(const std::vector<Int>& row, const Int& d) {
  RatVector v;
  for (const auto& x : row) {
    Rat q(x, d);
    q.canonicalize();
    v.push_back(q);
  }
  return v;
}

}  // namespace

std::size_t rank(const std::vector<RatVector>& vectors) {
  if (vectors.empty()) return 0;
  std::vector<RatVector> m = vectors;
  return rref(m, vectors[0].size()).size();
}

bool in_span(const std::vector<RatVector>& vectors, const RatVector& v) {
  std::vector<RatVector> more = vectors;
  more.push_back(v);
  return rank(more) == rank(vectors);
}

// ---------------------------------------------------------------------------
// LatticeGroup

LatticeGroup::LatticeGroup(std::size_t dim) : dim_(dim) {}

LatticeGroup::LatticeGroup(std::size_t dim, std::vector<RatVector> generators) : dim_(dim), gens_(std::move(generators)) {
  for (const auto& g : gens_)
    if (g.size() != dim_) throw std::invalid_argument("LatticeGroup: generator of the wrong length");
  // The least d with d*G integral is the lcm of the generator denominators,
  // so the HNF of d*G is a canonical description.
  denom_ = denominator_lcm(gens_);
  if (gens_.empty()) return;
  for (const auto& row : hermite_normal_form(scaled_integral(gens_, denom_))) basis_.push_back(to_rat(row, denom_));
}

LatticeGroup LatticeGroup::standard(std::size_t dim) {
  std::vector<RatVector> gens;
  for (std::size_t i = 0; i < dim; ++i) {
    RatVector e(dim, Rat(0));
    e[i] = 1;
    gens.push_back(std::move(e));
  }
  return LatticeGroup(dim, std::move(gens));
}

LatticeGroup LatticeGroup::from_json(const nlohmann::json& j, std::size_t dim_if_empty) {
  const nlohmann::json& gens = j.is_object() ? j.at("generators") : j;
  if (j.is_object() && j.contains("dim")) dim_if_empty = j.at("dim").get<std::size_t>();
  if (!gens.is_array()) throw std::invalid_argument("generators must be an array of vectors");
  std::vector<RatVector> vs;
  for (const auto& g : gens) {
    if (!g.is_array()) throw std::invalid_argument("each generator must be an array");
    RatVector v;
    for (const auto& x : g) v.push_back(x.is_string() ? parse_rat(x.get<std::string>()) : Rat(x.get<long>()));
    vs.push_back(std::move(v));
  }
  std::size_t dim = vs.empty() ? dim_if_empty : vs[0].size();
  return LatticeGroup(dim, std::move(vs));
}

bool LatticeGroup::contains(const RatVector& v) const {
  if (v.size() != dim_) return false;
  std::vector<Int> w;
  for (const auto& x : v) {
    Rat s = x * denom_;
    if (!is_integer(s)) return false;
    w.push_back(Int(s));
  }
  // Echelon basis: peel off one pivot at a time.
  IntMatrix h = scaled_integral(basis_, denom_);
  for (const auto& row : h) {
    std::size_t p = 0;
    while (row[p] == 0) ++p;
    for (std::size_t j = 0; j < p; ++j)
      if (w[j] != 0) return false;
    if (w[p] % row[p] != 0) return false;
    Int c = w[p] / row[p];
    for (std::size_t j = 0; j < dim_; ++j) w[j] -= c * row[j];
  }
  return std::all_of(w.begin(), w.end(), [](const Int& x) { return x == 0; });
}

bool LatticeGroup::contains(const LatticeGroup& other) const {
  return std::all_of(other.basis_.begin(), other.basis_.end(), [&](const RatVector& v) { return contains(v); });
}

nlohmann::json LatticeGroup::to_json() const {
  nlohmann::json b = nlohmann::json::array();
  for (const auto& v : basis_) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& x : v) row.push_back(to_string(x));
    b.push_back(row);
  }
  return {{"dim", dim_}, {"basis", b}};
}

std::size_t rank(const LatticeGroup& g) { return rank(g.generators()); }

Int quotient_card(const LatticeGroup& g, const Int& m) {
  if (m < 1) throw std::invalid_argument("quotient_card: m must be >= 1");
  if (g.basis().empty()) return 1;
  // G is free on its basis; the SNF counts the invariant factors.
  SnfResult snf = smith_normal_form(scaled_integral(g.basis(), denominator_lcm(g.basis())));
  Int card = 1;
  for (const auto& s : snf.diagonal())
    if (s != 0) card *= m;
  return card;
}

std::vector<QuotientEntry> has_small_quotients(const LatticeGroup& g, const Int& up_to) {
  std::vector<QuotientEntry> out;
  for (Int m = 1; m <= up_to; ++m) {
    Int bound = 1;
    for (std::size_t i = 0; i < g.dim(); ++i) bound *= m;
    Int card = quotient_card(g, m);
    out.push_back({m, card, bound, card <= bound});
  }
  return out;
}

nlohmann::json to_json(const std::vector<QuotientEntry>& table) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : table)
    j.push_back({{"m", to_string(e.m)}, {"card", to_string(e.card)}, {"bound", to_string(e.bound)}, {"within_bound", e.within_bound}});
  return j;
}

LatticeGroup acl_closure(const LatticeGroup& g, const std::vector<RatVector>& a, Mode mode) {
  for (const auto& v : a)
    if (!g.contains(v)) throw std::invalid_argument("acl_closure: A is not contained in G");
  if (mode == Mode::Discrete) {
    if (g.dim() != 1 || rank(g) != 1 || !g.contains(RatVector{Rat(1)}))
      throw std::invalid_argument("acl_closure: discrete mode needs a rank-1 group in Q containing 1");
    return g;  // span(A, 1) is all of Q
  }
  std::vector<RatVector> w = orthogonal_complement(a, g.dim());
  if (w.empty()) return g;
  const auto& basis = g.basis();
  if (basis.empty() || rank(a) == 0) return LatticeGroup(g.dim());
  // c * basis lies in span(A) iff c * (basis * W) = 0: an integer left kernel.
  IntMatrix m(basis.size(), std::vector<Int>(w.size(), 0));
  for (std::size_t j = 0; j < w.size(); ++j) {
    std::vector<Rat> col(basis.size(), Rat(0));
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t l = 0; l < g.dim(); ++l) col[i] += basis[i][l] * w[j][l];
    Int d = 1;
    for (const auto& x : col) d = lcm(d, Int(x.get_den()));
    for (std::size_t i = 0; i < basis.size(); ++i) m[i][j] = Int(col[i] * d);
  }
  SnfResult snf = smith_normal_form(m);
  std::size_t rk = 0;
  for (const auto& s : snf.diagonal()) rk += s != 0;
  std::vector<RatVector> gens;
  for (std::size_t row = rk; row < basis.size(); ++row) {
    RatVector v(g.dim(), Rat(0));
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t l = 0; l < g.dim(); ++l) v[l] += snf.U[row][i] * basis[i][l];
    gens.push_back(std::move(v));
  }
  return LatticeGroup(g.dim(), std::move(gens));
}

}  // namespace oag
