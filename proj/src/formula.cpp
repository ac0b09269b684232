#include "oag/formula.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace oag {

// ---------------------------------------------------------------------------
// LinearTerm

LinearTerm LinearTerm::variable(const std::string& name, const Int& coeff) {
  LinearTerm t;
  if (coeff != 0) t.coeffs_.emplace(name, coeff);
  return t;
}

Int LinearTerm::coeff(const std::string& var) const {
  auto it = coeffs_.find(var);
  return it == coeffs_.end() ? Int(0) : it->second;
}

LinearTerm LinearTerm::operator+(const LinearTerm& o) const {
  LinearTerm r = *this;
  for (const auto& [v, c] : o.coeffs_) {
    Int s = r.coeff(v) + c;
    if (s == 0)
      r.coeffs_.erase(v);
    else
      r.coeffs_[v] = s;
  }
  r.constant_ += o.constant_;
  return r;
}

LinearTerm LinearTerm::operator-() const { return scaled(-1); }

LinearTerm LinearTerm::operator-(const LinearTerm& o) const { return *this + (-o); }

LinearTerm LinearTerm::scaled(const Int& k) const {
  LinearTerm r;
  if (k == 0) return r;
  for (const auto& [v, c] : coeffs_) r.coeffs_.emplace(v, c * k);
  r.constant_ = constant_ * k;
  return r;
}

LinearTerm LinearTerm::plus_constant(const Rat& c) const {
  LinearTerm r = *this;
  r.constant_ += c;
  return r;
}

LinearTerm LinearTerm::without(const std::string& var) const {
  LinearTerm r = *this;
  r.coeffs_.erase(var);
  return r;
}

LinearTerm LinearTerm::substitute(const std::string& var, const LinearTerm& value) const {
  auto it = coeffs_.find(var);
  if (it == coeffs_.end()) return *this;
  return without(var) + value.scaled(it->second);
}

Rat LinearTerm::evaluate(const std::map<std::string, Rat>& env) const {
  Rat r = constant_;
  for (const auto& [v, c] : coeffs_) {
    auto it = env.find(v);
    if (it == env.end()) throw FormulaError("unassigned variable '" + v + "'");
    r += c * it->second;
  }
  return r;
}

bool operator<(const LinearTerm& a, const LinearTerm& b) {
  if (a.coeffs_ != b.coeffs_) return a.coeffs_ < b.coeffs_;
  return a.constant_ < b.constant_;
}

std::string LinearTerm::str() const {
  std::ostringstream os;
  bool first = true;
  auto emit = [&](bool negative, const std::string& body) {
    if (first)
      os << (negative ? "-" : "") << body;
    else
      os << (negative ? " - " : " + ") << body;
    first = false;
  };
  for (const auto& [v, c] : coeffs_) {
    Int a = abs_of(c);
    emit(c < 0, a == 1 ? v : a.get_str() + "*" + v);
  }
  if (constant_ != 0 || first) {
    Rat a = abs(constant_);
    emit(constant_ < 0, to_string(a));
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Formula nodes

struct Formula::Node {
  Kind kind;
  Rel rel = Rel::Eq;
  Int modulus;
  LinearTerm lhs, rhs;
  std::string var;
  std::vector<Formula> kids;
};

std::shared_ptr<Formula::Node> Formula::new_node(Kind k) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  return n;
}

Formula Formula::truth() {
  static const Formula t(new_node(Kind::True));
  return t;
}

Formula Formula::falsity() {
  static const Formula f(new_node(Kind::False));
  return f;
}

Formula Formula::atom(Rel rel, LinearTerm lhs, LinearTerm rhs, Int modulus) {
  if (rel == Rel::Cong && modulus < 2)
    throw FormulaError("congruence modulus must be at least 2, got " + modulus.get_str());
  auto n = new_node(Kind::Atom);
  n->rel = rel;
  n->modulus = rel == Rel::Cong ? modulus : Int(0);
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Formula(n);
}

Formula Formula::negation(Formula f) {
  auto n = new_node(Kind::Not);
  n->kids = {std::move(f)};
  return Formula(n);
}


Formula Formula::conj(Formula a, Formula b) { return make_binary(Kind::And, std::move(a), std::move(b)); }
Formula Formula::disj(Formula a, Formula b) { return make_binary(Kind::Or, std::move(a), std::move(b)); }
Formula Formula::implies(Formula a, Formula b) { return make_binary(Kind::Implies, std::move(a), std::move(b)); }
Formula Formula::iff(Formula a, Formula b) { return make_binary(Kind::Iff, std::move(a), std::move(b)); }

Formula Formula::exists(const std::string& var, Formula body) {
  auto n = new_node(Kind::Exists);
  n->var = var;
  n->kids = {std::move(body)};
  return Formula(n);
}

Formula Formula::forall(const std::string& var, Formula body) {
  auto n = new_node(Kind::Forall);
  n->var = var;
  n->kids = {std::move(body)};
  return Formula(n);
}

Formula Formula::conj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return truth();
  Formula r = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) r = conj(r, fs[i]);
  return r;
}

Formula Formula::disj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return falsity();
  Formula r = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) r = disj(r, fs[i]);
  return r;
}

Formula Formula::make_binary(Kind k, Formula a, Formula b) {
  auto n = new_node(k);
  n->kids = {std::move(a), std::move(b)};
  return Formula(n);
}

Formula::Kind Formula::kind() const { return node_->kind; }
Formula::Rel Formula::rel() const { return node_->rel; }
const Int& Formula::modulus() const { return node_->modulus; }
const LinearTerm& Formula::lhs() const { return node_->lhs; }
const LinearTerm& Formula::rhs() const { return node_->rhs; }
const std::string& Formula::var() const { return node_->var; }
const Formula& Formula::left() const { return node_->kids.at(0); }
const Formula& Formula::right() const { return node_->kids.at(1); }

bool Formula::is_quantifier() const { return kind() == Kind::Exists || kind() == Kind::Forall; }

bool Formula::is_binary() const {
  switch (kind()) {
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Iff: return true;
    default: return false;
  }
}

namespace {

void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return;
    case Formula::Kind::Atom:
      for (const auto* t : {&f.lhs(), &f.rhs()})
        for (const auto& [v, c] : t->coeffs())
          if (!bound.count(v)) out.insert(v);
      return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      bool fresh = bound.insert(f.var()).second;
      collect_free(f.left(), bound, out);
      if (fresh) bound.erase(f.var());
      return;
    }
    case Formula::Kind::Not: collect_free(f.left(), bound, out); return;
    default:
      collect_free(f.left(), bound, out);
      collect_free(f.right(), bound, out);
  }
}

void collect_bound(const Formula& f, std::set<std::string>& out) {
  if (f.is_quantifier()) out.insert(f.var());
  if (f.kind() == Formula::Kind::Not || f.is_quantifier()) collect_bound(f.left(), out);
  if (f.is_binary()) {
    collect_bound(f.left(), out);
    collect_bound(f.right(), out);
  }
}

}  // namespace

std::set<std::string> Formula::free_vars() const {
  std::set<std::string> bound, out;
  collect_free(*this, bound, out);
  return out;
}

std::set<std::string> Formula::bound_vars() const {
  std::set<std::string> out;
  collect_bound(*this, out);
  return out;
}

bool Formula::quantifier_free() const { return quantifier_depth() == 0; }

int Formula::quantifier_depth() const {
  switch (kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom: return 0;
    case Kind::Not: return left().quantifier_depth();
    case Kind::Exists:
    case Kind::Forall: return 1 + left().quantifier_depth();
    default: return std::max(left().quantifier_depth(), right().quantifier_depth());
  }
}

std::size_t Formula::size() const {
  std::size_t s = 1;
  for (const auto& k : node_->kids) s += k.size();
  return s;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  if (x.kind == Formula::Kind::Atom)
    return x.rel == y.rel && x.modulus == y.modulus && x.lhs == y.lhs && x.rhs == y.rhs;
  if (x.var != y.var || x.kids.size() != y.kids.size()) return false;
  for (std::size_t i = 0; i < x.kids.size(); ++i)
    if (!(x.kids[i] == y.kids[i])) return false;
  return true;
}

std::string Formula::str() const {
  switch (kind()) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Atom: {
      const char* op = "=";
      std::string m;
      switch (rel()) {
        case Rel::Eq: op = "="; break;
        case Rel::Lt: op = "<"; break;
        case Rel::Le: op = "<="; break;
        case Rel::Cong: op = "=_"; m = modulus().get_str(); break;
      }
      return lhs().str() + " " + op + m + " " + rhs().str();
    }
    case Kind::Not: return "!(" + left().str() + ")";
    case Kind::And: return "(" + left().str() + " & " + right().str() + ")";
    case Kind::Or: return "(" + left().str() + " | " + right().str() + ")";
    case Kind::Implies: return "(" + left().str() + " -> " + right().str() + ")";
    case Kind::Iff: return "(" + left().str() + " <-> " + right().str() + ")";
    case Kind::Exists: return "E " + var() + " (" + left().str() + ")";
    case Kind::Forall: return "A " + var() + " (" + left().str() + ")";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Parser

ParseError::ParseError(const std::string& msg, int line, int column)
    : FormulaError(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line), column_(column) {}

namespace {

enum class Tok { End, Ident, Int, LParen, RParen, Comma, Plus, Minus, Star, Slash, Eq, Neq, Lt, Le, Gt, Ge, Cong,
                 Not, And, Or, Implies, Iff };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : src_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      int l = line_, c = col_;
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", l, c});
        return out;
      }
      char ch = src_[pos_];
      auto single = [&](Tok k) {
        advance();
        out.push_back({k, std::string(1, ch), l, c});
      };
      if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        std::string id;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          id += advance();
        out.push_back({Tok::Ident, id, l, c});
      } else if (std::isdigit(static_cast<unsigned char>(ch))) {
        std::string num;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) num += advance();
        out.push_back({Tok::Int, num, l, c});
      } else if (ch == '(') {
        single(Tok::LParen);
      } else if (ch == ')') {
        single(Tok::RParen);
      } else if (ch == ',') {
        single(Tok::Comma);
      } else if (ch == '+') {
        single(Tok::Plus);
      } else if (ch == '*') {
        single(Tok::Star);
      } else if (ch == '/') {
        single(Tok::Slash);
      } else if (ch == '&') {
        single(Tok::And);
      } else if (ch == '|') {
        single(Tok::Or);
      } else if (ch == '-') {
        if (peek(1) == '>') {
          advance(), advance();
          out.push_back({Tok::Implies, "->", l, c});
        } else {
          single(Tok::Minus);
        }
      } else if (ch == '<') {
        if (peek(1) == '-' && peek(2) == '>') {
          advance(), advance(), advance();
          out.push_back({Tok::Iff, "<->", l, c});
        } else if (peek(1) == '=') {
          advance(), advance();
          out.push_back({Tok::Le, "<=", l, c});
        } else {
          single(Tok::Lt);
        }
      } else if (ch == '>') {
        if (peek(1) == '=') {
          advance(), advance();
          out.push_back({Tok::Ge, ">=", l, c});
        } else {
          single(Tok::Gt);
        }
      } else if (ch == '!') {
        if (peek(1) == '=') {
          advance(), advance();
          out.push_back({Tok::Neq, "!=", l, c});
        } else {
          single(Tok::Not);
        }
      } else if (ch == '=') {
        if (peek(1) == '_') {
          advance(), advance();
          std::string num;
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) num += advance();
          if (num.empty()) throw ParseError("expected modulus after '=_'", l, c);
          out.push_back({Tok::Cong, num, l, c});
        } else {
          single(Tok::Eq);
        }
      } else {
        throw ParseError(std::string("unexpected character '") + ch + "'", l, c);
      }
    }
  }

 private:
  char peek(std::size_t off) const { return pos_ + off < src_.size() ? src_[pos_ + off] : '\0'; }
  char advance() {
    char ch = src_[pos_++];
    if (ch == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return ch;
  }
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, const GroundModel& model) : toks_(std::move(toks)), model_(model) {}

  Formula run() {
    Formula f = parse_iff();
    if (cur().kind != Tok::End) fail("unexpected '" + cur().text + "'");
    return f;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  bool accept(Tok k) {
    if (cur().kind != k) return false;
    ++pos_;
    return true;
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) fail(std::string("expected ") + what);
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, cur().line, cur().col); }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const { throw ParseError(msg, t.line, t.col); }

  static bool reserved(const std::string& id) { return id == "E" || id == "A" || id == "true" || id == "false"; }

  Formula parse_iff() {
    Formula f = parse_implies();
    while (accept(Tok::Iff)) f = Formula::iff(f, parse_implies());
    return f;
  }

  Formula parse_implies() {
    Formula f = parse_or();
    if (accept(Tok::Implies)) return Formula::implies(f, parse_implies());
    return f;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (accept(Tok::Or)) f = Formula::disj(f, parse_and());
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (accept(Tok::And)) f = Formula::conj(f, parse_unary());
    return f;
  }

  Formula parse_unary() {
    if (accept(Tok::Not)) return Formula::negation(parse_unary());
    if (cur().kind == Tok::Ident && (cur().text == "E" || cur().text == "A")) {
      bool ex = cur().text == "E";
      ++pos_;
      std::vector<std::string> vars;
      do {
        if (cur().kind != Tok::Ident || reserved(cur().text)) fail("expected variable after quantifier");
        vars.push_back(cur().text);
        ++pos_;
      } while (accept(Tok::Comma));
      expect(Tok::LParen, "'(' around quantifier body");
      Formula body = parse_iff();
      expect(Tok::RParen, "')'");
      for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        body = ex ? Formula::exists(*it, body) : Formula::forall(*it, body);
      return body;
    }
    if (accept(Tok::LParen)) {
      Formula f = parse_iff();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (cur().kind == Tok::Ident && cur().text == "true") {
      ++pos_;
      return Formula::truth();
    }
    if (cur().kind == Tok::Ident && cur().text == "false") {
      ++pos_;
      return Formula::falsity();
    }
    return parse_atom();
  }

  Formula parse_atom() {
    LinearTerm lhs = parse_term();
    Token op = cur();
    ++pos_;
    LinearTerm rhs;
    switch (op.kind) {
      case Tok::Eq: rhs = parse_term(); return Formula::atom(Formula::Rel::Eq, lhs, rhs);
      case Tok::Neq: rhs = parse_term(); return Formula::negation(Formula::atom(Formula::Rel::Eq, lhs, rhs));
      case Tok::Lt: rhs = parse_term(); return Formula::atom(Formula::Rel::Lt, lhs, rhs);
      case Tok::Le: rhs = parse_term(); return Formula::atom(Formula::Rel::Le, lhs, rhs);
      case Tok::Gt: rhs = parse_term(); return Formula::atom(Formula::Rel::Lt, rhs, lhs);
      case Tok::Ge: rhs = parse_term(); return Formula::atom(Formula::Rel::Le, rhs, lhs);
      case Tok::Cong: {
        Int m(op.text);
        if (m < 2) fail_at(op, "congruence modulus must be at least 2, got " + op.text);
        rhs = parse_term();
        return Formula::atom(Formula::Rel::Cong, lhs, rhs, m);
      }
      default: fail_at(op, "expected a relation (=, !=, <, <=, >, >=, =_m)");
    }
  }

  LinearTerm parse_term() {
    bool neg = accept(Tok::Minus);
    LinearTerm t = parse_summand();
    if (neg) t = -t;
    while (true) {
      if (accept(Tok::Plus))
        t = t + parse_summand();
      else if (accept(Tok::Minus))
        t = t - parse_summand();
      else
        return t;
    }
  }

  Rat parse_literal() {
    Token num = cur();
    expect(Tok::Int, "number");
    Rat q(Int(num.text));
    if (accept(Tok::Slash)) {
      Token den = cur();
      expect(Tok::Int, "denominator");
      Int d(den.text);
      if (d == 0) fail_at(den, "zero denominator");
      q = Rat(Int(num.text), d);
      q.canonicalize();
    }
    if (!model_.contains(q)) {
      fail_at(num, "literal " + to_string(q) + " is not an element of " +
                       (model_.discrete() ? std::string("Z (denominators are not allowed in discrete mode)")
                                          : model_.spec()));
    }
    return q;
  }

  LinearTerm parse_summand() {
    if (cur().kind == Tok::Ident) {
      if (reserved(cur().text)) fail("unexpected keyword '" + cur().text + "' in term");
      std::string v = cur().text;
      ++pos_;
      return LinearTerm::variable(v);
    }
    if (cur().kind != Tok::Int) fail("expected a term");
    bool scalar = toks_[pos_ + 1].kind == Tok::Star;
    if (scalar) {
      Int n(cur().text);
      pos_ += 2;
      if (cur().kind == Tok::Ident) {
        if (reserved(cur().text)) fail("unexpected keyword '" + cur().text + "' in term");
        std::string v = cur().text;
        ++pos_;
        return LinearTerm::variable(v, n);
      }
      return LinearTerm(Rat(parse_literal() * n));
    }
    return LinearTerm(parse_literal());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const GroundModel& model_;
};

}  // namespace

Formula parse_formula(const std::string& text, const GroundModel& model) {
  Lexer lx(text);
  Parser p(lx.run(), model);
  return p.run();
}

// ---------------------------------------------------------------------------
// Evaluation

bool eval_atom(const Formula& atom, const std::map<std::string, Rat>& env, const GroundModel& model) {
  Rat l = atom.lhs().evaluate(env);
  Rat r = atom.rhs().evaluate(env);
  switch (atom.rel()) {
    case Formula::Rel::Eq: return l == r;
    case Formula::Rel::Lt: return l < r;
    case Formula::Rel::Le: return l <= r;
    case Formula::Rel::Cong: return model.in_multiple(Rat(l - r), atom.modulus());
  }
  return false;
}

bool eval_formula(const Formula& f, const std::map<std::string, Rat>& env, const GroundModel& model) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: return true;
    case K::False: return false;
    case K::Atom: return eval_atom(f, env, model);
    case K::Not: return !eval_formula(f.left(), env, model);
    case K::And: return eval_formula(f.left(), env, model) && eval_formula(f.right(), env, model);
    case K::Or: return eval_formula(f.left(), env, model) || eval_formula(f.right(), env, model);
    case K::Implies: return !eval_formula(f.left(), env, model) || eval_formula(f.right(), env, model);
    case K::Iff: return eval_formula(f.left(), env, model) == eval_formula(f.right(), env, model);
    case K::Exists:
    case K::Forall:
      throw FormulaError("eval_formula: quantifier over '" + f.var() +
                         "' (eliminate quantifiers first or use the window evaluator)");
  }
  return false;
}

// ---------------------------------------------------------------------------
// Substitution

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string n = base + std::to_string(i);
    if (!avoid.count(n)) return n;
  }
}

namespace {

Formula rebuild(const Formula& f, const std::vector<Formula>& kids) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Not: return Formula::negation(kids[0]);
    case K::And: return Formula::conj(kids[0], kids[1]);
    case K::Or: return Formula::disj(kids[0], kids[1]);
    case K::Implies: return Formula::implies(kids[0], kids[1]);
    case K::Iff: return Formula::iff(kids[0], kids[1]);
    case K::Exists: return Formula::exists(f.var(), kids[0]);
    case K::Forall: return Formula::forall(f.var(), kids[0]);
    default: return f;
  }
}

Formula subst_rec(const Formula& f, const std::string& var, const LinearTerm& value,
                  const std::set<std::string>& value_vars) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True:
    case K::False: return f;
    case K::Atom:
      if (!f.lhs().mentions(var) && !f.rhs().mentions(var)) return f;
      return Formula::atom(f.rel(), f.lhs().substitute(var, value), f.rhs().substitute(var, value), f.modulus());
    case K::Exists:
    case K::Forall: {
      if (f.var() == var) return f;
      Formula body = f.left();
      std::string bv = f.var();
      if (value_vars.count(bv)) {
        std::set<std::string> avoid = body.free_vars();
        avoid.insert(value_vars.begin(), value_vars.end());
        avoid.insert(var);
        std::string nv = fresh_name(bv, avoid);
        body = subst_rec(body, bv, LinearTerm::variable(nv), {nv});
        bv = nv;
      }
      Formula nb = subst_rec(body, var, value, value_vars);
      return f.kind() == K::Exists ? Formula::exists(bv, nb) : Formula::forall(bv, nb);
    }
    default: {
      std::vector<Formula> kids;
      kids.push_back(subst_rec(f.left(), var, value, value_vars));
      if (f.is_binary()) kids.push_back(subst_rec(f.right(), var, value, value_vars));
      return rebuild(f, kids);
    }
  }
}

}  // namespace

Formula substitute(const Formula& f, const std::string& var, const LinearTerm& value) {
  std::set<std::string> vv;
  for (const auto& [v, c] : value.coeffs()) vv.insert(v);
  return subst_rec(f, var, value, vv);
}

Formula substitute_params(const Formula& f, const std::map<std::string, Rat>& bindings) {
  auto bound = f.bound_vars();
  Formula r = f;
  for (const auto& [v, g] : bindings) {
    if (bound.count(v)) throw FormulaError("cannot bind '" + v + "': it is bound by a quantifier");
    r = substitute(r, v, LinearTerm(g));
  }
  return r;
}

}  // namespace oag
