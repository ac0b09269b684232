// oag: command-line front end. Every command prints one JSON document.
// Exit status: 0 success, 1 verdict "no"/"disagree", 2 usage or input error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "oag/dichotomy.hpp"
#include "oag/lattice.hpp"
#include "oag/oracle.hpp"
#include "oag/qe.hpp"

using namespace oag;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string model = "z";
  std::string formula;
  std::string file;
  std::string params;
  std::string var = "x";
  long window = 0;  // discrete radius, or dense bound
  long height = 64;
  bool compact = false;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Inline JSON if it looks like JSON, else a file name.
json json_arg(const std::string& text) {
  std::string src = text;
  auto first = src.find_first_not_of(" \t\n");
  if (first == std::string::npos || (src[first] != '[' && src[first] != '{')) src = slurp(text);
  try {
    return json::parse(src);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("malformed JSON: ") + e.what());
  }
}

GroundModel model_of(const Common& c) {
  try {
    return GroundModel::parse(c.model);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

std::map<std::string, Rat> params_of(const Common& c) {
  std::map<std::string, Rat> out;
  std::stringstream ss(c.params);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--params expects k=v pairs, got '" + item + "'");
    try {
      out[item.substr(0, eq)] = parse_rat(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("bad value in --params: '" + item + "'");
    }
  }
  return out;
}

Formula formula_of(const Common& c, const GroundModel& m, const std::string& text_override = "") {
  std::string text = !text_override.empty() ? text_override : !c.formula.empty() ? c.formula : c.file.empty() ? "" : slurp(c.file);
  if (text.empty()) throw UsageError("a formula is required (--formula or --file)");
  return parse_formula(text, m);
}

Window window_of(const Common& c, const GroundModel& m) {
  if (m.discrete()) return Window::discrete(c.window > 0 ? c.window : 1000);
  return Window::dense(m, c.height, c.window > 0 ? c.window : 100);
}

// The set named by --set (DefSet JSON), or the one defined by the formula.
DefSet set_of(const Common& c, const GroundModel& m, const std::string& set_arg, const std::string& formula_text = "") {
  if (!set_arg.empty()) return DefSet::from_json(json_arg(set_arg));
  return formula_to_defset(formula_of(c, m, formula_text), c.var, params_of(c), m);
}

json int_json(const Int& v) {
  if (v.fits_slong_p()) return v.get_si();
  return to_string(v);
}

json matrix_json(const IntMatrix& a) {
  json j = json::array();
  for (const auto& row : a) {
    json r = json::array();
    for (const auto& x : row) r.push_back(int_json(x));
    j.push_back(r);
  }
  return j;
}

IntMatrix matrix_of(const json& j) {
  IntMatrix m;
  for (const auto& row : j) {
    std::vector<Int> r;
    for (const auto& x : row) r.emplace_back(x.is_string() ? Int(x.get<std::string>()) : Int(x.get<long>()));
    m.push_back(r);
  }
  return m;
}

std::vector<RatVector> vectors_of(const json& j) {
  std::vector<RatVector> out;
  for (const auto& g : j) {
    RatVector v;
    for (const auto& x : g) v.push_back(x.is_string() ? parse_rat(x.get<std::string>()) : Rat(x.get<long>()));
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Definable sets in ordered abelian groups: elimination, normal forms, the dichotomy, lattices"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with the same keys as the flags");
  Common c;
  auto common = [&](CLI::App* s, bool with_formula = true) {
    s->add_option("--model", c.model, "z, q or zp:<p>")->capture_default_str();
    if (with_formula) {
      s->add_option("--formula", c.formula, "formula text");
      s->add_option("--file", c.file, "file holding the formula");
      s->add_option("--params", c.params, "bindings k=v,...");
      s->add_option("--var", c.var, "the distinguished free variable")->capture_default_str();
    }
    s->add_option("--window", c.window, "window radius N (discrete) or bound B (dense)");
    s->add_option("--height", c.height, "dense window height")->capture_default_str();
    s->add_flag("--json", c.compact, "single-line canonical JSON");
  };

  std::string set_a, set_b, op, arg, at, gens, subset, matrix, mode_name = "dense";
  std::string formula_b;
  long m_arg = 0, up_to = 10;

  json out;
  int status = 0;
  std::function<void()> action;

  auto* s_parse = app.add_subcommand("parse", "parse and print a formula");
  common(s_parse);
  s_parse->callback([&] {
    action = [&] {
      auto m = model_of(c);
      Formula f = formula_of(c, m);
      json fv = json::array();
      for (const auto& v : f.free_vars()) fv.push_back(v);
      out = {{"formula", f.str()}, {"free_vars", fv}, {"quantifier_depth", f.quantifier_depth()}};
    };
  });

  auto* s_qe = app.add_subcommand("qe", "eliminate quantifiers");
  common(s_qe);
  s_qe->callback([&] {
    action = [&] {
      auto m = model_of(c);
      Formula f = substitute_params(formula_of(c, m), params_of(c));
      out = {{"input", f.str()}, {"output", eliminate_quantifiers(f, m).str()}};
    };
  });

  auto* s_norm = app.add_subcommand("normalize", "normal form of the set defined by a formula (or a DefSet document)");
  common(s_norm);
  s_norm->add_option("--set", set_a, "DefSet JSON (inline or file)");
  s_norm->callback([&] { action = [&] { out = set_of(c, model_of(c), set_a).to_json(); }; });

  auto* s_member = app.add_subcommand("member", "membership of one element");
  common(s_member);
  s_member->add_option("--set", set_a, "DefSet JSON (inline or file)");
  s_member->add_option("--at", at, "group element")->required();
  s_member->callback([&] {
    action = [&] {
      auto m = model_of(c);
      Rat g = parse_rat(at);
      if (!m.contains(g)) throw UsageError("element " + at + " is not in the model");
      out = {{"at", to_string(g)}, {"member", set_of(c, m, set_a).member(g)}};
    };
  });

  auto* s_bool = app.add_subcommand("bool", "Boolean combination of two sets");
  common(s_bool);
  s_bool->add_option("--op", op, "union, intersect, difference, complement")->required();
  s_bool->add_option("--set", set_a, "left DefSet");
  s_bool->add_option("--set-b", set_b, "right DefSet");
  s_bool->add_option("--formula-b", formula_b, "right operand as a formula");
  s_bool->callback([&] {
    action = [&] {
      auto m = model_of(c);
      static const std::map<std::string, BoolOp> ops{{"union", BoolOp::Union},
                                                     {"intersect", BoolOp::Intersect},
                                                     {"difference", BoolOp::Difference},
                                                     {"complement", BoolOp::Complement}};
      auto it = ops.find(op);
      if (it == ops.end()) throw UsageError("unknown --op '" + op + "'");
      DefSet a = set_of(c, m, set_a);
      if (it->second == BoolOp::Complement) {
        out = boolean_op(it->second, a).to_json();
        return;
      }
      if (set_b.empty() && formula_b.empty()) throw UsageError("--set-b or --formula-b is required");
      DefSet b = set_of(c, m, set_b, formula_b);
      out = boolean_op(it->second, a, &b).to_json();
    };
  });

  auto* s_aff = app.add_subcommand("affine", "translate, reflect, divide or scale a set");
  common(s_aff);
  s_aff->add_option("--op", op, "translate, reflect, divide, scale")->required();
  s_aff->add_option("--arg", arg, "translation element or n >= 1");
  s_aff->add_option("--set", set_a, "DefSet JSON");
  s_aff->callback([&] {
    action = [&] {
      auto m = model_of(c);
      DefSet d = set_of(c, m, set_a);
      if (op == "reflect") {
        out = affine_op(AffineOp::reflect(), d).to_json();
        return;
      }
      if (arg.empty()) throw UsageError("--arg is required for " + op);
      Rat a = parse_rat(arg);
      if (op == "translate") {
        if (!m.contains(a)) throw UsageError("translation " + arg + " is not in the model");
        out = affine_op(AffineOp::translate(a), d).to_json();
      } else if (op == "divide" || op == "scale") {
        if (!is_integer(a) || a < 1) throw UsageError("--arg must be an integer >= 1");
        out = affine_op(op == "divide" ? AffineOp::divide_by(a.get_num()) : AffineOp::scale_by(a.get_num()), d).to_json();
      } else {
        throw UsageError("unknown --op '" + op + "'");
      }
    };
  });

  auto* s_gd = app.add_subcommand("group-definable", "is the set definable from + alone?");
  common(s_gd);
  s_gd->add_option("--set", set_a, "DefSet JSON");
  s_gd->callback([&] {
    action = [&] {
      auto v = is_group_definable(set_of(c, model_of(c), set_a));
      out = v.to_json();
      status = v.definable ? 0 : 1;
    };
  });

  auto* s_ex = app.add_subcommand("extract-order", "extract an interval (0, b) with its trace");
  common(s_ex);
  s_ex->add_option("--set", set_a, "DefSet JSON");
  s_ex->callback([&] {
    action = [&] {
      try {
        out = extract_interval(set_of(c, model_of(c), set_a)).to_json();
      } catch (const GroupDefinableInput& e) {
        out = {{"verdict", "no"}, {"reason", e.what()}};
        status = 1;
      }
    };
  });

  auto* s_oc = app.add_subcommand("order-check", "check that R coincides with < on the extracted interval");
  common(s_oc);
  s_oc->add_option("--set", set_a, "DefSet JSON");
  s_oc->callback([&] {
    action = [&] {
      auto m = model_of(c);
      IntervalResult r = extract_interval(set_of(c, m, set_a));
      OrderRelation R = order_relation(r);
      Window w = window_of(c, m);
      std::vector<Rat> inside;
      for (const auto& g : w.elements())
        if (r.interval.member(g)) inside.push_back(g);
      std::size_t pairs = 0;
      json bad = nullptr;
      for (const auto& a : inside) {
        for (const auto& b : inside) {
          ++pairs;
          if (R.holds(a, b) != (a < b)) {
            bad = {to_string(a), to_string(b)};
            break;
          }
        }
        if (!bad.is_null()) break;
      }
      bool ok = bad.is_null() && r.trace.replays();
      out = {{"verdict", ok ? "agree" : "disagree"}, {"b", r.b.str()}, {"interval_members", inside.size()},
             {"pairs_checked", pairs}, {"counterexample", bad}, {"trace_replays", r.trace.replays()},
             {"relation", R.formula().str()}, {"scope", "window-relative"}};
      status = ok ? 0 : 1;
    };
  });

  auto* s_chi = app.add_subcommand("chi-check", "check the interval detector chi(y, z) against phi(x, z)");
  common(s_chi);
  s_chi->callback([&] {
    action = [&] {
      auto m = model_of(c);
      if (!m.discrete()) throw UsageError("chi-check needs --model z");
      Formula phi = formula_of(c, m);
      long n = c.window > 0 ? c.window : 50;
      Formula chi = eliminate_quantifiers(build_chi(phi, m), m);
      Window big = Window::discrete(std::max(1000L, 4 * n));
      std::size_t checked = 0, positives = 0;
      json bad = nullptr;
      for (long cz = -n; cz <= n && bad.is_null(); ++cz) {
        auto table = brute_window(substitute_params(phi, {{"z", Rat(cz)}}), "x", big);
        for (long b = -n; b <= n; ++b) {
          bool want = b > 0;
          for (std::size_t i = 0; i < table.size() && want; ++i) {
            const Rat& g = big.elements()[i];
            want = table[i] == (g >= 0 && g <= b);
          }
          bool got = eval_formula(chi, {{"y", Rat(b)}, {"z", Rat(cz)}}, m);
          ++checked;
          positives += got;
          if (got != want) {
            bad = {{"b", b}, {"c", cz}, {"chi", got}};
            break;
          }
        }
      }
      out = {{"verdict", bad.is_null() ? "agree" : "disagree"}, {"checked", checked}, {"chi_true", positives},
             {"counterexample", bad}, {"scope", "window-relative"}};
      status = bad.is_null() ? 0 : 1;
    };
  });

  auto* s_cls = app.add_subcommand("classify", "group-definable, or recover the order on an interval");
  common(s_cls);
  s_cls->callback([&] {
    action = [&] {
      auto m = model_of(c);
      out = classify(formula_of(c, m), c.var, params_of(c), m).to_json();
    };
  });

  auto* s_snf = app.add_subcommand("snf", "Smith normal form U*A*V = S");
  s_snf->add_option("--matrix", matrix, "integer matrix JSON (inline or file)")->required();
  s_snf->add_flag("--json", c.compact, "single-line canonical JSON");
  s_snf->callback([&] {
    action = [&] {
      auto r = smith_normal_form(matrix_of(json_arg(matrix)));
      out = {{"U", matrix_json(r.U)}, {"S", matrix_json(r.S)}, {"V", matrix_json(r.V)}};
    };
  });

  auto add_gens = [&](CLI::App* s) {
    s->add_option("--gens", gens, "generators: JSON array of rational vectors (inline or file)")->required();
    s->add_flag("--json", c.compact, "single-line canonical JSON");
  };
  auto group_of = [&] {
    json j = json_arg(gens);
    if (!j.is_array() || j.empty()) throw UsageError("--gens needs a nonempty array of vectors");
    return LatticeGroup::from_json(j);
  };

  auto* s_q = app.add_subcommand("quotient", "|G / mG|");
  add_gens(s_q);
  s_q->add_option("--m", m_arg, "m >= 1")->required();
  s_q->callback([&] {
    action = [&] {
      if (m_arg < 1) throw UsageError("--m must be >= 1");
      out = {{"card", int_json(quotient_card(group_of(), m_arg))}};
    };
  });

  auto* s_sq = app.add_subcommand("small-quotients", "|G / mG| for m = 1..M against m^d");
  add_gens(s_sq);
  s_sq->add_option("--up-to", up_to, "M")->capture_default_str();
  s_sq->callback([&] {
    action = [&] {
      auto table = has_small_quotients(group_of(), up_to);
      bool all = std::all_of(table.begin(), table.end(), [](const QuotientEntry& e) { return e.within_bound; });
      out = {{"table", to_json(table)}, {"all_within_bound", all}};
      status = all ? 0 : 1;
    };
  });

  auto* s_rank = app.add_subcommand("rank", "rank of the group");
  add_gens(s_rank);
  s_rank->callback([&] { action = [&] { out = {{"rank", rank(group_of())}}; }; });

  auto* s_acl = app.add_subcommand("acl", "algebraic closure: span(A and dcl(0)) ∩ G");
  add_gens(s_acl);
  s_acl->add_option("--subset", subset, "A: JSON array of vectors")->required();
  s_acl->add_option("--mode", mode_name, "dense or discrete")->capture_default_str();
  s_acl->callback([&] {
    action = [&] {
      if (mode_name != "dense" && mode_name != "discrete") throw UsageError("--mode must be dense or discrete");
      LatticeGroup g = group_of();
      out = acl_closure(g, vectors_of(json_arg(subset)), mode_name == "dense" ? Mode::Dense : Mode::Discrete).to_json();
    };
  });

  auto* s_or = app.add_subcommand("oracle", "brute-force membership table on the window");
  common(s_or);
  s_or->callback([&] {
    action = [&] {
      auto m = model_of(c);
      Formula f = substitute_params(formula_of(c, m), params_of(c));
      Window w = window_of(c, m);
      auto table = brute_window(f, c.var, w);
      json mem = json::array();
      for (std::size_t i = 0; i < table.size(); ++i)
        if (table[i]) mem.push_back(to_string(w.elements()[i]));
      out = {{"members", mem}, {"window", w.to_json()}, {"scope", "window-relative"}};
    };
  });

  auto* s_cmp = app.add_subcommand("compare", "differential check of a set against the oracle");
  common(s_cmp);
  s_cmp->add_option("--set", set_a, "DefSet JSON; defaults to the normal form of the formula");
  s_cmp->callback([&] {
    action = [&] {
      auto m = model_of(c);
      auto params = params_of(c);
      Formula f = formula_of(c, m);
      DefSet d = set_a.empty() ? formula_to_defset(f, c.var, params, m) : DefSet::from_json(json_arg(set_a));
      Report r = compare_report(substitute_params(f, params), c.var, d, window_of(c, m));
      out = r.to_json();
      status = r.agree ? 0 : 1;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    action();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::string text = c.compact ? out.dump() : out.dump(2);
  std::cout << text << "\n";
  if (const char* dir = std::getenv("OAG_OUT_DIR")) {
    std::filesystem::create_directories(dir);
    std::ofstream(std::filesystem::path(dir) / (app.get_subcommands().front()->get_name() + ".json")) << out.dump() << "\n";
  }
  return status;
}
