// chainrep: minimal reparameterization dimension of MSO formulas over words.
//
// Every subcommand assembles one JSON document; the human format is rendered
// from it. Exit status: 0 success, 1 negative answer, 2 input error,
// 3 resource limit, 4 internal error.

#include <sys/resource.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <new>
#include <optional>
#include <regex>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "chainrep/acceptance.hpp"
#include "chainrep/growth.hpp"
#include "chainrep/interp.hpp"
#include "chainrep/reparam.hpp"

using namespace chainrep;

namespace {

enum Exit : int { kOk = 0, kNegative = 1, kInput = 2, kResource = 3, kInternal = 4 };

struct RunConfig {
  std::string sig_text;
  std::string formula_text;
  std::string formula_file;
  std::string spec_file;
  std::string format = "human";
  std::optional<std::size_t> dim;
  std::optional<std::size_t> n;
  std::optional<std::size_t> max_len;
  std::size_t budget_states = CompileOptions{}.max_states;
  std::size_t budget_monoid = MonoidOptions{}.max_elements;
  std::uint64_t seed = acceptance::Config{}.seed;
  std::string kind = "all";
  bool quick = false;

  ReparamOptions reparam() const {
    ReparamOptions o;
    o.compile.max_states = budget_states;
    o.monoid.max_elements = budget_monoid;
    return o;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Highest Pn named in the text, so that "P2(x)" works without --sig.
Signature infer_signature(const std::string& text) {
  static const std::regex pn(R"(\bP([0-9]+)\s*\()");
  std::size_t k = 0;
  for (std::sregex_iterator it(text.begin(), text.end(), pn), end; it != end; ++it)
    k = std::max<std::size_t>(k, std::stoul((*it)[1].str()));
  return Signature::numbered(k);
}

struct Input {
  Signature sig;
  Formula formula;
  std::string text;
};

std::string line_col(const std::string& text, std::size_t pos) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < pos && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

Input load_formula(const RunConfig& c) {
  if (c.formula_text.empty() == c.formula_file.empty())
    throw InputError("exactly one of --formula and --formula-file is required");
  std::string text = c.formula_text.empty() ? read_file(c.formula_file) : c.formula_text;
  Signature sig = c.sig_text.empty() ? infer_signature(text) : Signature::parse(c.sig_text);
  try {
    return {sig, parse(text, sig), text};
  } catch (const SyntaxError& e) {
    if (c.formula_file.empty()) throw;
    throw InputError(c.formula_file + ":" + line_col(text, e.position()) + ": " + e.what());
  }
}

Json envelope(const std::string& command, const RunConfig& c, const Signature& sig) {
  Json config{{"signature", sig.to_string()},
              {"budget_states", c.budget_states},
              {"budget_monoid", c.budget_monoid},
              {"seed", c.seed}};
  if (c.dim) config["dim"] = *c.dim;
  if (c.n) config["n"] = *c.n;
  if (c.max_len) config["max_len"] = *c.max_len;
  return Json{{"tool", "chainrep"}, {"version", acceptance::kVersion}, {"command", command}, {"config", config}};
}

// ---------------------------------------------------------------------------
// Human rendering of a report

void render_human(const Json& j, const std::string& indent, std::ostream& out);

void render_value(const std::string& key, const Json& v, const std::string& indent, std::ostream& out) {
  if (v.is_object()) {
    out << indent << key << ":\n";
    render_human(v, indent + "  ", out);
  } else if (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array())) {
    out << indent << key << ":\n";
    for (std::size_t i = 0; i < v.size(); ++i) render_value("[" + std::to_string(i) + "]", v[i], indent + "  ", out);
  } else if (v.is_array() && v.dump().size() > 100) {
    out << indent << key << ":\n";
    for (const auto& item : v) out << indent << "  - " << (item.is_string() ? item.get<std::string>() : item.dump()) << "\n";
  } else if (v.is_string() && v.get<std::string>().find('\n') != std::string::npos) {
    out << indent << key << ":\n";
    std::istringstream lines(v.get<std::string>());
    for (std::string line; std::getline(lines, line);) out << indent << "  " << line << "\n";
  } else {
    out << indent << key << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }
}

void render_human(const Json& j, const std::string& indent, std::ostream& out) {
  for (const auto& [key, v] : j.items()) render_value(key, v, indent, out);
}

void emit(const Json& report, const RunConfig& c) {
  if (c.format == "json")
    std::cout << report.dump(2) << "\n";
  else
    render_human(report, "", std::cout);
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_mindim(const RunConfig& c) {
  Input in = load_formula(c);
  Json report = envelope("mindim", c, in.sig);
  report["result"] = report_json(minimal_reparameterization(in.formula, in.sig, c.reparam()), in.sig);
  emit(report, c);
  return kOk;
}

int cmd_decide(const RunConfig& c) {
  Input in = load_formula(c);
  Reparameterization r = minimal_reparameterization(in.formula, in.sig, c.reparam());
  const bool yes = r.dimension() <= *c.dim;
  Json report = envelope("decide", c, in.sig);
  report["result"] = Json{{"formula", render(in.formula, in.sig)},
                          {"dim", *c.dim},
                          {"answer", yes},
                          {"message", "minimal dimension " + std::to_string(r.dimension())},
                          {"minimal_dimension", r.dimension()},
                          {"reparameterization", render(r.g, in.sig)}};
  report["erratum_notes"] = erratum_notes();
  emit(report, c);
  return yes ? kOk : kNegative;
}

int cmd_growth(const RunConfig& c) {
  Input in = load_formula(c);
  GrowthOptions opts;
  opts.reparam = c.reparam();
  const std::size_t max_n = c.n.value_or(4), max_len = c.max_len.value_or(8);
  GrowthReport g = growth_report(in.formula, max_n, max_len, in.sig, opts);
  Json result = growth_json(g, in.sig);
  if (g.rep.bound != 0 && max_n > 0)
    result["witness"] = witness_json(growth_lower_witness(in.formula, g.rep, max_n, in.sig, opts.reparam), in.sig);
  Json report = envelope("growth", c, in.sig);
  report["result"] = result;
  report["erratum_notes"] = erratum_notes();
  emit(report, c);
  return g.sandwich() ? kOk : kNegative;
}

int cmd_monoid(const RunConfig& c) {
  Input in = load_formula(c);
  auto fv = free_variables(in.formula);
  if (!fv.so.empty()) throw InputError("free set variable '" + fv.so.front() + "'");
  Dfa d = compile(in.formula, fv.fo, in.sig, c.reparam().compile);
  TypeMonoid whole = transition_monoid(d, c.reparam().monoid);
  TypeMonoid seg = segment_monoid(d, c.reparam().monoid);
  Json report = envelope("monoid", c, in.sig);
  report["result"] = Json{{"formula", render(in.formula, in.sig)},
                          {"marked_vars", fv.fo},
                          {"dfa_states", d.states()},
                          {"transition_monoid_size", whole.size()},
                          {"segment_monoid_size", seg.size()},
                          {"segment_idempotents", idempotents(seg, true).size()},
                          {"segment_monoid", dump(seg, in.sig)}};
  emit(report, c);
  return kOk;
}

int cmd_normalform(const RunConfig& c) {
  Input in = load_formula(c);
  ReparamOptions opts = c.reparam();
  Json cases = Json::array();
  for (const auto& oc : order_case_split(in.formula)) {
    auto reps = oc.order.representatives();
    TypeAnalysis a(oc.formula, reps, in.sig, opts);
    const TypeMonoid& m = a.monoid();
    Json listed = Json::array();
    for (const auto& d : a.disjuncts(opts.max_disjuncts)) {
      Json words = Json::array(), pumpable = Json::array();
      for (Element t : d.types) words.push_back(render_word(underlying(m.witness(t)), in.sig));
      for (std::size_t i = 1; i < d.types.size(); ++i) pumpable.push_back(a.pumpable(d.types[i - 1], d.types[i]));
      listed.push_back(Json{{"types", d.types}, {"witnesses", words}, {"pumpable", pumpable},
                            {"eliminable", a.eliminable(d)}});
    }
    cases.push_back(Json{{"order", oc.order.describe()},
                         {"variables", reps},
                         {"segment_monoid_size", m.size()},
                         {"disjunct_count", bound_json(a.disjunct_count())},
                         {"disjuncts", listed}});
  }
  Json report = envelope("normalform", c, in.sig);
  report["result"] = Json{{"formula", render(in.formula, in.sig)}, {"cases", cases}};
  emit(report, c);
  return kOk;
}

int cmd_witness(const RunConfig& c) {
  Input in = load_formula(c);
  const std::size_t n = *c.n;
  ReparamOptions opts = c.reparam();
  auto vars = free_variables(in.formula).fo;
  Json result{{"formula", render(in.formula, in.sig)}, {"n", n}};
  bool any = false;
  auto attempt = [&](const std::string& kind, const std::function<WitnessStructure()>& build) {
    if (c.kind != "all" && c.kind != kind) return;
    try {
      WitnessStructure w = build();
      result[kind] = witness_json(w, in.sig);
      result[kind]["dump"] = dump(w, in.sig);
      any = true;
    } catch (const PreconditionError& e) {
      result[kind] = Json{{"applicable", false}, {"reason", e.what()}};
    }
  };
  attempt("pump", [&] { return pump_witness(in.formula, n, in.sig, opts); });
  attempt("no-decrement", [&] { return no_decrement_witness(in.formula, vars, n, in.sig, opts); });
  attempt("growth-lower", [&] { return growth_lower_witness(in.formula, n, in.sig, opts); });
  Json report = envelope("witness", c, in.sig);
  report["result"] = result;
  emit(report, c);
  return any ? kOk : kNegative;
}

int cmd_oracle_check(const RunConfig& c) {
  Input in = load_formula(c);
  Reparameterization r = minimal_reparameterization(in.formula, in.sig, c.reparam());
  auto check = oracle::check_reparameterization(r, in.sig, c.max_len.value_or(6));
  Json result = report_json(r, in.sig);
  result["check"] = Json{{"ok", check.ok},
                         {"words_checked", check.words_checked},
                         {"observed_max_preimage", check.observed_max_preimage}};
  if (!check.ok) {
    result["check"]["clause"] = check.clause;
    result["check"]["word"] = check.word;
    result["check"]["tuple"] = check.tuple;
    result["check"]["detail"] = check.detail;
  }
  Json report = envelope("oracle-check", c, in.sig);
  report["result"] = result;
  emit(report, c);
  return check.ok ? kOk : kNegative;
}

int cmd_interp_reduce(const RunConfig& c) {
  const std::string text = read_file(c.spec_file);
  Signature sig = c.sig_text.empty() ? infer_signature(text) : Signature::parse(c.sig_text);
  InterpretationSpec spec;
  try {
    spec = parse_interpretation(text, sig);
  } catch (const InputError& e) {
    throw InputError(c.spec_file + ": " + e.what());
  }
  InterpretationOptions opts;
  opts.reparam = c.reparam();
  const std::size_t d = c.dim ? *c.dim : minimal_dimension(spec, sig, opts.reparam);
  Json report = envelope("interp-reduce", c, sig);
  Json result{{"dim", d}};
  int status = kOk;
  try {
    InterpretationSpec reduced = reduce_interpretation(spec, d, sig, opts);
    const std::size_t len = c.max_len.value_or(4);
    EquivalenceReport eq = check_equivalence(spec, reduced, len, sig);
    result["reduced_dimension"] = reduced.dimension();
    result["interpretation"] = format_interpretation(reduced, sig);
    result["equivalence"] = Json{{"ok", eq.ok}, {"max_len", len}, {"words_checked", eq.words_checked}};
    if (!eq.ok) {
      result["equivalence"]["word"] = eq.word;
      result["equivalence"]["detail"] = eq.detail;
      status = kNegative;
    }
  } catch (const PreconditionError& e) {
    result["reduced"] = false;
    result["reason"] = e.what();
    status = kNegative;
  }
  report["result"] = result;
  report["erratum_notes"] = erratum_notes();
  emit(report, c);
  return status;
}

int cmd_selftest(const RunConfig& c) {
  acceptance::Config config = c.quick ? acceptance::Config::quick() : acceptance::Config{};
  config.seed = c.seed;
  config.reparam = c.reparam();
  acceptance::Report r = acceptance::run(config);
  if (c.format == "json") {
    std::cout << r.to_json().dump(2) << "\n";
  } else {
    std::cout << "chainrep " << acceptance::kVersion << " selftest seed=" << config.seed << "\n";
    for (const auto& o : r.outcomes) std::cout << acceptance::status_line(o) << "\n";
    std::cout << (r.pass() ? "ALL PASS" : "SOME FAILED") << "\n";
  }
  return r.pass() ? kOk : kNegative;
}

void apply_memory_budget() {
  const char* mb = std::getenv("CHAINREP_BUDGET_MB");
  if (!mb || !*mb) return;
  char* end = nullptr;
  unsigned long long v = std::strtoull(mb, &end, 10);
  if (*end != '\0' || v == 0) throw InputError("CHAINREP_BUDGET_MB must be a positive integer");
  rlimit lim{};
  lim.rlim_cur = lim.rlim_max = static_cast<rlim_t>(v) << 20;
  if (setrlimit(RLIMIT_AS, &lim) != 0) throw InputError("cannot apply CHAINREP_BUDGET_MB");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal reparameterization dimension of MSO formulas over finite words"};
  app.require_subcommand(1);
  RunConfig c;

  auto common = [&](CLI::App* sub, bool formula) {
    sub->add_option("--sig", c.sig_text, "Predicate names, e.g. P1,P2 (default: P1..Pk as used)");
    if (formula) {
      sub->add_option("--formula", c.formula_text, "Formula text");
      sub->add_option("--formula-file", c.formula_file, "File holding the formula");
    }
    sub->add_option("--budget-states", c.budget_states, "Automaton state budget")->check(CLI::PositiveNumber);
    sub->add_option("--budget-monoid", c.budget_monoid, "Monoid element budget")->check(CLI::PositiveNumber);
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"human", "json"}));
    sub->add_option("--seed", c.seed, "Seed for generated test cases");
  };

  auto* mindim = app.add_subcommand("mindim", "Minimal dimension and a minimal reparameterization");
  common(mindim, true);
  auto* decide = app.add_subcommand("decide", "Does a reparameterization of dimension <= m exist?");
  common(decide, true);
  decide->add_option("--dim", c.dim, "Dimension m")->required();
  auto* growth = app.add_subcommand("growth", "Growth degree, witness and sandwich check");
  common(growth, true);
  growth->add_option("--n", c.n, "Largest n sampled (default 4)");
  growth->add_option("--max-len", c.max_len, "Word length for brute-force growth (default 8)");
  auto* monoid = app.add_subcommand("monoid", "Type-algebra dump");
  common(monoid, true);
  auto* normalform = app.add_subcommand("normalform", "Segment-type disjuncts per order case");
  common(normalform, true);
  auto* witness = app.add_subcommand("witness", "Pumping, no-decrement and growth-lower structures");
  common(witness, true);
  witness->add_option("--n", c.n, "Size parameter")->required();
  witness->add_option("--kind", c.kind, "Structure kind")
      ->check(CLI::IsMember({"all", "pump", "no-decrement", "growth-lower"}));
  auto* oracle_check = app.add_subcommand("oracle-check", "Verify the reparameterization by exhaustive sweep");
  common(oracle_check, true);
  oracle_check->add_option("--max-len", c.max_len, "Longest word checked (default 6)");
  auto* interp = app.add_subcommand("interp-reduce", "Reduce an interpretation to dimension d");
  common(interp, false);
  interp->add_option("--spec", c.spec_file, "Interpretation file")->required();
  interp->add_option("--dim", c.dim, "Target dimension (default: the largest minimal dimension of a universe)");
  interp->add_option("--max-len", c.max_len, "Longest word for the equivalence check (default 4)");
  auto* selftest = app.add_subcommand("selftest", "Full acceptance battery");
  common(selftest, false);
  selftest->add_flag("--quick", c.quick, "Smaller sweeps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    apply_memory_budget();
    if (*mindim) return cmd_mindim(c);
    if (*decide) return cmd_decide(c);
    if (*growth) return cmd_growth(c);
    if (*monoid) return cmd_monoid(c);
    if (*normalform) return cmd_normalform(c);
    if (*witness) return cmd_witness(c);
    if (*oracle_check) return cmd_oracle_check(c);
    if (*interp) return cmd_interp_reduce(c);
    if (*selftest) return cmd_selftest(c);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kResource;
  } catch (const std::bad_alloc&) {
    std::cerr << "resource limit: out of memory\n";
    return kResource;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
