#pragma once

// Self-test battery. Every check compares a construction against the
// brute-force oracle or against values counted by hand; the structured report
// depends only on the configuration (no timings, no thread counts).

#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "chainrep/compiler.hpp"
#include "chainrep/growth.hpp"
#include "chainrep/interp.hpp"
#include "chainrep/monoid.hpp"
#include "chainrep/oracle.hpp"
#include "chainrep/random_formula.hpp"
#include "chainrep/reparam.hpp"

namespace chainrep::acceptance {

inline constexpr const char* kVersion = "1.0.0";

struct Config {
  std::uint64_t seed = 20261016;
  std::size_t keystone_formulas = 200;
  std::size_t keystone_len = 5;
  std::size_t determination_len = 6;
  std::size_t contract_len = 6;
  std::size_t max_monoid = 50;
  std::size_t morphism_pairs = 500;
  std::size_t growth_max_n = 4;
  std::size_t growth_len = 8;
  std::size_t interp_len = 6;
  ReparamOptions reparam;

  // Same checks on smaller sweeps; for smoke tests of the command line.
  static Config quick() {
    Config c;
    c.keystone_formulas = 30;
    c.keystone_len = 4;
    c.determination_len = 5;
    c.contract_len = 4;
    c.morphism_pairs = 100;
    c.growth_max_n = 3;
    c.growth_len = 6;
    c.interp_len = 4;
    return c;
  }

  Json to_json() const {
    return Json{{"seed", seed},
                {"keystone_formulas", keystone_formulas},
                {"keystone_len", keystone_len},
                {"determination_len", determination_len},
                {"contract_len", contract_len},
                {"max_monoid", max_monoid},
                {"morphism_pairs", morphism_pairs},
                {"growth_max_n", growth_max_n},
                {"growth_len", growth_len},
                {"interp_len", interp_len},
                {"budget_states", reparam.compile.max_states},
                {"budget_monoid", reparam.monoid.max_elements}};
  }
};

struct BatteryFormula {
  std::string name;
  std::string text;
  std::size_t predicates;  // smallest signature the formula is stated over
  std::size_t dimension;   // minimal dimension, counted by hand
};

inline const std::vector<BatteryFormula>& formula_battery() {
  static const std::vector<BatteryFormula> battery = {
      {"first", "~ex y. y<x", 0, 0},
      {"first-last", "x<y & ~(ex z. z<x) & ~(ex z. y<z)", 0, 0},
      {"p1", "P1(x)", 1, 1},
      {"consecutive-p1", "x<y & P1(x) & P1(y) & ~(ex z. x<z & z<y & P1(z))", 1, 1},
      {"successor", "P1(x) & x<y & ~(ex z. x<z & z<y)", 1, 1},
      {"pair", "x<y", 0, 2},
      {"triple", "x<y & y<z", 0, 3},
      {"unsatisfiable", "P1(x) & ~P1(x)", 1, 0},
      {"diagonal", "x=y & P1(x)", 1, 1},
      {"mixed-order", "y<x | P1(x)", 1, 2},
      {"split", "x<y & ((~(ex z. z<x) & P1(y)) | (~(ex z. y<z) & P1(x)))", 1, 1},
  };
  return battery;
}

struct BatteryInterpretation {
  std::string name;
  std::string text;
  std::size_t predicates;
};

inline const std::vector<BatteryInterpretation>& interpretation_battery() {
  static const std::vector<BatteryInterpretation> battery = {
      {"successor-pairs",
       "component s dim=2 (x,y)\n"
       "universe P1(x) & x<y & ~(ex z. x<z & z<y)\n"
       "component p dim=1\n"
       "universe P1(x1)\n"
       "relation E/2 on (s,s) (x,y;u,v) := y=u\n"
       "relation F/2 on (p,s) (a;u,v) := a<u\n",
       1},
      {"near-pairs",
       "component n dim=2 (x,y)\n"
       "universe x<y & ~(ex z. ex w. x<z & z<w & w<y)\n"
       "relation E/2 on (n,n) (x,y;u,v) := y<v\n",
       1},
      {"mixed-components",
       "component e dim=2 (x,y)\n"
       "universe x<y & ~(ex z. z<x) & ~(ex z. y<z)\n"
       "component p dim=1 (x)\n"
       "universe P1(x)\n"
       "component c dim=0\n"
       "universe ex x. P1(x)\n"
       "relation L/2 on (p,e) (a;x,y) := a<y\n"
       "relation M/1 on (c) () := true\n",
       1},
  };
  return battery;
}

struct Outcome {
  int id = 0;
  std::string name;
  bool pass = false;
  std::size_t checks = 0;
  std::string detail;
};

struct Report {
  Config config;
  std::vector<Outcome> outcomes;

  bool pass() const {
    for (const auto& o : outcomes)
      if (!o.pass) return false;
    return !outcomes.empty();
  }

  Json to_json() const {
    Json criteria = Json::array();
    for (const auto& o : outcomes)
      criteria.push_back(Json{{"id", o.id}, {"name", o.name}, {"pass", o.pass}, {"checks", o.checks}, {"detail", o.detail}});
    return Json{{"tool", "chainrep"},      {"version", kVersion},
                {"config", config.to_json()}, {"criteria", criteria},
                {"pass", pass()},           {"erratum_notes", erratum_notes()}};
  }
};

inline std::string status_line(const Outcome& o) {
  return std::string(o.pass ? "PASS" : "FAIL") + " " + std::to_string(o.id) + " " + o.name + ": " + o.detail +
         " (" + std::to_string(o.checks) + " checks)";
}

namespace detail {

// Runs fn, turning any exception into a failed outcome.
inline Outcome guarded(int id, std::string name, const std::function<void(Outcome&)>& fn) {
  Outcome o{id, std::move(name), true, 0, ""};
  try {
    fn(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = "exception: " + std::string(e.what());
  }
  return o;
}

inline void fail(Outcome& o, std::string detail) {
  if (!o.pass) return;  // keep the first failure
  o.pass = false;
  o.detail = std::move(detail);
}

inline std::string tuple_text(const std::vector<std::size_t>& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "," : "") + std::to_string(t[i]);
  return out + ")";
}

// Every weakly ordered assignment of `count` positions in [0, n).
inline void for_each_placement(std::size_t n, std::size_t count,
                               const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> t(count, 0);
  if (count > 0 && n == 0) return;
  while (true) {
    fn(t);
    std::size_t i = count;
    while (i > 0 && t[i - 1] + 1 == n) t[--i] = 0;
    if (i == 0) return;
    ++t[i - 1];
  }
}

}  // namespace detail

// 1. Compiled automata agree with the evaluator on random formulas, for every
// placement of the free variables (the track automaton) and for every strictly
// ascending placement (the marked-alphabet automaton).
inline Outcome compiler_agreement(const Config& c) {
  return detail::guarded(1, "compiler-oracle agreement", [&](Outcome& o) {
    const Signature sig = Signature::numbered(2);
    const std::vector<std::vector<std::string>> var_sets = {{"x", "y"}, {"x", "y"}, {"x"}, {}};
    std::vector<RandomFormulaGenerator> gens;
    for (std::size_t j = 0; j < var_sets.size(); ++j) {
      RandomFormulaOptions opts;
      opts.predicates = 2;
      opts.max_rank = 3;
      opts.free_vars = var_sets[j];
      gens.emplace_back(c.seed + j, opts);
    }
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < c.keystone_formulas; ++i) {
      const auto& vars = var_sets[i % var_sets.size()];
      Formula f = gens[i % var_sets.size()].next();
      if (quantifier_rank(f) > 3) throw InternalError("random formula exceeds rank 3");
      TrackDfa tracks = compile_tracks(f, sig, c.reparam.compile);
      Dfa marked = compile(f, vars, sig, c.reparam.compile);
      oracle::Evaluator ev(f, vars);
      oracle::for_each_word(sig.size(), c.keystone_len, [&](const Word& w) {
        detail::for_each_placement(w.size(), vars.size(), [&](const std::vector<std::size_t>& t) {
          bool truth = ev(w, t);
          ++o.checks;
          if (accepts(tracks, w, vars, t) != truth) {
            ++mismatches;
            detail::fail(o, "track automaton disagrees on " + render(f, sig) + " at " + render_word(w, sig) + " " +
                                detail::tuple_text(t));
          }
          if (std::is_sorted(t.begin(), t.end()) && std::adjacent_find(t.begin(), t.end()) == t.end()) {
            ++o.checks;
            if (run(marked, mark_positions(w, t)) != truth) {
              ++mismatches;
              detail::fail(o, "marked automaton disagrees on " + render(f, sig) + " at " + render_word(w, sig) +
                                  " " + detail::tuple_text(t));
            }
          }
        });
      });
    }
    if (o.pass)
      o.detail = std::to_string(c.keystone_formulas) + " formulas, words up to length " +
                 std::to_string(c.keystone_len) + ", 0 discrepancies";
    else
      o.detail += " (" + std::to_string(mismatches) + " discrepancies)";
  });
}

namespace detail {

struct BatteryAutomaton {
  std::string label;
  Formula source;  // the battery formula
  OrderCase order;
  Dfa dfa;
  Signature sig;
};

inline std::vector<BatteryAutomaton> battery_automata(const Config& c) {
  std::vector<BatteryAutomaton> out;
  for (const auto& b : formula_battery()) {
    Signature sig = Signature::numbered(b.predicates);
    Formula f = parse(b.text, sig);
    for (auto& oc : order_case_split(f)) {
      Dfa d = compile(oc.formula, oc.order.representatives(), sig, c.reparam.compile);
      out.push_back({b.name + " [" + oc.order.describe() + "]", f, oc, std::move(d), sig});
    }
  }
  return out;
}

inline bool check_monoid_laws(const TypeMonoid& m, Outcome& o, const std::string& label) {
  for (Element a = 0; a < m.size(); ++a) {
    o.checks += 2;
    if (m.multiply(a, TypeMonoid::identity()) != a || m.multiply(TypeMonoid::identity(), a) != a) {
      fail(o, label + ": identity law fails at element " + std::to_string(a));
      return false;
    }
    for (Element b = 0; b < m.size(); ++b) {
      Element ab = m.multiply(a, b);
      for (Element e = 0; e < m.size(); ++e) {
        ++o.checks;
        if (m.multiply(ab, e) != m.multiply(a, m.multiply(b, e))) {
          fail(o, label + ": associativity fails at (" + std::to_string(a) + "," + std::to_string(b) + "," +
                      std::to_string(e) + ")");
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace detail

// 2. Associativity, identity and the morphism property for every transition
// monoid and segment monoid built from the battery (order case by order case).
inline Outcome monoid_laws(const Config& c) {
  return detail::guarded(2, "monoid laws", [&](Outcome& o) {
    std::mt19937_64 rng(c.seed);
    std::size_t checked = 0, skipped = 0;
    for (const auto& ba : detail::battery_automata(c)) {
      const Dfa& d = ba.dfa;
      TypeMonoid whole = transition_monoid(d, c.reparam.monoid);
      TypeMonoid seg = segment_monoid(d, c.reparam.monoid);
      auto marked_word = [&] {
        MarkedWord w(rng() % 7);
        for (auto& l : w) l = letter_at(rng() % d.letters(), d.predicates);
        return w;
      };
      auto plain_word = [&] {
        Word w;
        w.letters.resize(rng() % 7);
        for (auto& l : w.letters) l = static_cast<Label>(rng() % (Label{1} << d.predicates));
        return w;
      };
      for (const TypeMonoid* m : {&whole, &seg}) {
        const std::string label = ba.label + (m == &whole ? " transition" : " segment");
        if (m->size() > c.max_monoid) {
          ++skipped;
          continue;
        }
        ++checked;
        if (!detail::check_monoid_laws(*m, o, label)) return;
        for (std::size_t i = 0; i < c.morphism_pairs; ++i) {
          ++o.checks;
          bool ok;
          if (m == &whole) {
            MarkedWord u = marked_word(), v = marked_word(), uv = u;
            uv.insert(uv.end(), v.begin(), v.end());
            ok = m->image(uv) == m->multiply(m->image(u), m->image(v));
          } else {
            Word u = plain_word(), v = plain_word(), uv = u;
            uv.letters.insert(uv.letters.end(), v.letters.begin(), v.letters.end());
            ok = m->image(uv) == m->multiply(m->image(u), m->image(v));
          }
          if (!ok) return detail::fail(o, label + ": image(uv) differs from image(u)*image(v)");
        }
      }
    }
    if (checked == 0) return detail::fail(o, "no monoid within the size limit");
    o.detail = std::to_string(checked) + " monoids checked, " + std::to_string(skipped) + " larger than " +
               std::to_string(c.max_monoid) + " skipped";
  });
}

// 3. Truth of the battery formulas recomputed from segment types alone matches
// the evaluator on the original formula.
inline Outcome determination(const Config& c) {
  return detail::guarded(3, "segment-type determination", [&](Outcome& o) {
    for (const auto& ba : detail::battery_automata(c)) {
      TypeMonoid seg = segment_monoid(ba.dfa, c.reparam.monoid);
      const auto& classes = ba.order.order.classes;
      oracle::Evaluator ev(ba.source, free_variables(ba.source).fo);
      const auto vars = free_variables(ba.source).fo;
      oracle::for_each_word(ba.sig.size(), c.determination_len, [&](const Word& w) {
        if (!o.pass) return;
        detail::for_each_placement(w.size(), classes.size(), [&](const std::vector<std::size_t>& marks) {
          if (!std::is_sorted(marks.begin(), marks.end()) || std::adjacent_find(marks.begin(), marks.end()) != marks.end())
            return;
          std::vector<std::size_t> values(vars.size());
          for (std::size_t i = 0; i < classes.size(); ++i)
            for (const auto& v : classes[i]) values[std::find(vars.begin(), vars.end(), v) - vars.begin()] = marks[i];
          ++o.checks;
          bool from_types = segments_accepted(ba.dfa, seg, segment_types(seg, mark_positions(w, marks)));
          if (from_types != ev(w, values))
            detail::fail(o, ba.label + ": segment types give " + (from_types ? "true" : "false") + " on " +
                                render_word(w, ba.sig) + " " + detail::tuple_text(values));
        });
      });
    }
    if (o.pass)
      o.detail = std::to_string(formula_battery().size()) + " formulas, words up to length " +
                 std::to_string(c.determination_len);
  });
}

// 4. The decision procedure returns the hand-counted minimal dimensions.
inline Outcome known_dimensions(const Config& c) {
  return detail::guarded(4, "known dimensions", [&](Outcome& o) {
    for (const auto& b : formula_battery()) {
      Signature sig = Signature::numbered(b.predicates);
      Reparameterization r = minimal_reparameterization(parse(b.text, sig), sig, c.reparam);
      ++o.checks;
      if (r.dimension() != b.dimension)
        detail::fail(o, b.name + ": dimension " + std::to_string(r.dimension()) + ", expected " +
                            std::to_string(b.dimension));
      if (b.name == "unsatisfiable" && !(r.g == falsity())) detail::fail(o, "unsatisfiable: G is not false");
    }
    if (o.pass) o.detail = std::to_string(formula_battery().size()) + " formulas";
  });
}

// 5. Functional, same domain, bounded preimages and canonical images, over
// every signature size from the formula's own up to two predicates.
inline Outcome reparameterization_contract(const Config& c) {
  return detail::guarded(5, "reparameterization contract", [&](Outcome& o) {
    std::size_t words = 0;
    for (const auto& b : formula_battery()) {
      for (std::size_t k = b.predicates; k <= 2; ++k) {
        Signature sig = Signature::numbered(k);
        Reparameterization r = minimal_reparameterization(parse(b.text, sig), sig, c.reparam);
        auto check = oracle::check_reparameterization(r, sig, c.contract_len);
        ++o.checks;
        words += check.words_checked;
        if (!check.ok) {
          detail::fail(o, b.name + " over " + std::to_string(k) + " predicates: " + check.clause + " fails on " +
                              check.word + " (" + check.detail + ")");
        } else if (Bound(check.observed_max_preimage) > r.bound) {
          detail::fail(o, b.name + ": observed preimage exceeds the reported bound");
        }
      }
    }
    if (o.pass) o.detail = std::to_string(words) + " words, lengths up to " + std::to_string(c.contract_len);
  });
}

// 6. No-decrement witnesses for battery formulas of full dimension.
inline Outcome no_decrement(const Config& c) {
  return detail::guarded(6, "no-decrement witnesses", [&](Outcome& o) {
    std::size_t formulas = 0;
    for (const auto& b : formula_battery()) {
      Signature sig = Signature::numbered(b.predicates);
      Formula f = parse(b.text, sig);
      auto vars = free_variables(f).fo;
      if (b.dimension == 0 || b.dimension != vars.size()) continue;
      ++formulas;
      const std::size_t k = vars.size();
      for (std::size_t n = 1; n <= 3; ++n) {
        WitnessStructure w = no_decrement_witness(f, vars, n, sig, c.reparam);
        std::size_t count = oracle::satisfying_tuples(f, w.word, w.marked_set, vars).size();
        ++o.checks;
        if (w.marked_set.size() > 2 * n * k)
          detail::fail(o, b.name + " N=" + std::to_string(n) + ": |S| = " + std::to_string(w.marked_set.size()));
        if (count < chainrep::detail::power(2 * n, k))
          detail::fail(o, b.name + " N=" + std::to_string(n) + ": " + std::to_string(count) + " tuples in S^k");
      }
    }
    if (o.pass) o.detail = std::to_string(formulas) + " formulas, N = 1..3";
  });
}

// 7. n^d <= witness count and brute-force growth <= bound * n^d. Lower bounds
// apply to satisfiable formulas (an unsatisfiable one has no tuples at all).
inline Outcome growth_sandwich(const Config& c) {
  return detail::guarded(7, "growth sandwich", [&](Outcome& o) {
    std::size_t skipped_lower = 0;
    for (const auto& b : formula_battery()) {
      Signature sig = Signature::numbered(b.predicates);
      Formula f = parse(b.text, sig);
      Reparameterization r = minimal_reparameterization(f, sig, c.reparam);
      const std::size_t d = r.dimension();
      auto brute = brute_growth_profile(f, c.growth_max_n, c.growth_len, sig);
      for (std::size_t n = 1; n <= c.growth_max_n; ++n) {
        const std::size_t nd = chainrep::detail::power(n, d);
        ++o.checks;
        if (Bound(brute[n]) > Bound(r.bound * nd))
          detail::fail(o, b.name + " n=" + std::to_string(n) + ": brute " + std::to_string(brute[n]) + " exceeds " +
                              Bound(r.bound * nd).str());
        if (r.bound == 0) {
          ++skipped_lower;
          continue;
        }
        WitnessStructure w = growth_lower_witness(f, r, n, sig, c.reparam);
        std::size_t count = oracle::satisfying_tuples(f, w.word, w.marked_set, w.vars).size();
        ++o.checks;
        if (count < nd)
          detail::fail(o, b.name + " n=" + std::to_string(n) + ": witness has " + std::to_string(count) +
                              " tuples, fewer than n^d = " + std::to_string(nd));
      }
    }
    // x<y: exactly n(n-1)/2 once words are long enough to hold n positions
    Signature k0 = Signature::numbered(0);
    Formula pair = parse("x<y", k0);
    for (std::size_t n = 1; n <= c.growth_max_n; ++n) {
      for (std::size_t len : {n, c.growth_len}) {
        ++o.checks;
        std::size_t got = brute_growth(pair, n, len, k0);
        if (got != n * (n - 1) / 2)
          detail::fail(o, "x<y n=" + std::to_string(n) + " L=" + std::to_string(len) + ": " + std::to_string(got));
      }
    }
    if (o.pass)
      o.detail = "n = 1.." + std::to_string(c.growth_max_n) + ", L = " + std::to_string(c.growth_len) + "; " +
                 std::to_string(skipped_lower) + " lower bounds vacuous for unsatisfiable formulas";
  });
}

// 8. Ramsey bound against the recurrence B(1) = 3, B(c) = c(B(c-1) - 1) + 2.
inline Outcome ramsey(const Config&) {
  return detail::guarded(8, "ramsey recurrence", [&](Outcome& o) {
    const std::uint64_t expected[] = {3, 6, 17};
    for (std::uint64_t colors = 1; colors <= 3; ++colors) {
      ++o.checks;
      if (ramsey_bound(colors) != expected[colors - 1])
        detail::fail(o, std::to_string(colors) + " colors: " + std::to_string(ramsey_bound(colors)));
    }
    std::uint64_t b = 3;
    for (std::uint64_t colors = 2; colors <= 10; ++colors) {
      b = colors * (b - 1) + 2;
      ++o.checks;
      if (ramsey_bound(colors) != b) detail::fail(o, std::to_string(colors) + " colors disagrees with the recurrence");
    }
    if (o.pass) o.detail = "3, 6, 17 for 1, 2, 3 colors; recurrence up to 10 colors";
  });
}

// 9. Reduction to the largest minimal dimension among the universes, checked
// against the original by an explicit bijection.
inline Outcome interpretation_reduction(const Config& c) {
  return detail::guarded(9, "interpretation reduction", [&](Outcome& o) {
    for (const auto& b : interpretation_battery()) {
      Signature sig = Signature::numbered(b.predicates);
      InterpretationSpec spec = parse_interpretation(b.text, sig);
      const std::size_t d = minimal_dimension(spec, sig, c.reparam);
      InterpretationOptions opts;
      opts.reparam = c.reparam;
      InterpretationSpec reduced = reduce_interpretation(spec, d, sig, opts);
      ++o.checks;
      if (reduced.dimension() > d) detail::fail(o, b.name + ": reduced dimension exceeds " + std::to_string(d));
      EquivalenceReport eq = check_equivalence(spec, reduced, c.interp_len, sig);
      ++o.checks;
      if (!eq.ok) detail::fail(o, b.name + ": " + eq.detail + " on " + eq.word);
    }
    if (o.pass)
      o.detail = std::to_string(interpretation_battery().size()) + " interpretations, words up to length " +
                 std::to_string(c.interp_len);
  });
}

using Progress = std::function<void(const Outcome&, double seconds)>;

// Criteria 1-9; the tenth compares two reports and lives with the caller.
inline Report run(const Config& c, const Progress& progress = {}) {
  Report r{c, {}};
  for (auto* criterion : {compiler_agreement, monoid_laws, determination, known_dimensions,
                          reparameterization_contract, no_decrement, growth_sandwich, ramsey,
                          interpretation_reduction}) {
    auto start = std::chrono::steady_clock::now();
    r.outcomes.push_back(criterion(c));
    if (progress)
      progress(r.outcomes.back(), std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return r;
}

}  // namespace chainrep::acceptance
