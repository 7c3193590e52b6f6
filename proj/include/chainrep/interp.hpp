#pragma once

// Injective MSO point interpretations over finite words, their dimension
// reduction through reparameterizations of the universe formulas, and an
// explicit-isomorphism equivalence check.
//
// A reduced component (q, i) holds the tuples y for which the i-th preimage of
// y under G_q (lexicographic by position) exists; its origin record keeps G_q
// so the isomorphism y -> i-th preimage can be recomputed from the text form.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "chainrep/oracle.hpp"
#include "chainrep/reparam.hpp"

namespace chainrep {

struct Component {
  std::string name;
  std::vector<std::string> vars;  // length = dimension
  Formula universe = truth();
};

struct RelationFormula {
  std::string relation;
  std::vector<std::string> components;         // one per argument slot
  std::vector<std::vector<std::string>> vars;  // per slot, length = slot dimension
  Formula formula = truth();

  std::vector<std::string> joint_vars() const {
    std::vector<std::string> out;
    for (const auto& v : vars) out.insert(out.end(), v.begin(), v.end());
    return out;
  }
};

// Reduced component `name` is the index-th preimage slot of source component
// `source` under reparam(source_vars; vars), whose preimages number at most bound.
struct Origin {
  std::string source;
  std::size_t index = 1;
  std::size_t bound = 1;
  std::vector<std::string> source_vars;
  std::vector<std::string> vars;
  Formula reparam = truth();
};

struct InterpretationSpec {
  std::vector<Component> components;
  std::vector<std::pair<std::string, std::size_t>> relations;  // output symbols with arity
  std::vector<RelationFormula> relation_formulas;
  std::map<std::string, Origin> origins;  // present on reduced specs

  const Component& component(const std::string& name) const {
    for (const auto& c : components)
      if (c.name == name) return c;
    throw PreconditionError("unknown component '" + name + "'");
  }
  bool has_component(const std::string& name) const {
    return std::any_of(components.begin(), components.end(), [&](const Component& c) { return c.name == name; });
  }
  std::size_t dimension() const {
    std::size_t d = 0;
    for (const auto& c : components) d = std::max(d, c.vars.size());
    return d;
  }
};

// "xs is the index-th tuple with reparam(xs, ys)". One preimage at most makes
// the selection the reparameterization itself.
inline Formula origin_selector(const Origin& o) {
  if (o.bound <= 1) return o.reparam;
  NameSupply names;
  names.reserve(o.reparam);
  for (const auto& v : o.source_vars) names.reserve(v);
  for (const auto& v : o.vars) names.reserve(v);
  return nth_lex(o.reparam, o.source_vars, o.index, names);
}

// Same formula with top-level equality atoms moved to the front, so the
// evaluator rejects mismatched tuples before evaluating the rest.
inline Formula equalities_first(const Formula& f) {
  auto parts = top_conjuncts(f);
  std::stable_partition(parts.begin(), parts.end(), [](const Formula& p) { return p.op() == Op::Equal; });
  return conj_all(parts);
}

// ---------------------------------------------------------------------------
// Validation and text form

inline void validate(const InterpretationSpec& spec) {
  std::set<std::string> names;
  for (const auto& c : spec.components) {
    if (!names.insert(c.name).second) throw InputError("duplicate component '" + c.name + "'");
    std::set<std::string> vs(c.vars.begin(), c.vars.end());
    if (vs.size() != c.vars.size()) throw InputError("component '" + c.name + "': repeated variable");
    auto fv = free_variables(c.universe);
    if (!fv.so.empty()) throw InputError("component '" + c.name + "': free set variable '" + fv.so.front() + "'");
    for (const auto& v : fv.fo)
      if (!vs.count(v)) throw InputError("component '" + c.name + "': universe uses undeclared variable '" + v + "'");
  }
  std::map<std::string, std::size_t> arity(spec.relations.begin(), spec.relations.end());
  for (const auto& r : spec.relation_formulas) {
    auto it = arity.find(r.relation);
    if (it == arity.end()) throw InputError("relation '" + r.relation + "' is not declared");
    if (it->second != r.components.size() || r.vars.size() != r.components.size())
      throw InputError("relation '" + r.relation + "': arity mismatch");
    for (std::size_t j = 0; j < r.components.size(); ++j) {
      if (!names.count(r.components[j])) throw InputError("relation '" + r.relation + "': unknown component '" + r.components[j] + "'");
      if (r.vars[j].size() != spec.component(r.components[j]).vars.size())
        throw InputError("relation '" + r.relation + "': variable count does not match component '" + r.components[j] + "'");
    }
    auto joint = r.joint_vars();
    std::set<std::string> vs(joint.begin(), joint.end());
    if (vs.size() != joint.size()) throw InputError("relation '" + r.relation + "': repeated variable");
    auto fv = free_variables(r.formula);
    if (!fv.so.empty()) throw InputError("relation '" + r.relation + "': free set variable '" + fv.so.front() + "'");
    for (const auto& v : fv.fo)
      if (!vs.count(v)) throw InputError("relation '" + r.relation + "': undeclared variable '" + v + "'");
  }
  for (const auto& [name, o] : spec.origins) {
    if (!names.count(name)) throw InputError("origin for unknown component '" + name + "'");
    if (o.vars != spec.component(name).vars) throw InputError("origin '" + name + "': variables differ from the component");
    if (o.index == 0 || o.index > o.bound) throw InputError("origin '" + name + "': index outside 1..bound");
  }
}

namespace detail {

// Empty input gives no items unless keep_empty is set.
inline std::vector<std::string> split_list(std::string_view text, char sep, bool keep_empty = false) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  if (!keep_empty && out.size() == 1 && out.front().empty()) out.clear();
  return out;
}

// "(a,b;c)" -> {{a,b},{c}}; "()" -> {{}}
inline std::vector<std::vector<std::string>> parse_var_groups(std::string_view text, std::size_t line) {
  std::string t = trim(text);
  if (t.size() < 2 || t.front() != '(' || t.back() != ')')
    throw InputError("line " + std::to_string(line) + ": expected a parenthesised variable list");
  std::vector<std::vector<std::string>> out;
  for (const auto& group : split_list(std::string_view(t).substr(1, t.size() - 2), ';', true)) out.push_back(split_list(group, ','));
  return out;
}

inline std::size_t parse_natural(std::string_view text, std::size_t line) {
  std::string t = trim(text);
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw InputError("line " + std::to_string(line) + ": expected a number, got '" + t + "'");
  return std::stoul(t);
}

inline std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

inline std::vector<std::string> default_vars(const std::string& base, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(base + std::to_string(i));
  return out;
}

}  // namespace detail

// Line-based text form:
//   component <name> dim=<d> [(v1,...,vd)]
//   universe <formula>
//   relation <R>/<arity> on (<q1>,...) [(<vars of q1>;...)] := <formula>
//   origin <name> from <q> index=<i> bound=<N> (<source vars>;<vars>) := <formula>
// '#' starts a comment line. Component variables default to x1..xd; relation
// variables default to x1..xl when every slot has dimension 1.
inline InterpretationSpec parse_interpretation(std::string_view text, const Signature& sig) {
  using detail::trim;
  InterpretationSpec spec;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  Component* current = nullptr;
  std::set<std::string> with_universe;
  auto formula_at = [&](const std::string& body) {
    try {
      return parse(body, sig);
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line) + ": " + e.what());
    }
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string l = trim(raw);
    if (l.empty() || l.front() == '#') continue;
    std::string keyword = l.substr(0, l.find_first_of(" \t"));
    std::string rest = trim(std::string_view(l).substr(keyword.size()));
    auto fail = [&](const std::string& msg) { throw InputError("line " + std::to_string(line) + ": " + msg); };
    if (keyword == "congruence" || keyword == "parameter") {
      fail("'" + keyword + "' interpretations are not supported; only injective interpretations are");
    } else if (keyword == "component") {
      std::istringstream ws(rest);
      std::string name, dim;
      ws >> name >> dim;
      if (name.empty() || dim.rfind("dim=", 0) != 0) fail("expected 'component <name> dim=<d>'");
      std::size_t d = detail::parse_natural(dim.substr(4), line);
      std::string tail;
      std::getline(ws, tail);
      Component c{name, detail::default_vars("x", d), truth()};
      if (!trim(tail).empty()) {
        auto groups = detail::parse_var_groups(tail, line);
        if (groups.size() != 1 || groups.front().size() != d) fail("component variable list must have " + std::to_string(d) + " names");
        c.vars = groups.front();
      }
      spec.components.push_back(c);
      current = &spec.components.back();
    } else if (keyword == "universe") {
      if (!current) fail("universe before any component");
      if (!with_universe.insert(current->name).second) fail("second universe for component '" + current->name + "'");
      current->universe = formula_at(rest);
    } else if (keyword == "relation" || keyword == "origin") {
      auto def = rest.find(":=");
      if (def == std::string::npos) fail("missing ':='");
      std::string head = trim(std::string_view(rest).substr(0, def));
      Formula body = formula_at(rest.substr(def + 2));
      auto open = head.find('(');
      if (open == std::string::npos) fail("missing parenthesised list");
      std::istringstream ws(head.substr(0, open));
      if (keyword == "relation") {
        std::string sym, on;
        ws >> sym >> on;
        auto slash = sym.find('/');
        if (slash == std::string::npos || on != "on") fail("expected 'relation <R>/<arity> on (...)'");
        RelationFormula r;
        r.relation = sym.substr(0, slash);
        std::size_t arity = detail::parse_natural(sym.substr(slash + 1), line);
        auto close = head.find(')', open);
        if (close == std::string::npos) fail("unbalanced parentheses");
        r.components = detail::split_list(std::string_view(head).substr(open + 1, close - open - 1), ',');
        if (r.components.size() != arity) fail("relation '" + r.relation + "' lists " + std::to_string(r.components.size()) + " components for arity " + std::to_string(arity));
        std::string tail = trim(std::string_view(head).substr(close + 1));
        if (!tail.empty()) {
          r.vars = detail::parse_var_groups(tail, line);
        } else {
          for (std::size_t j = 0; j < arity; ++j) {
            if (!spec.has_component(r.components[j])) fail("unknown component '" + r.components[j] + "'");
            if (spec.component(r.components[j]).vars.size() != 1) fail("relation over components of dimension other than 1 needs a variable list");
            r.vars.push_back({"x" + std::to_string(j + 1)});
          }
        }
        r.formula = body;
        auto known = std::find_if(spec.relations.begin(), spec.relations.end(), [&](const auto& p) { return p.first == r.relation; });
        if (known == spec.relations.end())
          spec.relations.emplace_back(r.relation, arity);
        else if (known->second != arity)
          fail("relation '" + r.relation + "' used with two arities");
        spec.relation_formulas.push_back(r);
      } else {
        std::string name, from, source, index, bound;
        ws >> name >> from >> source >> index >> bound;
        if (from != "from" || index.rfind("index=", 0) != 0 || bound.rfind("bound=", 0) != 0)
          fail("expected 'origin <name> from <q> index=<i> bound=<N> (...)'");
        auto groups = detail::parse_var_groups(head.substr(open), line);
        if (groups.size() != 2) fail("origin variable list must be '(<source vars>;<vars>)'");
        Origin o{source, detail::parse_natural(index.substr(6), line), detail::parse_natural(bound.substr(6), line),
                 groups[0], groups[1], body};
        if (!spec.origins.emplace(name, o).second) fail("second origin for '" + name + "'");
      }
    } else {
      fail("unknown keyword '" + keyword + "'");
    }
  }
  for (const auto& c : spec.components)
    if (!with_universe.count(c.name)) throw InputError("component '" + c.name + "' has no universe");
  validate(spec);
  return spec;
}

inline std::string format_interpretation(const InterpretationSpec& spec, const Signature& sig) {
  std::string out;
  for (const auto& c : spec.components) {
    out += "component " + c.name + " dim=" + std::to_string(c.vars.size()) + " (" + detail::join(c.vars, ",") + ")\n";
    out += "universe " + render(c.universe, sig) + "\n";
  }
  for (const auto& r : spec.relation_formulas) {
    std::vector<std::string> groups;
    for (const auto& v : r.vars) groups.push_back(detail::join(v, ","));
    out += "relation " + r.relation + "/" + std::to_string(r.components.size()) + " on (" + detail::join(r.components, ",") +
           ") (" + detail::join(groups, ";") + ") := " + render(r.formula, sig) + "\n";
  }
  for (const auto& [name, o] : spec.origins) {
    out += "origin " + name + " from " + o.source + " index=" + std::to_string(o.index) + " bound=" + std::to_string(o.bound) +
           " (" + detail::join(o.source_vars, ",") + ";" + detail::join(o.vars, ",") + ") := " + render(o.reparam, sig) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output structures

struct OutputElement {
  std::string component;
  std::vector<std::size_t> tuple;
  friend auto operator<=>(const OutputElement&, const OutputElement&) = default;
};

struct OutputStructure {
  std::vector<OutputElement> elements;  // component order, then lexicographic
  std::map<std::string, std::set<std::vector<std::size_t>>> relations;  // tuples of element indices

  std::optional<std::size_t> find(const OutputElement& e) const {
    auto it = std::find(elements.begin(), elements.end(), e);
    if (it == elements.end()) return std::nullopt;
    return static_cast<std::size_t>(it - elements.begin());
  }
};

inline OutputStructure apply_interpretation(const InterpretationSpec& spec, const Word& w) {
  OutputStructure out;
  const auto positions = oracle::all_positions(w);
  std::map<std::string, std::vector<std::size_t>> members;
  for (const auto& c : spec.components) {
    oracle::Evaluator ev(c.universe, c.vars);
    oracle::for_each_tuple(positions, c.vars.size(), [&](const oracle::Tuple& t) {
      if (!ev(w, t)) return;
      members[c.name].push_back(out.elements.size());
      out.elements.push_back({c.name, t});
    });
  }
  for (const auto& [name, arity] : spec.relations) out.relations[name];
  for (const auto& r : spec.relation_formulas) {
    oracle::Evaluator ev(r.formula, r.joint_vars());
    const std::size_t l = r.components.size();
    std::vector<const std::vector<std::size_t>*> slots;
    for (const auto& q : r.components) slots.push_back(&members[q]);
    if (std::any_of(slots.begin(), slots.end(), [](auto* s) { return s->empty(); })) continue;
    std::vector<std::size_t> pick(l, 0);
    while (true) {
      std::vector<std::size_t> args, ids;
      for (std::size_t j = 0; j < l; ++j) {
        std::size_t id = (*slots[j])[pick[j]];
        ids.push_back(id);
        args.insert(args.end(), out.elements[id].tuple.begin(), out.elements[id].tuple.end());
      }
      if (ev(w, args)) out.relations[r.relation].insert(ids);
      std::size_t j = l;
      while (j > 0 && ++pick[j - 1] == slots[j - 1]->size()) pick[--j] = 0;
      if (j == 0) break;
    }
  }
  return out;
}

inline std::string dump(const OutputStructure& s) {
  std::string out;
  for (std::size_t i = 0; i < s.elements.size(); ++i) {
    std::vector<std::string> t;
    for (auto p : s.elements[i].tuple) t.push_back(std::to_string(p));
    out += "element " + std::to_string(i) + " " + s.elements[i].component + " (" + detail::join(t, ",") + ")\n";
  }
  for (const auto& [name, tuples] : s.relations) {
    for (const auto& ids : tuples) {
      std::vector<std::string> t;
      for (auto id : ids) t.push_back(std::to_string(id));
      out += name + " (" + detail::join(t, ",") + ")\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dimension reduction

struct InterpretationOptions {
  ReparamOptions reparam;
  std::size_t max_bound = 16;  // largest preimage bound expanded into components
};

// Minimal reparameterization of a component's universe over its declared
// variables (those absent from the universe range over all positions).
inline Reparameterization component_reparameterization(const Component& c, const Signature& sig,
                                                       const ReparamOptions& opts = {}) {
  NameSupply names;
  names.reserve(c.universe);
  for (const auto& v : c.vars) names.reserve(v);
  Formula padded = c.universe;
  auto present = free_variables(c.universe).fo;
  for (const auto& v : c.vars) {
    if (std::find(present.begin(), present.end(), v) != present.end()) continue;
    std::string u = names.fresh("u");
    padded = conj(padded, exists_fo(u, equal(u, v)));
  }
  return minimal_reparameterization(padded, sig, opts);
}

// Smallest d to which the interpretation reduces: the largest minimal
// dimension among its universes.
inline std::size_t minimal_dimension(const InterpretationSpec& spec, const Signature& sig,
                                     const ReparamOptions& opts = {}) {
  std::size_t d = 0;
  for (const auto& c : spec.components)
    if (!c.vars.empty()) d = std::max(d, component_reparameterization(c, sig, opts).dimension());
  return d;
}

inline InterpretationSpec reduce_interpretation(const InterpretationSpec& spec, std::size_t d, const Signature& sig,
                                                const InterpretationOptions& opts = {}) {
  validate(spec);
  if (!spec.origins.empty()) throw PreconditionError("reduce_interpretation: input is already a reduced interpretation");
  InterpretationSpec out;
  out.relations = spec.relations;
  std::map<std::string, std::vector<std::string>> slots_of;  // source component -> reduced names
  for (const auto& c : spec.components) {
    NameSupply names;
    names.reserve(c.universe);
    for (const auto& v : c.vars) names.reserve(v);
    Origin o;
    o.source = c.name;
    o.source_vars = c.vars;
    if (c.vars.size() <= d) {
      // already small enough: identity reparameterization with one preimage
      for (std::size_t i = 0; i < c.vars.size(); ++i) o.vars.push_back(names.fresh("y"));
      std::vector<Formula> parts{c.universe};
      for (std::size_t i = 0; i < c.vars.size(); ++i) parts.push_back(equal(o.vars[i], c.vars[i]));
      o.reparam = equalities_first(simplify(conj_all(parts)));
      o.bound = 1;
    } else {
      // the domain order of rep is irrelevant: selection uses c.vars
      Reparameterization rep = component_reparameterization(c, sig, opts.reparam);
      if (rep.dimension() > d)
        throw PreconditionError("component '" + c.name + "' has minimal dimension " + std::to_string(rep.dimension()) +
                                ", more than " + std::to_string(d));
      if (rep.bound > Bound(opts.max_bound))
        throw ResourceLimit("component '" + c.name + "': preimage bound " + rep.bound.str() + " exceeds " +
                            std::to_string(opts.max_bound));
      std::map<std::string, std::string> ren;
      for (const auto& y : rep.image) {
        o.vars.push_back(names.fresh("y"));
        ren[y] = o.vars.back();
      }
      o.reparam = equalities_first(substitute(rep.g, ren));
      o.bound = static_cast<std::size_t>(rep.bound);
    }
    for (std::size_t i = 1; i <= o.bound; ++i) {
      Origin oi = o;
      oi.index = i;
      Formula selected = simplify(exists_all(c.vars, origin_selector(oi)));
      std::string name = c.name + "_" + std::to_string(i);
      if (o.bound == 1 && c.vars.size() <= d)  // untouched component: same universe, renamed
        selected = substitute(c.universe, [&] {
          std::map<std::string, std::string> m;
          for (std::size_t j = 0; j < c.vars.size(); ++j) m[c.vars[j]] = o.vars[j];
          return m;
        }());
      out.components.push_back({name, o.vars, selected});
      out.origins[name] = oi;
      slots_of[c.name].push_back(name);
    }
  }

  for (const auto& r : spec.relation_formulas) {
    const std::size_t l = r.components.size();
    std::vector<std::size_t> pick(l, 0);
    if (std::any_of(r.components.begin(), r.components.end(), [&](const auto& q) { return slots_of[q].empty(); })) continue;
    while (true) {
      NameSupply names;
      names.reserve(r.formula);
      for (const auto& v : r.joint_vars()) names.reserve(v);
      RelationFormula nr;
      nr.relation = r.relation;
      std::vector<Formula> parts;
      std::vector<std::string> bound;
      std::map<std::string, std::string> direct;  // slot variables identified with new ones
      for (std::size_t j = 0; j < l; ++j) {
        const std::string& slot = slots_of[r.components[j]][pick[j]];
        const Origin& o = out.origins.at(slot);
        std::vector<std::string> ys;
        for (std::size_t i = 0; i < o.vars.size(); ++i) ys.push_back(names.fresh("y"));
        nr.components.push_back(slot);
        nr.vars.push_back(ys);
        const bool identity = o.bound == 1 && o.source_vars.size() == o.vars.size() && spec.component(o.source).vars.size() <= d;
        if (identity) {
          for (std::size_t i = 0; i < ys.size(); ++i) direct[r.vars[j][i]] = ys[i];
          continue;
        }
        std::map<std::string, std::string> ren;
        for (std::size_t i = 0; i < o.source_vars.size(); ++i) ren[o.source_vars[i]] = r.vars[j][i];
        for (std::size_t i = 0; i < o.vars.size(); ++i) ren[o.vars[i]] = ys[i];
        parts.push_back(substitute(origin_selector(o), ren));
        bound.insert(bound.end(), r.vars[j].begin(), r.vars[j].end());
      }
      parts.push_back(r.formula);
      nr.formula = simplify(substitute(exists_all(bound, conj_all(parts)), direct));
      out.relation_formulas.push_back(nr);
      std::size_t j = l;
      while (j > 0 && ++pick[j - 1] == slots_of[r.components[j - 1]].size()) pick[--j] = 0;
      if (j == 0) break;
    }
  }
  validate(out);
  return out;
}

// ---------------------------------------------------------------------------
// Equivalence

struct EquivalenceReport {
  bool ok = true;
  std::size_t words_checked = 0;
  std::string word;    // first failing word
  std::string detail;  // what failed there
};

// Checks, on every word up to max_len, that the map from b's elements to a's
// elements is a relation-preserving bijection. The map follows b's origin
// records (element y of (q, i) goes to the i-th preimage of y); without
// origins it is the identity on (component, tuple).
inline EquivalenceReport check_equivalence(const InterpretationSpec& a, const InterpretationSpec& b, std::size_t max_len,
                                           const Signature& sig) {
  EquivalenceReport rep;
  auto sorted_relations = [](auto r) {
    std::sort(r.begin(), r.end());
    return r;
  };
  if (sorted_relations(a.relations) != sorted_relations(b.relations)) {
    rep.ok = false;
    rep.detail = "output signatures differ";
    return rep;
  }
  std::map<std::string, oracle::Evaluator> selectors;
  for (const auto& [name, o] : b.origins) {
    std::vector<std::string> joint = o.source_vars;
    joint.insert(joint.end(), o.vars.begin(), o.vars.end());
    selectors.emplace(name, oracle::Evaluator(origin_selector(o), joint));
  }
  std::map<std::string, oracle::Evaluator> preimages;
  for (const auto& [name, o] : b.origins) {
    std::vector<std::string> joint = o.source_vars;
    joint.insert(joint.end(), o.vars.begin(), o.vars.end());
    preimages.emplace(name, oracle::Evaluator(o.reparam, joint));
  }
  // per word: empty string when the map is a relation-preserving bijection
  auto check_word = [&](const Word& w) -> std::string {
    OutputStructure sa = apply_interpretation(a, w), sb = apply_interpretation(b, w);
    if (sa.elements.size() != sb.elements.size())
      return "element counts differ: " + std::to_string(sa.elements.size()) + " vs " + std::to_string(sb.elements.size());
    const auto positions = oracle::all_positions(w);
    std::vector<std::size_t> pi(sb.elements.size());
    std::vector<char> hit(sa.elements.size(), 0);
    for (std::size_t e = 0; e < sb.elements.size(); ++e) {
      const OutputElement& el = sb.elements[e];
      OutputElement target;
      auto it = b.origins.find(el.component);
      if (it == b.origins.end()) {
        target = el;
      } else {
        const Origin& o = it->second;
        target.component = o.source;
        std::size_t found = 0, preimage_count = 0;
        oracle::for_each_tuple(positions, o.source_vars.size(), [&](const oracle::Tuple& x) {
          oracle::Tuple joint = x;
          joint.insert(joint.end(), el.tuple.begin(), el.tuple.end());
          if (preimages.at(el.component)(w, joint)) ++preimage_count;
          if (selectors.at(el.component)(w, joint) && found++ == 0) target.tuple = x;
        });
        if (preimage_count > o.bound)
          return el.component + ": " + std::to_string(preimage_count) + " preimages exceed the bound " + std::to_string(o.bound);
        if (found != 1) return el.component + ": element has " + std::to_string(found) + " selected preimages";
      }
      auto idx = sa.find(target);
      if (!idx) return el.component + ": image of an element is not an element of the source output";
      if (hit[*idx]++) return el.component + ": two elements map to the same source element";
      pi[e] = *idx;
    }
    for (const auto& [name, arity] : a.relations) {
      std::set<std::vector<std::size_t>> mapped;
      for (const auto& ids : sb.relations[name]) {
        std::vector<std::size_t> m;
        for (auto id : ids) m.push_back(pi[id]);
        mapped.insert(m);
      }
      if (mapped != sa.relations[name]) return "relation " + name + " is not preserved";
    }
    return {};
  };

  const std::vector<Word> words = oracle::enumerate_words(sig, max_len);
  std::vector<std::string> failures(words.size());
  std::atomic<std::size_t> next{0}, first_failure{words.size()};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < words.size();) {
      if (i > first_failure.load()) continue;
      failures[i] = check_word(words[i]);
      if (failures[i].empty()) continue;
      std::size_t cur = first_failure.load();
      while (i < cur && !first_failure.compare_exchange_weak(cur, i)) {
      }
    }
  };
  unsigned threads = std::max(1U, std::min<unsigned>(std::thread::hardware_concurrency(), 16));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  const std::size_t f = first_failure.load();
  rep.words_checked = f < words.size() ? f + 1 : words.size();
  if (f < words.size()) {
    rep.ok = false;
    rep.word = render_word(words[f], sig);
    rep.detail = failures[f];
  }
  return rep;
}

}  // namespace chainrep
