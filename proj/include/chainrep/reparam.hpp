#pragma once

// Minimal functional reparameterizations.
//
// A formula is split into order cases; each case is a formula psi(z1<...<zk)
// whose accepting segment-type tuples (tau0, tau1, ..., tauk) form its local
// normal form. If one tuple has every adjacent pair pumpable the trivial
// reparameterization is minimal. Otherwise some variable is eliminated (the
// pair around it is not pumpable), the projection is reparameterized
// recursively, and the two steps are composed.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "chainrep/bound.hpp"
#include "chainrep/compiler.hpp"
#include "chainrep/error.hpp"
#include "chainrep/formula.hpp"
#include "chainrep/monoid.hpp"
#include "chainrep/oracle.hpp"
#include "chainrep/type_formula.hpp"

namespace chainrep {

using Json = nlohmann::ordered_json;

struct ReparamOptions {
  CompileOptions compile;
  MonoidOptions monoid;
  std::size_t tighten_cap = 8;  // largest preimage count probed exactly
  std::size_t max_disjuncts = 1'000'000;
};

inline const std::vector<std::string>& erratum_notes() {
  static const std::vector<std::string> notes = {
      "variable x_i is eliminated when the pair (tau_{i-1}, tau_i) of segment types meeting at x_i is not pumpable",
      "a segment type records the segment read both with and without a mark on its first letter",
      "pumping idempotents must be realized by a nonempty unmarked word",
  };
  return notes;
}

inline Json bound_json(const Bound& b) {
  if (b <= Bound(std::numeric_limits<std::uint64_t>::max())) return b.convert_to<std::uint64_t>();
  return b.str();
}

// ---------------------------------------------------------------------------
// Local normal form

struct Disjunct {
  std::vector<Element> types;  // tau0 (unmarked prefix), tau1..tauk (segments starting at marks)
  friend bool operator==(const Disjunct&, const Disjunct&) = default;
  friend auto operator<=>(const Disjunct&, const Disjunct&) = default;
};

// Accepting segment-type tuples of psi(z1<...<zk), explored layer by layer:
// layer i holds the state entering segment i and the type of that segment.
class TypeAnalysis {
 public:
  TypeAnalysis(const Formula& psi, std::vector<std::string> vars, const Signature& sig, const ReparamOptions& opts = {})
      : vars_(std::move(vars)),
        dfa_(compile(psi, vars_, sig, opts.compile)),
        seg_(segment_monoid(dfa_, opts.monoid)),
        pump_(seg_) {
    build();
  }

  const Dfa& dfa() const noexcept { return dfa_; }
  const TypeMonoid& monoid() const noexcept { return seg_; }
  const PumpTable& pump() const noexcept { return pump_; }
  std::size_t arity() const noexcept { return vars_.size(); }
  const std::vector<std::string>& vars() const noexcept { return vars_; }

  bool satisfiable() const { return live_[0][dfa_.initial()] != 0; }
  bool pumpable(Element a, Element b) const { return pump_(a, b); }

  bool allowed(std::size_t layer, Element t) const { return layer == 0 || t != TypeMonoid::identity(); }

  std::uint32_t advance(std::size_t layer, std::uint32_t q, Element t) const {
    const auto n = static_cast<std::uint32_t>(dfa_.states());
    return seg_.apply(t, layer == 0 ? done_point(dfa_, q) : pending_point(q)) - n;
  }

  // Node (layer, q, t) lies on some accepting tuple path.
  bool valid(std::size_t layer, std::uint32_t q, Element t) const {
    return reach_[layer][q] && allowed(layer, t) && live_[layer + 1][advance(layer, q, t)];
  }

  std::vector<std::size_t> eliminable(const Disjunct& d) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < d.types.size(); ++i)
      if (!pumpable(d.types[i - 1], d.types[i])) out.push_back(i);
    return out;
  }

  bool accepts(const Disjunct& d) const {
    if (d.types.size() != arity() + 1) return false;
    std::uint32_t q = dfa_.initial();
    for (std::size_t i = 0; i < d.types.size(); ++i) {
      if (!allowed(i, d.types[i])) return false;
      q = advance(i, q, d.types[i]);
    }
    return dfa_.accepting(q);
  }

  // All accepting tuples, lexicographic by element index.
  std::vector<Disjunct> disjuncts(std::size_t budget) const {
    std::vector<Disjunct> out;
    Disjunct cur;
    cur.types.resize(arity() + 1);
    enumerate(0, dfa_.initial(), cur, out, budget);
    return out;
  }

  Bound disjunct_count() const {
    const std::size_t n = dfa_.states();
    std::vector<Bound> next(n), cur(n);
    for (std::uint32_t q = 0; q < n; ++q) next[q] = dfa_.accepting(q) ? 1 : 0;
    for (std::size_t layer = arity() + 1; layer-- > 0;) {
      for (std::uint32_t q = 0; q < n; ++q) {
        cur[q] = 0;
        for (Element t = 0; t < seg_.size(); ++t)
          if (allowed(layer, t)) cur[q] += next[advance(layer, q, t)];
      }
      next.swap(cur);
    }
    return next[dfa_.initial()];
  }

  // Indices (1-based) eliminable in every accepting tuple.
  std::vector<std::size_t> uniformly_eliminable() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i <= arity(); ++i)
      if (!any_edge(i, [&](Element a, Element b) { return pumpable(a, b); }, false)) out.push_back(i);
    return out;
  }

  // Distinct pairs (tau_{i-1}, tau_i) at index i over all tuples, or over the
  // tuples whose earlier pairs are all pumpable when prefix_pumpable is set.
  std::set<std::pair<Element, Element>> pairs_at(std::size_t i, bool prefix_pumpable) const {
    std::set<std::pair<Element, Element>> out;
    any_edge(i, [&](Element a, Element b) {
      if (!prefix_pumpable || !pumpable(a, b)) out.emplace(a, b);
      return false;
    }, prefix_pumpable);
    return out;
  }

  // Least index of a non-pumpable pair, over all tuples, grouped; sorted.
  std::vector<std::size_t> groups() const {
    std::vector<std::size_t> out;
    for (std::size_t p = 1; p <= arity(); ++p)
      if (any_edge(p, [&](Element a, Element b) { return !pumpable(a, b); }, true)) out.push_back(p);
    return out;
  }

  // Lexicographically least tuple with every adjacent pair pumpable.
  std::optional<Disjunct> all_pumpable_disjunct() const {
    Disjunct cur;
    cur.types.resize(arity() + 1);
    std::set<std::tuple<std::size_t, std::uint32_t, Element>> dead;
    if (search_pumpable(0, dfa_.initial(), cur, dead)) return cur;
    return std::nullopt;
  }

  // Preimage certificate for eliminating index i over the given pairs: a
  // pair whose left segment is empty admits one position; any other pair
  // admits fewer than ramsey_bound(|monoid|) positions.
  Bound certificate(const std::set<std::pair<Element, Element>>& pairs) const {
    Bound per_pair = ramsey_bound_big(seg_.size()) - 1;
    Bound total = 0;
    bool empty_left = false;
    for (const auto& [a, b] : pairs) {
      (void)b;
      if (a == TypeMonoid::identity())
        empty_left = true;
      else
        total += per_pair;
    }
    return total + (empty_left ? 1 : 0);
  }

 private:
  void build() {
    const std::size_t n = dfa_.states(), k = arity();
    reach_.assign(k + 2, std::vector<char>(n, 0));
    live_.assign(k + 2, std::vector<char>(n, 0));
    reach_[0][dfa_.initial()] = 1;
    for (std::size_t layer = 0; layer <= k; ++layer)
      for (std::uint32_t q = 0; q < n; ++q)
        if (reach_[layer][q])
          for (Element t = 0; t < seg_.size(); ++t)
            if (allowed(layer, t)) reach_[layer + 1][advance(layer, q, t)] = 1;
    for (std::uint32_t q = 0; q < n; ++q) live_[k + 1][q] = dfa_.accepting(q);
    for (std::size_t layer = k + 1; layer-- > 0;)
      for (std::uint32_t q = 0; q < n; ++q)
        for (Element t = 0; t < seg_.size() && !live_[layer][q]; ++t)
          if (allowed(layer, t) && live_[layer + 1][advance(layer, q, t)]) live_[layer][q] = 1;
  }

  void enumerate(std::size_t layer, std::uint32_t q, Disjunct& cur, std::vector<Disjunct>& out, std::size_t budget) const {
    for (Element t = 0; t < seg_.size(); ++t) {
      if (!valid(layer, q, t)) continue;
      cur.types[layer] = t;
      if (layer == arity()) {
        if (out.size() >= budget)
          throw ResourceLimit("local normal form: more than " + std::to_string(budget) + " disjuncts");
        out.push_back(cur);
      } else {
        enumerate(layer + 1, advance(layer, q, t), cur, out, budget);
      }
    }
  }

  bool search_pumpable(std::size_t layer, std::uint32_t q, Disjunct& cur,
                       std::set<std::tuple<std::size_t, std::uint32_t, Element>>& dead) const {
    for (Element t = 0; t < seg_.size(); ++t) {
      if (!valid(layer, q, t)) continue;
      if (layer > 0 && !pumpable(cur.types[layer - 1], t)) continue;
      if (dead.count({layer, q, t})) continue;
      cur.types[layer] = t;
      if (layer == arity() || search_pumpable(layer + 1, advance(layer, q, t), cur, dead)) return true;
      dead.insert({layer, q, t});
    }
    return false;
  }

  // Visits valid edges between layer i-1 and layer i; stops when visit returns
  // true. With prefix_pumpable, the layer i-1 node must be reachable through
  // pumpable pairs only.
  template <class Visit>
  bool any_edge(std::size_t i, Visit visit, bool prefix_pumpable) const {
    const std::size_t n = dfa_.states();
    // frontier: (state entering layer, type at layer) valid nodes
    std::set<std::pair<std::uint32_t, Element>> frontier;
    for (Element t = 0; t < seg_.size(); ++t)
      if (valid(0, dfa_.initial(), t)) frontier.emplace(dfa_.initial(), t);
    for (std::size_t layer = 1; layer < i; ++layer) {
      std::set<std::pair<std::uint32_t, Element>> next;
      if (!prefix_pumpable) {
        for (std::uint32_t q = 0; q < n; ++q)
          for (Element t = 0; t < seg_.size(); ++t)
            if (valid(layer, q, t)) next.emplace(q, t);
      } else {
        for (const auto& [q, a] : frontier) {
          std::uint32_t q2 = advance(layer - 1, q, a);
          for (Element t = 0; t < seg_.size(); ++t)
            if (valid(layer, q2, t) && pumpable(a, t)) next.emplace(q2, t);
        }
      }
      frontier.swap(next);
    }
    if (!prefix_pumpable && i > 1) {
      frontier.clear();
      for (std::uint32_t q = 0; q < n; ++q)
        for (Element t = 0; t < seg_.size(); ++t)
          if (valid(i - 1, q, t)) frontier.emplace(q, t);
    }
    for (const auto& [q, a] : frontier) {
      std::uint32_t q2 = advance(i - 1, q, a);
      for (Element t = 0; t < seg_.size(); ++t)
        if (valid(i, q2, t) && visit(a, t)) return true;
    }
    return false;
  }

  std::vector<std::string> vars_;
  Dfa dfa_;
  TypeMonoid seg_;
  PumpTable pump_;
  std::vector<std::vector<char>> reach_, live_;  // per layer, per state
};

inline std::vector<Disjunct> local_normal_form(const Formula& f, const std::vector<std::string>& vars,
                                               const Signature& sig, const ReparamOptions& opts = {}) {
  return TypeAnalysis(f, vars, sig, opts).disjuncts(opts.max_disjuncts);
}

inline std::vector<std::size_t> eliminable_pairs(const TypeAnalysis& a, const Disjunct& d) { return a.eliminable(d); }

// ---------------------------------------------------------------------------
// Reparameterizations

// g = body & image[j] = domain[selected[j]] for every j
struct Projection {
  Formula body;
  std::vector<std::size_t> selected;
};

struct Reparameterization {
  Formula source;
  std::vector<std::string> domain;
  std::vector<std::string> image;
  Formula g = falsity();
  Bound bound = 0;
  bool trivial = false;  // g = source & image = domain
  std::optional<Projection> projection;
  Json provenance;

  std::size_t dimension() const noexcept { return image.size(); }
};

inline Formula projection_formula(const Projection& p, const std::vector<std::string>& domain,
                                  const std::vector<std::string>& image) {
  std::vector<Formula> parts{p.body};
  for (std::size_t j = 0; j < image.size(); ++j) parts.push_back(equal(image[j], domain[p.selected[j]]));
  return simplify(conj_all(parts));
}

inline Reparameterization unsatisfiable_reparameterization(const Formula& f, std::vector<std::string> domain) {
  Reparameterization r;
  r.source = f;
  r.domain = std::move(domain);
  r.g = falsity();
  r.bound = 0;
  r.provenance = Json{{"step", "unsatisfiable"}};
  return r;
}

inline Reparameterization trivial_reparameterization(const Formula& f, std::vector<std::string> domain,
                                                     std::vector<std::string> image) {
  if (domain.size() != image.size()) throw PreconditionError("trivial reparameterization: arity mismatch");
  Reparameterization r;
  r.source = f;
  r.domain = std::move(domain);
  r.image = std::move(image);
  Projection p{f, {}};
  for (std::size_t j = 0; j < r.image.size(); ++j) p.selected.push_back(j);
  r.g = projection_formula(p, r.domain, r.image);
  r.projection = p;
  r.bound = 1;
  r.trivial = true;
  r.provenance = Json{{"step", "trivial"}, {"dimension", r.image.size()}};
  return r;
}

// Guarded union; dimensions are equalized by repeating the last image
// variable (or the first domain variable when a part has none). With
// exclusive guards no first-match negation is added.
inline Reparameterization combine_disjuncts(const std::vector<std::pair<Formula, Reparameterization>>& parts,
                                           const Formula& source, const std::vector<std::string>& domain,
                                           NameSupply& names, bool exclusive = false) {
  if (parts.empty()) return unsatisfiable_reparameterization(source, domain);
  std::size_t d = 0;
  for (const auto& [guard, rep] : parts) {
    (void)guard;
    if (rep.domain != domain) throw PreconditionError("combine_disjuncts: part domain mismatch");
    d = std::max(d, rep.dimension());
  }
  if (d > 0 && domain.empty()) throw PreconditionError("combine_disjuncts: padding needs a domain variable");
  Reparameterization out;
  out.source = source;
  out.domain = domain;
  if (parts.size() == 1 && parts.front().second.dimension() == d && parts.front().first.op() == Op::True) {
    out = parts.front().second;
    out.source = source;
    return out;
  }
  for (const auto& [guard, rep] : parts) {
    (void)guard;
    names.reserve(rep.g);
  }
  for (std::size_t j = 0; j < d; ++j) out.image.push_back(names.fresh("w"));
  std::vector<Formula> alternatives, earlier;
  Json steps = Json::array();
  for (const auto& [guard, rep] : parts) {
    std::map<std::string, std::string> ren;
    for (std::size_t j = 0; j < rep.dimension(); ++j) ren[rep.image[j]] = out.image[j];
    std::vector<Formula> conj_parts;
    if (!exclusive)
      for (const auto& e : earlier) conj_parts.push_back(negate(e));
    conj_parts.push_back(guard);
    conj_parts.push_back(substitute(rep.g, ren));
    for (std::size_t j = rep.dimension(); j < d; ++j)
      conj_parts.push_back(equal(out.image[j], rep.dimension() ? out.image[rep.dimension() - 1] : domain.front()));
    alternatives.push_back(simplify(conj_all(conj_parts)));
    earlier.push_back(guard);
    out.bound += rep.bound;
    steps.push_back(rep.provenance);
  }
  out.g = simplify(disj_all(alternatives));
  out.provenance = Json{{"step", "disj-combine"}, {"dimension", d}, {"bound", bound_json(out.bound)}, {"parts", steps}};
  return out;
}

// Composite of g (domain xs -> image ws) and h (domain ws -> image us).
inline Reparameterization compose(const Reparameterization& g, const Reparameterization& h) {
  if (h.domain != g.image) throw PreconditionError("compose: variable-arity mismatch between the two steps");
  Reparameterization out;
  out.source = g.source;
  out.domain = g.domain;
  out.image = h.image;
  out.bound = g.bound * h.bound;
  out.provenance = Json{{"step", "compose"}, {"bound", bound_json(out.bound)}, {"steps", Json::array({g.provenance, h.provenance})}};
  if (h.trivial && g.projection) {
    out.projection = g.projection;
    out.g = projection_formula(*out.projection, out.domain, out.image);
    return out;
  }
  if (g.projection) {
    std::map<std::string, std::string> to_domain;
    for (std::size_t j = 0; j < g.image.size(); ++j) to_domain[g.image[j]] = g.domain[g.projection->selected[j]];
    if (h.projection) {
      Projection p{simplify(conj(g.projection->body, substitute(h.projection->body, to_domain))), {}};
      for (auto s : h.projection->selected) p.selected.push_back(g.projection->selected[s]);
      out.projection = p;
      out.g = projection_formula(p, out.domain, out.image);
    } else {
      out.g = simplify(conj(g.projection->body, substitute(h.g, to_domain)));
    }
    return out;
  }
  out.g = simplify(exists_all(g.image, conj(g.g, h.g)));
  return out;
}

// ---------------------------------------------------------------------------
// The recursive procedure

class Reparameterizer {
 public:
  Reparameterizer(const Signature& sig, ReparamOptions opts) : sig_(sig), opts_(std::move(opts)) {}

  Reparameterization run(const Formula& f) {
    auto fv = free_variables(f);
    if (!fv.so.empty()) throw PreconditionError("reparameterization: free set variable '" + fv.so.front() + "'");
    names_.reserve(f);
    Reparameterization r = general(f, fv.fo);
    // readable image names
    NameSupply final_names;
    final_names.reserve(f);
    std::map<std::string, std::string> ren;
    std::vector<std::string> image;
    for (const auto& v : r.image) {
      image.push_back(final_names.fresh("y"));
      ren[v] = image.back();
    }
    r.g = substitute(r.g, ren);
    r.image = image;
    r.source = f;
    return r;
  }

  // psi over vars in any order.
  Reparameterization general(const Formula& psi, const std::vector<std::string>& vars) {
    if (vars.empty()) return sentence(psi);
    std::vector<std::pair<Formula, Reparameterization>> parts;
    Json cases = Json::array();
    for (const auto& oc : order_case_split(psi, vars)) {
      auto reps = oc.order.representatives();
      if (dfa_empty(compile(oc.formula, reps, sig_, opts_.compile))) continue;
      Reparameterization r = ascending(oc.formula, reps);
      cases.push_back(Json{{"order", oc.order.describe()}, {"result", r.provenance}});
      parts.emplace_back(truth(), lift(r, oc.order, vars, psi));
    }
    if (parts.empty()) return unsatisfiable_reparameterization(psi, vars);
    Reparameterization out = combine_disjuncts(parts, psi, vars, names_, true);
    out.provenance = Json{{"step", "order-split"}, {"cases", cases}, {"dimension", out.dimension()}, {"bound", bound_json(out.bound)}};
    return out;
  }

  // psi implies zs[0] < zs[1] < ... and is satisfiable.
  Reparameterization ascending(const Formula& psi, const std::vector<std::string>& zs) {
    if (zs.empty()) return sentence(psi);
    TypeAnalysis a(psi, zs, sig_, opts_);
    if (!a.satisfiable()) return unsatisfiable_reparameterization(psi, zs);
    Json info{{"monoid_size", a.monoid().size()}, {"disjuncts", bound_json(a.disjunct_count())}};
    if (a.all_pumpable_disjunct()) {
      Reparameterization r = trivial_reparameterization(psi, zs, fresh_tuple(zs.size()));
      r.provenance["reason"] = "some disjunct has every adjacent pair pumpable";
      r.provenance["normal_form"] = info;
      return r;
    }
    auto uniform = a.uniformly_eliminable();
    if (!uniform.empty()) {
      std::size_t i = uniform.front();
      Reparameterization r = eliminate_and_recurse(psi, zs, i, a.certificate(a.pairs_at(i, false)));
      r.provenance["normal_form"] = info;
      return r;
    }
    // no index is eliminable in every disjunct: split by least eliminable index
    std::vector<std::pair<Formula, Reparameterization>> parts;
    TypeGroupFormula types(a.monoid(), a.pump(), zs, names_);
    for (std::size_t p : a.groups()) {
      Formula part = simplify(conj(psi, types.group(p)));
      Reparameterization r = eliminate_and_recurse(part, zs, p, a.certificate(a.pairs_at(p, true)));
      r.provenance["group"] = p;
      parts.emplace_back(truth(), r);
    }
    Reparameterization out = combine_disjuncts(parts, psi, zs, names_, true);
    out.provenance["strategy"] = "type-groups";
    out.provenance["type_classes"] = types.classes();
    out.provenance["normal_form"] = info;
    return out;
  }

  // Projection-form step dropping zs[i-1]; bound is the exact maximum number
  // of positions for zs[i-1] when probing succeeds, else the certificate.
  Reparameterization eliminate(const Formula& psi, const std::vector<std::string>& zs, std::size_t i, const Bound& certificate) {
    if (i == 0 || i > zs.size()) throw PreconditionError("eliminate_variable: index out of range");
    Reparameterization r;
    r.source = psi;
    r.domain = zs;
    r.image = fresh_tuple(zs.size() - 1);
    Projection p{psi, {}};
    for (std::size_t j = 0; j < zs.size(); ++j)
      if (j != i - 1) p.selected.push_back(j);
    r.projection = p;
    r.g = projection_formula(p, r.domain, r.image);
    auto exact = max_choices(psi, zs, i, certificate);
    r.bound = exact ? Bound(*exact) : certificate;
    r.provenance = Json{{"step", "eliminate"},
                        {"index", i},
                        {"variable", zs[i - 1]},
                        {"pair", "(tau_" + std::to_string(i - 1) + ", tau_" + std::to_string(i) + ")"},
                        {"certificate", bound_json(certificate)},
                        {"bound", bound_json(r.bound)},
                        {"bound_exact", exact.has_value()}};
    return r;
  }

  // Largest number of positions for zs[i-1] with the other variables fixed,
  // when it is at most min(cap, certificate) and the probes fit the budget.
  std::optional<std::size_t> max_choices(const Formula& psi, const std::vector<std::string>& zs, std::size_t i,
                                         const Bound& certificate) {
    std::size_t cap = opts_.tighten_cap;
    if (certificate < Bound(cap)) cap = certificate.convert_to<std::size_t>();
    std::vector<std::string> others;
    for (std::size_t j = 0; j < zs.size(); ++j)
      if (j != i - 1) others.push_back(zs[j]);
    NameSupply local;
    local.reserve(psi);
    std::string c = local.fresh("c");
    Formula moved = substitute(psi, {{zs[i - 1], c}});
    try {
      for (std::size_t count = 2; count <= cap; ++count)
        if (!satisfiable(exists_all(others, at_least(count, c, moved)), sig_, opts_.compile)) return count - 1;
    } catch (const ResourceLimit&) {
      return std::nullopt;
    }
    if (Bound(cap) == certificate) return cap;
    return std::nullopt;
  }

 private:
  Reparameterization sentence(const Formula& psi) {
    if (!satisfiable(psi, sig_, opts_.compile)) return unsatisfiable_reparameterization(psi, {});
    Reparameterization r = trivial_reparameterization(psi, {}, {});
    r.provenance = Json{{"step", "sentence"}};
    return r;
  }

  std::vector<std::string> fresh_tuple(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < n; ++j) out.push_back(names_.fresh("w"));
    return out;
  }

  Reparameterization eliminate_and_recurse(const Formula& psi, const std::vector<std::string>& zs, std::size_t i,
                                           const Bound& certificate) {
    Reparameterization step = eliminate(psi, zs, i, certificate);
    std::map<std::string, std::string> ren;
    for (std::size_t j = 0, w = 0; j < zs.size(); ++j)
      if (j != i - 1) ren[zs[j]] = step.image[w++];
    Formula projected = simplify(exists_fo(zs[i - 1], substitute(psi, ren)));
    names_.reserve(projected);
    Reparameterization rest = ascending(projected, step.image);
    Reparameterization out = compose(step, rest);
    if (out.projection) {
      // psi already implies its own projection
      std::map<std::string, std::string> back;
      for (const auto& [z, w] : ren) back[w] = z;
      out.projection->body = simplify(drop_conjunct(out.projection->body, substitute(projected, back)));
      if (out.projection->body.op() == Op::True) out.projection->body = psi;
      out.g = projection_formula(*out.projection, out.domain, out.image);
    }
    return out;
  }

  // Reparameterization over representatives, re-expressed over all variables.
  Reparameterization lift(const Reparameterization& r, const VariableOrderCase& oc, const std::vector<std::string>& vars,
                          const Formula& source) {
    std::vector<Formula> eqs;
    for (const auto& cls : oc.classes)
      for (std::size_t j = 1; j < cls.size(); ++j) eqs.push_back(equal(cls[j], cls.front()));
    Reparameterization out = r;
    out.source = source;
    out.domain = vars;
    out.trivial = false;
    out.g = simplify(conj(conj_all(eqs), r.g));
    if (r.projection) {
      Projection p{simplify(conj(conj_all(eqs), r.projection->body)), {}};
      for (auto s : r.projection->selected)
        p.selected.push_back(static_cast<std::size_t>(std::find(vars.begin(), vars.end(), r.domain[s]) - vars.begin()));
      out.projection = p;
    }
    return out;
  }

  const Signature& sig_;
  ReparamOptions opts_;
  NameSupply names_;
};

inline Reparameterization minimal_reparameterization(const Formula& f, const Signature& sig, ReparamOptions opts = {}) {
  return Reparameterizer(sig, std::move(opts)).run(f);
}

inline bool decide_dimension(const Formula& f, std::size_t m, const Signature& sig, ReparamOptions opts = {}) {
  return minimal_reparameterization(f, sig, std::move(opts)).dimension() <= m;
}

// True when f implies vars[0] < vars[1] < ... on every word.
inline bool implies_ascending(const Formula& f, const std::vector<std::string>& vars, const Signature& sig,
                              CompileOptions opts = {}) {
  TrackDfa t = compile_tracks(conj(f, negate(ascending(vars))), sig, opts);
  const Automaton& a = t.automaton;
  for (std::uint32_t s = 0; s < a.states; ++s)
    if (a.accepts(s)) return false;  // minimized: every state is reachable
  return true;
}

// Single elimination step on a formula whose free variables (in first
// occurrence order) are ascending; index i must be eliminable in every disjunct.
inline Reparameterization eliminate_variable(const Formula& f, std::size_t i, const Signature& sig,
                                             ReparamOptions opts = {}) {
  auto vars = free_variables(f).fo;
  if (i == 0 || i > vars.size()) throw PreconditionError("eliminate_variable: index out of range");
  if (!implies_ascending(f, vars, sig, opts.compile))
    throw PreconditionError("eliminate_variable: formula does not order its free variables ascending");
  TypeAnalysis a(f, vars, sig, opts);
  auto uniform = a.uniformly_eliminable();
  if (std::find(uniform.begin(), uniform.end(), i) == uniform.end())
    throw PreconditionError("eliminate_variable: index " + std::to_string(i) + " is pumpable in some disjunct");
  Reparameterizer engine(sig, opts);
  return engine.eliminate(f, vars, i, a.certificate(a.pairs_at(i, false)));
}

inline Json report_json(const Reparameterization& r, const Signature& sig) {
  return Json{{"formula", render(r.source, sig)},
              {"signature", sig.to_string()},
              {"domain", r.domain},
              {"image", r.image},
              {"dimension", r.dimension()},
              {"bound", bound_json(r.bound)},
              {"reparameterization", render(r.g, sig)},
              {"provenance", r.provenance},
              {"erratum_notes", erratum_notes()}};
}

}  // namespace chainrep

namespace chainrep::oracle {

inline ReparamCheck check_reparameterization(const Reparameterization& r, const Signature& sig, std::size_t max_len) {
  return check_reparameterization(r.source, r.domain, r.g, r.image, r.bound, sig, max_len);
}

}  // namespace chainrep::oracle
