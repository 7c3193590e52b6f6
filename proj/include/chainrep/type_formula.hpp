#pragma once

// MSO formulas asserting facts about the segment types of marked variables.
//
// The segment monoid is coarsened to the least right congruence that still
// determines pumpability of pairs; a run of the resulting automaton (reset at
// every marked variable) is encoded by ceil(log2 #classes) set variables.
// Such formulas select disjunct groups when no variable can be eliminated
// uniformly across an order case.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "chainrep/compiler.hpp"
#include "chainrep/formula.hpp"
#include "chainrep/monoid.hpp"

namespace chainrep {

// Classes of segment-monoid elements with respect to pumpability.
struct PumpClasses {
  std::vector<std::uint32_t> of;                // element -> class
  std::vector<std::vector<std::uint32_t>> step;  // class x label -> class
  std::vector<std::vector<char>> pumpable;       // class x class
  std::size_t count = 0;
};

inline PumpClasses pump_classes(const TypeMonoid& seg, const PumpTable& pump) {
  const std::size_t n = seg.size();
  const std::size_t labels = std::size_t{1} << seg.predicates();
  std::vector<std::uint32_t> gen(labels);
  for (std::size_t l = 0; l < labels; ++l) gen[l] = seg.letter_image({static_cast<Label>(l), false});
  std::vector<std::uint32_t> cls(n);
  {
    std::map<std::vector<char>, std::uint32_t> ids;
    for (Element a = 0; a < n; ++a) {
      std::vector<char> key(2 * n);
      for (Element b = 0; b < n; ++b) {
        key[b] = pump(a, b);
        key[n + b] = pump(b, a);
      }
      cls[a] = ids.emplace(key, static_cast<std::uint32_t>(ids.size())).first->second;
    }
  }
  std::size_t count = 0;
  for (auto c : cls) count = std::max<std::size_t>(count, c + 1);
  while (true) {
    std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
    std::vector<std::uint32_t> next(n);
    for (Element a = 0; a < n; ++a) {
      std::vector<std::uint32_t> key{cls[a]};
      for (auto g : gen) key.push_back(cls[seg.multiply(a, g)]);
      next[a] = ids.emplace(key, static_cast<std::uint32_t>(ids.size())).first->second;
    }
    cls.swap(next);
    if (ids.size() == count) break;
    count = ids.size();
  }
  PumpClasses out;
  out.of = cls;
  out.count = count;
  out.step.assign(count, std::vector<std::uint32_t>(labels));
  out.pumpable.assign(count, std::vector<char>(count, 0));
  for (Element a = 0; a < n; ++a) {
    for (std::size_t l = 0; l < labels; ++l) out.step[cls[a]][l] = cls[seg.multiply(a, gen[l])];
    for (Element b = 0; b < n; ++b) out.pumpable[cls[a]][cls[b]] = pump(a, b);
  }
  return out;
}

// Builds "the segment types of zs (ascending marked variables) are pumpable at
// every index below p and not pumpable at index p" (indices 1-based; the pair
// at index i is the segment ending just before zs[i-1] and the one starting there).
class TypeGroupFormula {
 public:
  TypeGroupFormula(const TypeMonoid& seg, const PumpTable& pump, std::vector<std::string> zs, NameSupply& names)
      : seg_(seg), classes_(pump_classes(seg, pump)), zs_(std::move(zs)), names_(names) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < classes_.count) ++bits;
    for (std::size_t t = 0; t < bits; ++t) sets_.push_back(names_.fresh("C"));
  }

  std::size_t classes() const noexcept { return classes_.count; }

  Formula group(std::size_t p) {
    if (p == 0 || p > zs_.size()) throw PreconditionError("type group index out of range");
    std::vector<Formula> parts{valid_run()};
    for (std::size_t i = 1; i < p; ++i) parts.push_back(pump_at(i));
    parts.push_back(negate(pump_at(p)));
    return simplify(exists_sets(conj_all(parts)));
  }

  // "the pair at index i is pumpable"
  Formula pumpable_at(std::size_t i) { return simplify(exists_sets(conj(valid_run(), pump_at(i)))); }

 private:
  Formula exists_sets(Formula body) const {
    for (auto it = sets_.rbegin(); it != sets_.rend(); ++it) body = exists_so(*it, body);
    return body;
  }

  Formula code_is(const std::string& pos, std::uint32_t c) const {
    std::vector<Formula> parts;
    for (std::size_t t = 0; t < sets_.size(); ++t)
      parts.push_back((c >> t) & 1U ? member(sets_[t], pos) : negate(member(sets_[t], pos)));
    return conj_all(parts);
  }

  Formula label_is(const std::string& pos, std::size_t label) const {
    std::vector<Formula> parts;
    for (std::size_t i = 0; i < seg_.predicates(); ++i)
      parts.push_back((label >> i) & 1U ? pred(i, pos) : negate(pred(i, pos)));
    return conj_all(parts);
  }

  Formula first(const std::string& pos) {
    auto u = names_.fresh("u");
    return negate(exists_fo(u, less(u, pos)));
  }
  Formula last(const std::string& pos) {
    auto u = names_.fresh("u");
    return negate(exists_fo(u, less(pos, u)));
  }
  Formula succ(const std::string& a, const std::string& b) {
    auto u = names_.fresh("u");
    return conj(less(a, b), negate(exists_fo(u, conj(less(a, u), less(u, b)))));
  }
  Formula at_mark(const std::string& pos) const {
    std::vector<Formula> parts;
    for (const auto& z : zs_) parts.push_back(equal(pos, z));
    return disj_all(parts);
  }

  Formula valid_run() {
    if (sets_.empty()) return truth();
    const std::size_t labels = std::size_t{1} << seg_.predicates();
    auto p = names_.fresh("p"), q = names_.fresh("q");
    std::vector<Formula> start, step;
    for (std::size_t l = 0; l < labels; ++l)
      start.push_back(implies(label_is(p, l), code_is(p, classes_.of[seg_.letter_image({static_cast<Label>(l), false})])));
    for (std::uint32_t c = 0; c < classes_.count; ++c)
      for (std::size_t l = 0; l < labels; ++l)
        step.push_back(implies(conj(code_is(q, c), label_is(p, l)), code_is(p, classes_.step[c][l])));
    Formula resets = forall_fo(p, implies(disj(first(p), at_mark(p)), conj_all(start)));
    Formula moves = forall_fo(p, forall_fo(q, implies(conj(succ(q, p), negate(at_mark(p))), conj_all(step))));
    return conj(resets, moves);
  }

  // class of segment j (0 = unmarked prefix) equals c
  Formula segment_class(std::size_t j, std::uint32_t c) {
    auto q = names_.fresh("q");
    const std::size_t k = zs_.size();
    if (j == 0) {
      Formula empty_prefix = classes_.of[TypeMonoid::identity()] == c ? first(zs_[0]) : falsity();
      return disj(empty_prefix, exists_fo(q, conj(succ(q, zs_[0]), code_is(q, c))));
    }
    Formula inside = disj(equal(zs_[j - 1], q), less(zs_[j - 1], q));
    Formula end = j < k ? succ(q, zs_[j]) : last(q);
    return exists_fo(q, conj_all({inside, end, code_is(q, c)}));
  }

  Formula pump_at(std::size_t i) {
    std::vector<Formula> cases;
    for (std::uint32_t c = 0; c < classes_.count; ++c) {
      std::vector<Formula> right;
      bool all = true;
      for (std::uint32_t d = 0; d < classes_.count; ++d) {
        if (classes_.pumpable[c][d])
          right.push_back(segment_class(i, d));
        else
          all = false;
      }
      if (right.empty()) continue;
      cases.push_back(conj(segment_class(i - 1, c), all ? truth() : disj_all(right)));
    }
    return disj_all(cases);
  }

  const TypeMonoid& seg_;
  PumpClasses classes_;
  std::vector<std::string> zs_;
  NameSupply& names_;
  std::vector<std::string> sets_;
};

}  // namespace chainrep
