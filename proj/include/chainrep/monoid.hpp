#pragma once

// Transition monoids of compiled automata. Elements are transformations of a
// finite point set; element 0 is the identity and is witnessed by the empty word.
//
// Two monoids are built from a marked-alphabet DFA with state set Q:
//   transition_monoid: transformations of Q generated by every letter.
//   segment_monoid:    transformations of Q x {pending, done} generated by the
//                      unmarked letters; a pending point reads its first letter
//                      as marked and becomes done. One element thus records the
//                      effect of a segment both with and without a leading mark.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "chainrep/bound.hpp"
#include "chainrep/compiler.hpp"
#include "chainrep/error.hpp"
#include "chainrep/word.hpp"

namespace chainrep {

using Element = std::uint32_t;

struct MonoidOptions {
  std::size_t max_elements = 100'000;
};

class TypeMonoid {
 public:
  std::size_t size() const noexcept { return witness_.size(); }
  std::size_t points() const noexcept { return points_; }
  static constexpr Element identity() noexcept { return 0; }

  Element multiply(Element a, Element b) const {
    check(a);
    check(b);
    if (!table_.empty()) return table_[static_cast<std::size_t>(a) * size() + b];
    std::vector<std::uint32_t> t(points_);
    for (std::size_t p = 0; p < points_; ++p) t[p] = apply(b, apply(a, static_cast<std::uint32_t>(p)));
    return ids_.at(t);
  }

  // Image of point p under element e (a is applied first in a*b).
  std::uint32_t apply(Element e, std::uint32_t p) const { return maps_[static_cast<std::size_t>(e) * points_ + p]; }

  const MarkedWord& witness(Element e) const {
    check(e);
    return witness_[e];
  }
  bool nonempty(Element e) const {
    check(e);
    return nonempty_[e] != 0;
  }
  // True when the element is generated by unmarked letters alone.
  bool unmarked(Element e) const {
    check(e);
    return unmarked_[e] != 0;
  }
  bool idempotent(Element e) const { return multiply(e, e) == e; }

  Element letter_image(MarkedLetter l) const {
    auto it = generators_.find(letter_index(l, predicates_));
    if (it == generators_.end()) throw PreconditionError("monoid: letter is not a generator");
    return it->second;
  }
  Element image(const MarkedWord& w) const {
    Element e = identity();
    for (const auto& l : w) e = multiply(e, letter_image(l));
    return e;
  }
  Element image(const Word& w) const {
    Element e = identity();
    for (auto l : w.letters) e = multiply(e, letter_image({l, false}));
    return e;
  }

  // Smallest p >= 1 with e^p idempotent.
  std::size_t idempotent_exponent(Element e) const {
    Element x = e;
    for (std::size_t p = 1; p <= size() + 1; ++p) {
      if (idempotent(x)) return p;
      x = multiply(x, e);
    }
    throw PreconditionError("monoid: no idempotent power");
  }

  Element power(Element e, std::size_t p) const {
    Element x = identity();
    for (std::size_t i = 0; i < p; ++i) x = multiply(x, e);
    return x;
  }

  std::size_t predicates() const noexcept { return predicates_; }

  // Closure of the identity under the generators: unmarked ones first, then
  // all together. Each level holds elements whose shortest witness has that
  // length, so recorded witnesses are shortest.
  static TypeMonoid close(std::size_t points, std::size_t predicates,
                          const std::vector<std::pair<MarkedLetter, std::vector<std::uint32_t>>>& gens,
                          MonoidOptions opts) {
    TypeMonoid m;
    m.points_ = points;
    m.predicates_ = predicates;
    std::vector<std::uint32_t> id(points);
    for (std::size_t p = 0; p < points; ++p) id[p] = static_cast<std::uint32_t>(p);
    m.add(id, {}, true, opts);
    auto extend = [&](Element e, std::size_t g, bool only_unmarked) -> std::optional<Element> {
      const auto& [letter, map] = gens[g];
      if (only_unmarked && letter.mark) return std::nullopt;
      std::vector<std::uint32_t> t(points);
      for (std::size_t p = 0; p < points; ++p) t[p] = map[m.apply(e, static_cast<std::uint32_t>(p))];
      auto it = m.ids_.find(t);
      if (it != m.ids_.end()) {
        if (it->second == identity() && !letter.mark && m.unmarked_[e]) m.nonempty_[0] = 1;
        return std::nullopt;
      }
      MarkedWord w = m.witness_[e];
      w.push_back(letter);
      return m.add(t, std::move(w), m.unmarked_[e] && !letter.mark, opts);
    };
    // phase 1: unmarked submonoid, breadth first
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t g = 0; g < gens.size(); ++g) extend(static_cast<Element>(i), g, true);
    // phase 2: all letters, processed by witness length
    std::vector<std::vector<Element>> levels;
    for (Element e = 0; e < m.size(); ++e) {
      std::size_t len = m.witness_[e].size();
      if (levels.size() <= len) levels.resize(len + 1);
      levels[len].push_back(e);
    }
    for (std::size_t len = 0; len < levels.size(); ++len)
      for (std::size_t i = 0; i < levels[len].size(); ++i) {
        Element e = levels[len][i];
        for (std::size_t g = 0; g < gens.size(); ++g)
          if (auto n = extend(e, g, false)) {
            if (levels.size() <= len + 1) levels.resize(len + 2);
            levels[len + 1].push_back(*n);
          }
      }
    for (std::size_t g = 0; g < gens.size(); ++g) {
      std::vector<std::uint32_t> t(gens[g].second.begin(), gens[g].second.end());
      m.generators_[letter_index(gens[g].first, predicates)] = m.ids_.at(t);
    }
    if (m.size() <= 2048) {
      m.table_.resize(m.size() * m.size());
      std::vector<std::uint32_t> t(points);
      for (Element a = 0; a < m.size(); ++a)
        for (Element b = 0; b < m.size(); ++b) {
          for (std::size_t p = 0; p < points; ++p) t[p] = m.apply(b, m.apply(a, static_cast<std::uint32_t>(p)));
          m.table_[static_cast<std::size_t>(a) * m.size() + b] = m.ids_.at(t);
        }
    }
    return m;
  }

 private:
  void check(Element e) const {
    if (e >= size()) throw PreconditionError("monoid: foreign element " + std::to_string(e));
  }

  Element add(const std::vector<std::uint32_t>& t, MarkedWord w, bool unmarked, MonoidOptions opts) {
    if (size() >= opts.max_elements)
      throw ResourceLimit("monoid: element budget of " + std::to_string(opts.max_elements) + " exceeded");
    auto e = static_cast<Element>(size());
    ids_.emplace(t, e);
    maps_.insert(maps_.end(), t.begin(), t.end());
    nonempty_.push_back(!w.empty() ? 1 : 0);
    unmarked_.push_back(unmarked ? 1 : 0);
    witness_.push_back(std::move(w));
    return e;
  }

  std::size_t points_ = 0;
  std::size_t predicates_ = 0;
  std::vector<std::uint32_t> maps_;
  std::unordered_map<std::vector<std::uint32_t>, Element, VectorHash> ids_;
  std::vector<MarkedWord> witness_;
  std::vector<char> nonempty_, unmarked_;
  std::unordered_map<std::size_t, Element> generators_;
  std::vector<Element> table_;
};

inline TypeMonoid transition_monoid(const Dfa& d, MonoidOptions opts = {}) {
  std::vector<std::pair<MarkedLetter, std::vector<std::uint32_t>>> gens;
  for (std::size_t l = 0; l < d.letters(); ++l) {
    std::vector<std::uint32_t> map(d.states());
    for (std::uint32_t q = 0; q < d.states(); ++q) map[q] = d.next(q, l);
    gens.emplace_back(letter_at(l, d.predicates), std::move(map));
  }
  return TypeMonoid::close(d.states(), d.predicates, gens, opts);
}

// Point encoding in the segment monoid: q pending, states()+q done.
inline std::uint32_t pending_point(std::uint32_t q) { return q; }
inline std::uint32_t done_point(const Dfa& d, std::uint32_t q) { return static_cast<std::uint32_t>(d.states()) + q; }

inline TypeMonoid segment_monoid(const Dfa& d, MonoidOptions opts = {}) {
  const auto n = static_cast<std::uint32_t>(d.states());
  std::vector<std::pair<MarkedLetter, std::vector<std::uint32_t>>> gens;
  for (Label a = 0; a < (Label{1} << d.predicates); ++a) {
    std::vector<std::uint32_t> map(2 * n);
    for (std::uint32_t q = 0; q < n; ++q) {
      map[q] = n + d.next(q, MarkedLetter{a, true});
      map[n + q] = n + d.next(q, MarkedLetter{a, false});
    }
    gens.emplace_back(MarkedLetter{a, false}, std::move(map));
  }
  return TypeMonoid::close(2 * n, d.predicates, gens, opts);
}

// DFA state reached after an unmarked prefix of type t0 followed by segments
// of types ts (each starting at a mark), from state q.
inline std::uint32_t run_segments(const Dfa& d, const TypeMonoid& seg, std::uint32_t q, Element t0,
                                  const std::vector<Element>& ts) {
  const auto n = static_cast<std::uint32_t>(d.states());
  q = seg.apply(t0, done_point(d, q)) - n;
  for (Element t : ts) {
    std::uint32_t p = seg.apply(t, pending_point(q));
    if (p < n) throw PreconditionError("run_segments: empty segment after a mark");
    q = p - n;
  }
  return q;
}

inline bool segments_accepted(const Dfa& d, const TypeMonoid& seg, const std::vector<Element>& types) {
  if (types.empty()) throw PreconditionError("segments_accepted: missing prefix type");
  std::vector<Element> rest(types.begin() + 1, types.end());
  return d.accepting(run_segments(d, seg, d.initial(), types.front(), rest));
}

// Segment types of a marked word: the unmarked prefix, then one per mark.
inline std::vector<Element> segment_types(const TypeMonoid& seg, const MarkedWord& w) {
  std::vector<Element> out{TypeMonoid::identity()};
  for (const auto& l : w) {
    if (l.mark) out.push_back(TypeMonoid::identity());
    out.back() = seg.multiply(out.back(), seg.letter_image({l.label, false}));
  }
  return out;
}

inline std::vector<Element> idempotents(const TypeMonoid& m, bool require_nonempty) {
  std::vector<Element> out;
  for (Element e = 0; e < m.size(); ++e) {
    if (!m.idempotent(e)) continue;
    if (require_nonempty && !(m.unmarked(e) && m.nonempty(e))) continue;
    out.push_back(e);
  }
  return out;
}

// Nonempty unmarked idempotent e with tau_b*e = tau_b and e*tau_e = tau_e;
// shortest witness first, then lowest index.
inline std::optional<Element> is_pumpable(const TypeMonoid& m, Element tau_b, Element tau_e) {
  std::optional<Element> best;
  for (Element e : idempotents(m, true)) {
    if (m.multiply(tau_b, e) != tau_b || m.multiply(e, tau_e) != tau_e) continue;
    if (!best || m.witness(e).size() < m.witness(*best).size()) best = e;
  }
  return best;
}

// Pumpability of every pair, as one bitset row per left element.
class PumpTable {
 public:
  explicit PumpTable(const TypeMonoid& m) : n_(m.size()), words_((m.size() + 63) / 64), bits_(n_ * words_, 0) {
    for (Element e : idempotents(m, true)) {
      std::vector<std::uint64_t> right(words_, 0);
      for (Element b = 0; b < n_; ++b)
        if (m.multiply(e, b) == b) right[b / 64] |= std::uint64_t{1} << (b % 64);
      for (Element a = 0; a < n_; ++a)
        if (m.multiply(a, e) == a)
          for (std::size_t w = 0; w < words_; ++w) bits_[a * words_ + w] |= right[w];
    }
  }
  bool operator()(Element a, Element b) const { return (bits_[a * words_ + b / 64] >> (b % 64)) & 1U; }
  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_, words_;
  std::vector<std::uint64_t> bits_;
};

inline std::uint64_t ramsey_bound(std::uint64_t colors) {
  if (colors == 0) throw PreconditionError("ramsey_bound: at least one color");
  std::uint64_t b = 3;
  for (std::uint64_t c = 2; c <= colors; ++c) {
    if (b - 1 > (std::numeric_limits<std::uint64_t>::max() - 2) / c)
      throw ResourceLimit("ramsey_bound: overflow at " + std::to_string(colors) + " colors");
    b = c * (b - 1) + 2;
  }
  return b;
}

inline Bound ramsey_bound_big(std::uint64_t colors) {
  if (colors == 0) throw PreconditionError("ramsey_bound: at least one color");
  Bound b = 3;
  for (std::uint64_t c = 2; c <= colors; ++c) b = Bound(c) * (b - 1) + 2;
  return b;
}

inline std::string dump(const TypeMonoid& m, const Signature& sig) {
  std::ostringstream out;
  out << "monoid size=" << m.size() << '\n';
  for (Element e = 0; e < m.size(); ++e)
    out << e << " witness=" << render_marked_word(m.witness(e), sig) << " idempotent=" << m.idempotent(e)
        << " nonempty=" << m.nonempty(e) << '\n';
  for (Element a = 0; a < m.size(); ++a) {
    for (Element b = 0; b < m.size(); ++b) out << (b ? " " : "") << m.multiply(a, b);
    out << '\n';
  }
  return out.str();
}

}  // namespace chainrep
