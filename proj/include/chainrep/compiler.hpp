#pragma once

// Compilation of MSO formulas to minimal DFAs.
//
// Internally every variable in scope owns one track (one bit per letter); a
// word over tracks is valid when each element-variable track carries exactly
// one 1. Every intermediate automaton accepts only valid words, so projection
// of a track implements existential quantification directly.
//
// The public automaton (Dfa) reads the marked alphabet: a label set plus one
// shared mark bit, where the i-th marked position stands for the i-th marked
// variable. Such a DFA accepts only words with exactly m marks.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "chainrep/error.hpp"
#include "chainrep/formula.hpp"
#include "chainrep/word.hpp"

namespace chainrep {

struct CompileOptions {
  std::size_t max_states = 1'000'000;
};

// Deterministic transition graph over letters 0..letters-1.
struct Automaton {
  std::size_t letters = 1;
  std::size_t states = 0;
  std::uint32_t initial = 0;
  std::vector<char> accepting;
  std::vector<std::uint32_t> delta;  // states * letters

  std::uint32_t next(std::uint32_t s, std::size_t letter) const { return delta[s * letters + letter]; }
  bool accepts(std::uint32_t s) const { return accepting[s] != 0; }
};

struct VectorHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = v.size();
    for (auto x : v) h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

namespace detail {

// Thrown by automaton constructions; compile() rethrows it as ResourceLimit with context.
struct StateBudget {
  std::size_t states;
};

// Reachable part, Moore partition refinement, then breadth-first renumbering
// from the initial state (letters in increasing order) so numbering is canonical.
inline Automaton minimize(const Automaton& a) {
  const std::size_t L = a.letters;
  // reachable states
  std::vector<std::int64_t> index(a.states, -1);
  std::vector<std::uint32_t> order{a.initial};
  index[a.initial] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t l = 0; l < L; ++l) {
      auto t = a.next(order[i], l);
      if (index[t] < 0) {
        index[t] = static_cast<std::int64_t>(order.size());
        order.push_back(t);
      }
    }
  const std::size_t n = order.size();
  std::vector<std::uint32_t> cls(n);
  bool has_acc = false, has_rej = false;
  for (std::size_t i = 0; i < n; ++i) {
    cls[i] = a.accepts(order[i]) ? 1 : 0;
    (cls[i] ? has_acc : has_rej) = true;
  }
  std::size_t classes = (has_acc ? 1 : 0) + (has_rej ? 1 : 0);
  if (!has_rej)
    for (auto& c : cls) c = 0;
  std::vector<std::uint32_t> local(n * L);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < L; ++l) local[i * L + l] = static_cast<std::uint32_t>(index[a.next(order[i], l)]);
  while (true) {
    std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, VectorHash> sig;
    std::vector<std::uint32_t> next_cls(n);
    std::vector<std::uint32_t> key(L + 1);
    for (std::size_t i = 0; i < n; ++i) {
      key[0] = cls[i];
      for (std::size_t l = 0; l < L; ++l) key[l + 1] = cls[local[i * L + l]];
      auto [it, inserted] = sig.emplace(key, static_cast<std::uint32_t>(sig.size()));
      next_cls[i] = it->second;
    }
    cls.swap(next_cls);
    if (sig.size() == classes) break;
    classes = sig.size();
  }
  // canonical BFS numbering of the quotient
  std::vector<std::int64_t> num(classes, -1);
  std::vector<std::size_t> rep(classes, 0);
  for (std::size_t i = n; i-- > 0;) rep[cls[i]] = i;
  Automaton out;
  out.letters = L;
  std::vector<std::uint32_t> queue{cls[0]};
  num[cls[0]] = 0;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    std::size_t r = rep[queue[i]];
    for (std::size_t l = 0; l < L; ++l) {
      auto c = cls[local[r * L + l]];
      if (num[c] < 0) {
        num[c] = static_cast<std::int64_t>(queue.size());
        queue.push_back(c);
      }
    }
  }
  out.states = queue.size();
  out.initial = 0;
  out.accepting.resize(out.states);
  out.delta.resize(out.states * L);
  for (std::size_t i = 0; i < queue.size(); ++i) {
    std::size_t r = rep[queue[i]];
    out.accepting[i] = a.accepts(order[r]);
    for (std::size_t l = 0; l < L; ++l) out.delta[i * L + l] = static_cast<std::uint32_t>(num[cls[local[r * L + l]]]);
  }
  return out;
}

// Reachable synchronous product; keep(acc_a, acc_b) decides acceptance.
template <class Keep>
Automaton product(const Automaton& a, const Automaton& b, Keep keep, std::size_t max_states) {
  if (a.letters != b.letters) throw PreconditionError("product: alphabet mismatch");
  const std::size_t L = a.letters;
  Automaton out;
  out.letters = L;
  std::unordered_map<std::uint64_t, std::uint32_t> ids;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  auto id_of = [&](std::uint32_t x, std::uint32_t y) {
    std::uint64_t key = (std::uint64_t{x} << 32) | y;
    auto [it, inserted] = ids.emplace(key, static_cast<std::uint32_t>(pairs.size()));
    if (inserted) {
      pairs.emplace_back(x, y);
      if (pairs.size() > max_states) throw StateBudget{pairs.size()};
    }
    return it->second;
  };
  id_of(a.initial, b.initial);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [x, y] = pairs[i];
    out.accepting.push_back(keep(a.accepts(x), b.accepts(y)));
    for (std::size_t l = 0; l < L; ++l) {
      auto t = id_of(a.next(x, l), b.next(y, l));
      out.delta.push_back(t);
    }
  }
  out.states = pairs.size();
  return minimize(out);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Track automata (internal representation, exposed for witness constructions)

struct Track {
  std::string name;
  bool set = false;
  friend bool operator==(const Track&, const Track&) = default;
};

struct TrackDfa {
  std::size_t predicates = 0;
  std::vector<Track> tracks;  // sorted by name
  Automaton automaton;

  std::size_t track_index(const std::string& name) const {
    for (std::size_t i = 0; i < tracks.size(); ++i)
      if (tracks[i].name == name) return i;
    return tracks.size();
  }
  // Letter carrying the given labels and no variable bits.
  std::size_t plain_letter(Label l) const { return l; }
};

namespace detail {

inline std::size_t track_letters(std::size_t k, std::size_t tracks) {
  if (k + tracks > 20) throw StateBudget{std::size_t{1} << (k + tracks)};
  return std::size_t{1} << (k + tracks);
}

inline bool bit(std::size_t letter, std::size_t k, std::size_t track) { return ((letter >> (k + track)) & 1U) != 0; }

// Accepts valid words: each element-variable track has exactly one 1.
inline Automaton validity(std::size_t k, const std::vector<Track>& tracks) {
  std::vector<std::size_t> fo;
  for (std::size_t i = 0; i < tracks.size(); ++i)
    if (!tracks[i].set) fo.push_back(i);
  const std::size_t L = track_letters(k, tracks.size());
  const std::size_t masks = std::size_t{1} << fo.size();
  Automaton a;
  a.letters = L;
  a.states = masks + 1;  // last state is the sink
  const auto sink = static_cast<std::uint32_t>(masks);
  a.accepting.assign(a.states, 0);
  a.accepting[masks - 1] = 1;
  a.delta.resize(a.states * L);
  for (std::size_t s = 0; s < a.states; ++s)
    for (std::size_t l = 0; l < L; ++l) {
      if (s == sink) {
        a.delta[s * L + l] = sink;
        continue;
      }
      std::size_t m = s;
      bool dead = false;
      for (std::size_t j = 0; j < fo.size(); ++j)
        if (bit(l, k, fo[j])) {
          if (m & (std::size_t{1} << j)) dead = true;
          m |= std::size_t{1} << j;
        }
      a.delta[s * L + l] = dead ? sink : static_cast<std::uint32_t>(m);
    }
  return a;
}

inline TrackDfa constant(std::size_t k, bool value) {
  TrackDfa t;
  t.predicates = k;
  t.automaton.letters = std::size_t{1} << k;
  t.automaton.states = 1;
  t.automaton.accepting = {static_cast<char>(value)};
  t.automaton.delta.assign(t.automaton.letters, 0);
  return t;
}

// Automaton over the given tracks from a per-letter transition rule on a small state set.
template <class Step>
TrackDfa local_atom(std::size_t k, std::vector<Track> tracks, std::size_t states, std::vector<char> accepting, Step step) {
  TrackDfa t;
  t.predicates = k;
  std::sort(tracks.begin(), tracks.end(), [](const Track& a, const Track& b) { return a.name < b.name; });
  t.tracks = tracks;
  Automaton& a = t.automaton;
  a.letters = track_letters(k, tracks.size());
  a.states = states;
  a.accepting = std::move(accepting);
  a.delta.resize(states * a.letters);
  for (std::size_t s = 0; s < states; ++s)
    for (std::size_t l = 0; l < a.letters; ++l) a.delta[s * a.letters + l] = step(static_cast<std::uint32_t>(s), l, t);
  a = minimize(a);
  return t;
}

// Reinterpret over a superset of tracks; new element tracks must be valid.
inline TrackDfa cylindrify(const TrackDfa& t, const std::vector<Track>& target, std::size_t max_states) {
  if (t.tracks == target) return t;
  const std::size_t k = t.predicates;
  const std::size_t L = track_letters(k, target.size());
  std::vector<std::size_t> where;
  for (const auto& tr : t.tracks) {
    auto it = std::find(target.begin(), target.end(), tr);
    if (it == target.end()) throw PreconditionError("cylindrify: track missing from target");
    where.push_back(static_cast<std::size_t>(it - target.begin()));
  }
  std::vector<Track> added;
  for (const auto& tr : target)
    if (std::find(t.tracks.begin(), t.tracks.end(), tr) == t.tracks.end()) added.push_back(tr);
  Automaton lifted;
  lifted.letters = L;
  lifted.states = t.automaton.states;
  lifted.initial = t.automaton.initial;
  lifted.accepting = t.automaton.accepting;
  lifted.delta.resize(lifted.states * L);
  const std::size_t pred_mask = (std::size_t{1} << k) - 1;
  for (std::size_t l = 0; l < L; ++l) {
    std::size_t old = l & pred_mask;
    for (std::size_t j = 0; j < where.size(); ++j)
      if (bit(l, k, where[j])) old |= std::size_t{1} << (k + j);
    for (std::size_t s = 0; s < lifted.states; ++s) lifted.delta[s * L + l] = t.automaton.next(static_cast<std::uint32_t>(s), old);
  }
  TrackDfa out;
  out.predicates = k;
  out.tracks = target;
  bool need_validity = std::any_of(added.begin(), added.end(), [](const Track& tr) { return !tr.set; });
  if (!need_validity) {
    out.automaton = minimize(lifted);
    return out;
  }
  // validity only for the added element tracks
  std::vector<Track> masked = target;
  for (auto& tr : masked)
    if (std::find(added.begin(), added.end(), tr) == added.end()) tr.set = true;
  out.automaton = product(lifted, validity(k, masked), [](bool x, bool y) { return x && y; }, max_states);
  return out;
}

inline std::vector<Track> merge_tracks(const std::vector<Track>& a, const std::vector<Track>& b) {
  std::vector<Track> out = a;
  for (const auto& tr : b)
    if (std::find(out.begin(), out.end(), tr) == out.end()) out.push_back(tr);
  std::sort(out.begin(), out.end(), [](const Track& x, const Track& y) { return x.name < y.name; });
  return out;
}

inline TrackDfa complement(const TrackDfa& t, std::size_t max_states) {
  Automaton flipped = t.automaton;
  for (auto& acc : flipped.accepting) acc = !acc;
  TrackDfa out = t;
  out.automaton = product(flipped, validity(t.predicates, t.tracks), [](bool x, bool y) { return x && y; }, max_states);
  return out;
}

template <class Keep>
TrackDfa combine(const TrackDfa& a, const TrackDfa& b, Keep keep, std::size_t max_states) {
  auto tracks = merge_tracks(a.tracks, b.tracks);
  TrackDfa x = cylindrify(a, tracks, max_states);
  TrackDfa y = cylindrify(b, tracks, max_states);
  TrackDfa out;
  out.predicates = a.predicates;
  out.tracks = tracks;
  out.automaton = product(x.automaton, y.automaton, keep, max_states);
  return out;
}

// Existential projection of one track via subset construction.
inline TrackDfa project(const TrackDfa& t, std::size_t track, std::size_t max_states) {
  const std::size_t k = t.predicates;
  std::vector<Track> tracks = t.tracks;
  tracks.erase(tracks.begin() + static_cast<std::ptrdiff_t>(track));
  const std::size_t L = track_letters(k, tracks.size());
  const std::size_t low_mask = (std::size_t{1} << (k + track)) - 1;
  std::vector<std::pair<std::size_t, std::size_t>> expand(L);
  for (std::size_t l = 0; l < L; ++l) {
    std::size_t base = (l & low_mask) | ((l & ~low_mask) << 1);
    expand[l] = {base, base | (std::size_t{1} << (k + track))};
  }
  Automaton out;
  out.letters = L;
  std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, VectorHash> ids;
  std::vector<std::vector<std::uint32_t>> sets;
  auto id_of = [&](std::vector<std::uint32_t> s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    auto [it, inserted] = ids.emplace(s, static_cast<std::uint32_t>(sets.size()));
    if (inserted) {
      sets.push_back(std::move(s));
      if (sets.size() > max_states) throw StateBudget{sets.size()};
    }
    return it->second;
  };
  id_of({t.automaton.initial});
  std::vector<std::uint32_t> succ;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    bool acc = false;
    for (auto s : sets[i]) acc = acc || t.automaton.accepts(s);
    out.accepting.push_back(acc);
    for (std::size_t l = 0; l < L; ++l) {
      succ.clear();
      for (auto s : sets[i]) {
        succ.push_back(t.automaton.next(s, expand[l].first));
        succ.push_back(t.automaton.next(s, expand[l].second));
      }
      auto id = id_of(succ);
      out.delta.push_back(id);
    }
  }
  out.states = sets.size();
  TrackDfa res;
  res.predicates = k;
  res.tracks = std::move(tracks);
  res.automaton = minimize(out);
  return res;
}

// Nonempty words (any track contents) over the given tracks, intersected with validity.
inline TrackDfa nonempty_words(std::size_t k, const std::vector<Track>& tracks) {
  return local_atom(k, tracks, 2, {0, 1}, [](std::uint32_t, std::size_t, const TrackDfa&) { return 1U; });
}

struct Compiler {
  std::size_t k;
  const Signature& sig;
  CompileOptions opts;

  TrackDfa run(const Formula& f) {
    try {
      return compile_node(f);
    } catch (const StateBudget& b) {
      std::string text = render(f, sig);
      if (text.size() > 200) text = text.substr(0, 197) + "...";
      throw ResourceLimit("state budget of " + std::to_string(opts.max_states) + " exceeded (" +
                          std::to_string(b.states) + " states) while compiling: " + text);
    }
  }

  TrackDfa compile_node(const Formula& f) {
    const auto& n = f.node();
    const std::size_t cap = opts.max_states;
    auto fo = [](const std::string& v) { return Track{v, false}; };
    switch (n.op) {
      case Op::True:
        return constant(k, true);
      case Op::False:
        return constant(k, false);
      case Op::Less:
        if (n.var == n.var2) return local_atom(k, {fo(n.var)}, 1, {0}, [](std::uint32_t, std::size_t, const TrackDfa&) { return 0U; });
        return local_atom(k, {fo(n.var), fo(n.var2)}, 4, {0, 0, 1, 0}, [&](std::uint32_t s, std::size_t l, const TrackDfa& t) -> std::uint32_t {
          bool bx = bit(l, k, t.track_index(n.var)), by = bit(l, k, t.track_index(n.var2));
          switch (s) {
            case 0: return bx && !by ? 1 : (bx || by) ? 3 : 0;
            case 1: return bx ? 3 : by ? 2 : 1;
            case 2: return (bx || by) ? 3 : 2;
            default: return 3;
          }
        });
      case Op::Equal:
        if (n.var == n.var2)
          return local_atom(k, {fo(n.var)}, 3, {0, 1, 0}, [&](std::uint32_t s, std::size_t l, const TrackDfa& t) -> std::uint32_t {
            bool bx = bit(l, k, t.track_index(n.var));
            return s == 0 ? (bx ? 1 : 0) : s == 1 ? (bx ? 2 : 1) : 2;
          });
        return local_atom(k, {fo(n.var), fo(n.var2)}, 3, {0, 1, 0}, [&](std::uint32_t s, std::size_t l, const TrackDfa& t) -> std::uint32_t {
          bool bx = bit(l, k, t.track_index(n.var)), by = bit(l, k, t.track_index(n.var2));
          switch (s) {
            case 0: return bx && by ? 1 : (bx || by) ? 2 : 0;
            case 1: return (bx || by) ? 2 : 1;
            default: return 2;
          }
        });
      case Op::Pred:
        if (n.pred >= k) throw InputError("predicate index outside the signature");
        return local_atom(k, {fo(n.var)}, 3, {0, 1, 0}, [&](std::uint32_t s, std::size_t l, const TrackDfa& t) -> std::uint32_t {
          bool bx = bit(l, k, t.track_index(n.var));
          bool p = ((l >> n.pred) & 1U) != 0;
          if (s == 0) return bx ? (p ? 1 : 2) : 0;
          if (s == 1) return bx ? 2 : 1;
          return 2;
        });
      case Op::In:
        return local_atom(k, {fo(n.var), Track{n.var2, true}}, 3, {0, 1, 0}, [&](std::uint32_t s, std::size_t l, const TrackDfa& t) -> std::uint32_t {
          bool bx = bit(l, k, t.track_index(n.var));
          bool in = bit(l, k, t.track_index(n.var2));
          if (s == 0) return bx ? (in ? 1 : 2) : 0;
          if (s == 1) return bx ? 2 : 1;
          return 2;
        });
      case Op::Not:
        return complement(compile_node(n.lhs), cap);
      case Op::And:
        return combine(compile_node(n.lhs), compile_node(n.rhs), [](bool x, bool y) { return x && y; }, cap);
      case Op::Or:
        return combine(compile_node(n.lhs), compile_node(n.rhs), [](bool x, bool y) { return x || y; }, cap);
      case Op::Implies:
        return combine(complement(compile_node(n.lhs), cap), compile_node(n.rhs), [](bool x, bool y) { return x || y; }, cap);
      case Op::ExistsFO:
      case Op::ExistsSO:
        return exists(compile_node(n.lhs), n.var, n.op == Op::ExistsFO);
      case Op::ForallFO:
      case Op::ForallSO:
        return complement(exists(complement(compile_node(n.lhs), cap), n.var, n.op == Op::ForallFO), cap);
      case Op::AtLeast:
        return compile_node(expand_macros(f));
    }
    throw PreconditionError("compile: unknown node");
  }

  TrackDfa exists(const TrackDfa& body, const std::string& v, bool element) {
    std::size_t idx = body.track_index(v);
    if (idx < body.tracks.size()) return project(body, idx, opts.max_states);
    if (!element) return body;
    // the variable does not occur: ex v. f holds iff f holds and the word is nonempty
    return combine(body, nonempty_words(k, {}), [](bool x, bool y) { return x && y; }, opts.max_states);
  }
};

}  // namespace detail

// Track automaton of f over the tracks of its free variables (sorted by name).
inline TrackDfa compile_tracks(const Formula& f, const Signature& sig, CompileOptions opts = {}) {
  detail::Compiler c{sig.size(), sig, opts};
  return c.run(expand_macros(f));
}

// Runs t on w with each element variable at the given position (any order,
// repeats allowed). Every free element variable of the compiled formula must
// be assigned; set variables are not supported.
inline bool accepts(const TrackDfa& t, const Word& w, const std::vector<std::string>& vars,
                    const std::vector<std::size_t>& positions) {
  if (vars.size() != positions.size()) throw PreconditionError("accepts: arity mismatch");
  std::vector<std::size_t> letters(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) letters[i] = w.letters[i];
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    std::size_t idx = t.track_index(vars[j]);
    if (idx == t.tracks.size()) continue;  // variable does not occur free
    if (t.tracks[idx].set) throw PreconditionError("accepts: '" + vars[j] + "' is a set variable");
    if (positions[j] >= w.size()) throw PreconditionError("accepts: position out of range");
    letters[positions[j]] |= std::size_t{1} << (t.predicates + idx);
    ++assigned;
  }
  if (assigned != t.tracks.size()) throw PreconditionError("accepts: unassigned free variable");
  std::uint32_t s = t.automaton.initial;
  for (auto l : letters) s = t.automaton.next(s, l);
  return t.automaton.accepts(s);
}

// ---------------------------------------------------------------------------
// Public marked-alphabet DFA

struct Dfa {
  std::size_t predicates = 0;  // k; the alphabet has 2^(k+1) letters
  std::size_t marks = 0;       // m; accepted words carry exactly m marks
  Automaton automaton;

  std::size_t letters() const noexcept { return automaton.letters; }
  std::size_t states() const noexcept { return automaton.states; }
  std::uint32_t initial() const noexcept { return automaton.initial; }
  bool accepting(std::uint32_t s) const { return automaton.accepts(s); }
  std::uint32_t next(std::uint32_t s, std::size_t letter) const { return automaton.next(s, letter); }
  std::uint32_t next(std::uint32_t s, MarkedLetter l) const { return automaton.next(s, letter_index(l, predicates)); }
};

// DFA over the marked alphabet accepting exactly the marked words with
// |marked_vars| marks whose i-th mark, taken as marked_vars[i], satisfies f.
inline Dfa compile(const Formula& f, const std::vector<std::string>& marked_vars, const Signature& sig,
                   CompileOptions opts = {}) {
  auto fv = free_variables(f);
  if (!fv.so.empty()) throw PreconditionError("compile: free set variable '" + fv.so.front() + "'");
  for (const auto& v : fv.fo)
    if (std::find(marked_vars.begin(), marked_vars.end(), v) == marked_vars.end())
      throw PreconditionError("compile: free variable '" + v + "' is not marked");
  std::vector<Track> tracks;
  for (const auto& v : marked_vars) {
    if (!is_fo_name(v)) throw PreconditionError("compile: marked variable '" + v + "' is not an element variable");
    if (std::find_if(tracks.begin(), tracks.end(), [&](const Track& t) { return t.name == v; }) != tracks.end())
      throw PreconditionError("compile: duplicate marked variable '" + v + "'");
    tracks.push_back({v, false});
  }
  std::sort(tracks.begin(), tracks.end(), [](const Track& a, const Track& b) { return a.name < b.name; });
  const std::size_t k = sig.size();
  const std::size_t m = marked_vars.size();
  try {
    TrackDfa body = detail::cylindrify(compile_tracks(f, sig, opts), tracks, opts.max_states);
    std::vector<std::size_t> mark_bit;
    for (const auto& v : marked_vars) mark_bit.push_back(std::size_t{1} << (k + body.track_index(v)));
    const Automaton& b = body.automaton;
    Automaton out;
    out.letters = std::size_t{1} << (k + 1);
    // state (q, c) with c marks read so far, plus a sink
    const std::size_t count_states = b.states * (m + 1);
    out.states = count_states + 1;
    if (out.states > opts.max_states) throw detail::StateBudget{out.states};
    const auto sink = static_cast<std::uint32_t>(count_states);
    out.initial = static_cast<std::uint32_t>(b.initial * (m + 1));
    out.accepting.assign(out.states, 0);
    out.delta.assign(out.states * out.letters, sink);
    for (std::size_t q = 0; q < b.states; ++q)
      for (std::size_t c = 0; c <= m; ++c) {
        std::size_t s = q * (m + 1) + c;
        out.accepting[s] = c == m && b.accepts(static_cast<std::uint32_t>(q));
        for (std::size_t label = 0; label < (std::size_t{1} << k); ++label) {
          out.delta[s * out.letters + label] = static_cast<std::uint32_t>(b.next(static_cast<std::uint32_t>(q), label) * (m + 1) + c);
          if (c < m)
            out.delta[s * out.letters + (label | (std::size_t{1} << k))] =
                static_cast<std::uint32_t>(b.next(static_cast<std::uint32_t>(q), label | mark_bit[c]) * (m + 1) + c + 1);
        }
      }
    Dfa d;
    d.predicates = k;
    d.marks = m;
    d.automaton = detail::minimize(out);
    return d;
  } catch (const detail::StateBudget& b) {
    throw ResourceLimit("state budget of " + std::to_string(opts.max_states) + " exceeded (" + std::to_string(b.states) +
                        " states) while compiling: " + render(f, sig));
  }
}

inline bool run(const Dfa& d, const MarkedWord& w) {
  std::uint32_t s = d.initial();
  for (const auto& l : w) {
    if (l.label >> d.predicates) throw InputError("run: letter outside the alphabet");
    s = d.next(s, l);
  }
  return d.accepting(s);
}

inline bool dfa_empty(const Dfa& d) {
  const Automaton& a = d.automaton;
  std::vector<char> seen(a.states, 0);
  std::vector<std::uint32_t> stack{a.initial};
  seen[a.initial] = 1;
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    if (a.accepts(s)) return false;
    for (std::size_t l = 0; l < a.letters; ++l) {
      auto t = a.next(s, l);
      if (!seen[t]) {
        seen[t] = 1;
        stack.push_back(t);
      }
    }
  }
  return true;
}

inline bool dfa_equivalent(const Dfa& a, const Dfa& b) {
  if (a.predicates != b.predicates || a.letters() != b.letters())
    throw PreconditionError("dfa_equivalent: alphabet mismatch");
  const std::size_t L = a.letters();
  std::unordered_map<std::uint64_t, char> seen;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> stack{{a.initial(), b.initial()}};
  seen[(std::uint64_t{a.initial()} << 32) | b.initial()] = 1;
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    if (a.accepting(x) != b.accepting(y)) return false;
    for (std::size_t l = 0; l < L; ++l) {
      auto nx = a.next(x, l), ny = b.next(y, l);
      if (seen.emplace((std::uint64_t{nx} << 32) | ny, 1).second) stack.emplace_back(nx, ny);
    }
  }
  return true;
}

// Sentence satisfiability over finite words (the empty word included).
inline bool satisfiable(const Formula& sentence, const Signature& sig, CompileOptions opts = {}) {
  return !dfa_empty(compile(sentence, {}, sig, opts));
}

// ---------------------------------------------------------------------------
// Text exchange format

inline std::string serialize(const Dfa& d, const Signature& sig) {
  if (sig.size() != d.predicates) throw PreconditionError("serialize: signature does not match the automaton");
  std::ostringstream out;
  out << "dfa states=" << d.states() << " init=" << d.initial() << " accepting=";
  bool first = true;
  for (std::uint32_t s = 0; s < d.states(); ++s)
    if (d.accepting(s)) {
      out << (first ? "" : ",") << s;
      first = false;
    }
  out << " alphabet=";
  for (std::size_t l = 0; l < d.letters(); ++l) out << (l ? "," : "") << render_letter(letter_at(l, d.predicates), sig);
  out << '\n';
  for (std::uint32_t s = 0; s < d.states(); ++s)
    for (std::size_t l = 0; l < d.letters(); ++l)
      out << s << ' ' << render_letter(letter_at(l, d.predicates), sig) << ' ' << d.next(s, l) << '\n';
  return out.str();
}

inline Dfa deserialize(const std::string& text, const Signature& sig, std::size_t marks) {
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string tag;
  hs >> tag;
  if (tag != "dfa") throw InputError("dfa: missing header");
  std::map<std::string, std::string> fields;
  std::string kv;
  while (hs >> kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw InputError("dfa: malformed header field '" + kv + "'");
    fields[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  for (const char* key : {"states", "init", "accepting", "alphabet"})
    if (!fields.count(key)) throw InputError(std::string("dfa: header lacks ") + key);
  Dfa d;
  d.predicates = sig.size();
  d.marks = marks;
  Automaton& a = d.automaton;
  a.letters = std::size_t{1} << (sig.size() + 1);
  a.states = std::stoul(fields["states"]);
  a.initial = static_cast<std::uint32_t>(std::stoul(fields["init"]));
  a.accepting.assign(a.states, 0);
  std::istringstream acc(fields["accepting"]);
  std::string item;
  while (std::getline(acc, item, ','))
    if (!item.empty()) a.accepting.at(std::stoul(item)) = 1;
  std::size_t alphabet = 0;
  std::istringstream al(fields["alphabet"]);
  while (std::getline(al, item, ',')) ++alphabet;
  if (alphabet != a.letters) throw InputError("dfa: alphabet does not match the signature");
  a.delta.assign(a.states * a.letters, 0);
  std::vector<char> set(a.states * a.letters, 0);
  std::string src, letter, dst;
  while (in >> src >> letter >> dst) {
    std::size_t s = std::stoul(src), t = std::stoul(dst);
    if (s >= a.states || t >= a.states) throw InputError("dfa: state out of range");
    std::size_t l = letter_index(parse_letter(letter, sig), sig.size());
    a.delta[s * a.letters + l] = static_cast<std::uint32_t>(t);
    set[s * a.letters + l] = 1;
  }
  if (std::find(set.begin(), set.end(), 0) != set.end()) throw InputError("dfa: transition function is not total");
  return d;
}

}  // namespace chainrep
