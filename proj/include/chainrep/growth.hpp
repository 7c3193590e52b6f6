#pragma once

// Growth of the relation defined by a formula: the largest number of
// satisfying tuples drawn from an n-element subset of one word.
//
// The degree is the minimal reparameterization dimension. Three witness
// constructions realise lower bounds on concrete words:
//   pump          L + I^n + U, one satisfying position per copy of I
//   no-decrement  L0 + sum_i (U_i^2N + L_i), (2N)^k tuples over the copy starts
//   growth-lower  L0 + sum_i (U_i^(m+n) + L_i) built from a pumpable disjunct of
//                 the projected reparameterization, n^d transported tuples
// Every reported count comes from the brute-force evaluator.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "chainrep/compiler.hpp"
#include "chainrep/oracle.hpp"
#include "chainrep/reparam.hpp"

namespace chainrep {

struct GrowthOptions {
  ReparamOptions reparam;
  std::size_t max_words = 2'000'000;  // words enumerated by brute_growth
  unsigned threads = 0;               // 0: hardware concurrency
};

// One block of a witness word: a copy of U_i or the chain L_i.
struct Block {
  char role = 'L';  // 'L' or 'U'
  std::size_t index = 0;
  std::size_t copy = 0;  // 1-based for 'U', 0 for 'L'
  std::size_t begin = 0, end = 0;
  bool buffer = false;
};

struct WitnessStructure {
  std::string kind;  // pump | no-decrement | growth-lower
  std::vector<std::string> vars;
  Word word;
  std::vector<std::size_t> marked_set;  // sorted
  std::size_t claimed_tuple_count = 0;  // oracle count of satisfying tuples in S^k
  std::size_t required = 0;             // count the construction guarantees
  std::vector<Block> layout;            // tiles the word
};

namespace detail {

class LayoutBuilder {
 public:
  std::size_t add(char role, std::size_t index, std::size_t copy, const Word& w) {
    std::size_t begin = word.size();
    word += w;
    layout.push_back({role, index, copy, begin, word.size(), false});
    return begin;
  }
  Word word;
  std::vector<Block> layout;
};

inline std::size_t power(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

inline void finish(WitnessStructure& w, const Formula& f, std::vector<std::size_t> s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  w.marked_set = s;
  w.claimed_tuple_count = oracle::satisfying_tuples(f, w.word, s, w.vars).size();
}

inline Word plain(const TypeMonoid& m, Element e) { return underlying(m.witness(e)); }

// Idempotent witnessing pumpability of every adjacent pair of d.
inline std::vector<Element> pumping_idempotents(const TypeMonoid& m, const Disjunct& d) {
  std::vector<Element> out;
  for (std::size_t i = 1; i < d.types.size(); ++i) {
    auto e = is_pumpable(m, d.types[i - 1], d.types[i]);
    if (!e) throw PreconditionError("pair at index " + std::to_string(i) + " is not pumpable");
    out.push_back(*e);
  }
  return out;
}

}  // namespace detail

inline std::size_t growth_degree(const Formula& f, const Signature& sig, ReparamOptions opts = {}) {
  return minimal_reparameterization(f, sig, std::move(opts)).dimension();
}

// Entry n (0 <= n <= max_n) is the maximum, over words of length <= max_len
// and position sets S with |S| <= n, of the number of satisfying tuples in S^k.
inline std::vector<std::size_t> brute_growth_profile(const Formula& f, std::size_t max_n, std::size_t max_len,
                                                     const Signature& sig, const GrowthOptions& opts = {}) {
  auto fv = free_variables(f);
  if (!fv.so.empty()) throw PreconditionError("growth: free set variable '" + fv.so.front() + "'");
  if (max_len > 63) throw ResourceLimit("brute_growth: words longer than 63 positions");
  const std::vector<Word> words = oracle::enumerate_words(sig, max_len, opts.max_words);
  const oracle::Evaluator ev(f, fv.fo);
  const std::size_t k = fv.fo.size();

  auto per_word = [&](const Word& w, std::vector<std::size_t>& best) {
    const std::size_t len = w.size();
    std::vector<std::uint64_t> masks;
    oracle::for_each_tuple(oracle::all_positions(w), k, [&](const oracle::Tuple& t) {
      if (!ev(w, t)) return;
      std::uint64_t m = 0;
      for (auto p : t) m |= std::uint64_t{1} << p;
      masks.push_back(m);
    });
    for (std::size_t n = 0; n <= max_n; ++n) {
      std::size_t count = 0;
      if (k == 0 || n >= len) {
        count = masks.size();
      } else if (n > 0) {
        // every S of size exactly n (Gosper's hack); smaller sets never count more
        const std::uint64_t limit = std::uint64_t{1} << len;
        for (std::uint64_t s = (std::uint64_t{1} << n) - 1; s < limit;) {
          std::size_t c = 0;
          for (auto m : masks) c += (m & ~s) == 0;
          count = std::max(count, c);
          std::uint64_t low = s & (~s + 1), ripple = s + low;
          s = (((ripple ^ s) >> 2) / low) | ripple;
        }
      }
      best[n] = std::max(best[n], count);
    }
  };

  unsigned threads = opts.threads ? opts.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, words.size()));
  std::vector<std::vector<std::size_t>> partial(std::max(1U, threads), std::vector<std::size_t>(max_n + 1, 0));
  std::atomic<std::size_t> next{0};
  auto worker = [&](unsigned id) {
    for (std::size_t i; (i = next.fetch_add(1)) < words.size();) per_word(words[i], partial[id]);
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& t : pool) t.join();
  }
  std::vector<std::size_t> out(max_n + 1, 0);
  for (const auto& p : partial)
    for (std::size_t n = 0; n <= max_n; ++n) out[n] = std::max(out[n], p[n]);
  return out;
}

inline std::size_t brute_growth(const Formula& f, std::size_t n, std::size_t max_len, const Signature& sig,
                                const GrowthOptions& opts = {}) {
  return brute_growth_profile(f, n, max_len, sig, opts)[n];
}

// brute_growth(f, n, max_len) <= bound * n^dimension
inline bool growth_upper_check(const Formula& f, const Reparameterization& rep, std::size_t n, std::size_t max_len,
                               const Signature& sig, const GrowthOptions& opts = {}) {
  Bound cap = rep.bound * Bound(detail::power(n, rep.dimension()));
  return Bound(brute_growth(f, n, max_len, sig, opts)) <= cap;
}

// f has one free element variable; d = (tau0, tau1) with a pumpable pair.
inline WitnessStructure pump_witness(const Formula& f, const Disjunct& d, std::size_t n, const Signature& sig,
                                     const ReparamOptions& opts = {}) {
  auto vars = free_variables(f).fo;
  if (vars.size() != 1) throw PreconditionError("pump_witness: formula must have exactly one free element variable");
  TypeAnalysis a(f, vars, sig, opts);
  if (!a.accepts(d)) throw PreconditionError("pump_witness: disjunct is not in the normal form");
  const TypeMonoid& m = a.monoid();
  Element e = detail::pumping_idempotents(m, d).front();
  detail::LayoutBuilder b;
  std::vector<std::size_t> s;
  b.add('L', 0, 0, detail::plain(m, d.types[0]));
  for (std::size_t c = 1; c <= n; ++c) s.push_back(b.add('U', 1, c, detail::plain(m, e)));
  b.add('L', 1, 0, detail::plain(m, d.types[1]));
  WitnessStructure w{"pump", vars, b.word, {}, 0, n, b.layout};
  detail::finish(w, f, s);
  if (w.claimed_tuple_count < n) throw InternalError("pump_witness: evaluator found fewer than n positions");
  return w;
}

inline WitnessStructure pump_witness(const Formula& f, std::size_t n, const Signature& sig, const ReparamOptions& opts = {}) {
  auto vars = free_variables(f).fo;
  if (vars.size() != 1) throw PreconditionError("pump_witness: formula must have exactly one free element variable");
  auto d = TypeAnalysis(f, vars, sig, opts).all_pumpable_disjunct();
  if (!d) throw PreconditionError("pump_witness: no disjunct with a pumpable pair");
  return pump_witness(f, *d, n, sig, opts);
}

// Every adjacent pair of d pumpable; vars are assigned in ascending order.
inline WitnessStructure no_decrement_witness(const Formula& f, const std::vector<std::string>& vars, const Disjunct& d,
                                             std::size_t big_n, const Signature& sig, const ReparamOptions& opts = {}) {
  TypeAnalysis a(f, vars, sig, opts);
  if (!a.accepts(d)) throw PreconditionError("no_decrement_witness: disjunct is not in the normal form");
  const TypeMonoid& m = a.monoid();
  auto es = detail::pumping_idempotents(m, d);
  const std::size_t k = vars.size();
  detail::LayoutBuilder b;
  std::vector<std::size_t> s;
  b.add('L', 0, 0, detail::plain(m, d.types[0]));
  for (std::size_t i = 1; i <= k; ++i) {
    for (std::size_t c = 1; c <= 2 * big_n; ++c) s.push_back(b.add('U', i, c, detail::plain(m, es[i - 1])));
    b.add('L', i, 0, detail::plain(m, d.types[i]));
  }
  WitnessStructure w{"no-decrement", vars, b.word, {}, 0, detail::power(2 * big_n, k), b.layout};
  detail::finish(w, f, s);
  if (w.claimed_tuple_count < w.required)
    throw InternalError("no_decrement_witness: evaluator found fewer than (2N)^k tuples");
  return w;
}

inline WitnessStructure no_decrement_witness(const Formula& f, const std::vector<std::string>& vars, std::size_t big_n,
                                             const Signature& sig, const ReparamOptions& opts = {}) {
  auto d = TypeAnalysis(f, vars, sig, opts).all_pumpable_disjunct();
  if (!d) throw PreconditionError("no_decrement_witness: no disjunct with every adjacent pair pumpable");
  return no_decrement_witness(f, vars, *d, big_n, sig, opts);
}

// At least n^d satisfying tuples of f inside a set S of size O(n), where
// d = rep.dimension(). rep must be a canonical reparameterization of f.
inline WitnessStructure growth_lower_witness(const Formula& f, const Reparameterization& rep, std::size_t n,
                                             const Signature& sig, const ReparamOptions& opts = {}) {
  if (n == 0) throw PreconditionError("growth_lower_witness: n must be positive");
  const std::vector<std::string>& xs = rep.domain;
  const std::size_t k = xs.size(), d = rep.dimension();
  WitnessStructure out{"growth-lower", xs, {}, {}, 0, 0, {}};
  if (rep.bound == 0) return out;  // unsatisfiable: no tuples at all

  // pumpable disjunct of the projection onto the image, over a strict order case
  Formula projected = rep.g;
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) projected = exists_fo(*it, projected);
  projected = simplify(projected);
  std::optional<Disjunct> pumped;
  std::vector<std::string> ys;
  std::unique_ptr<TypeAnalysis> analysis;
  if (d == 0) {
    analysis = std::make_unique<TypeAnalysis>(projected, ys, sig, opts);
    pumped = analysis->all_pumpable_disjunct();
  } else {
    for (const auto& oc : order_case_split(projected, rep.image)) {
      if (oc.order.classes.size() != d) continue;
      auto reps = oc.order.representatives();
      auto candidate = std::make_unique<TypeAnalysis>(oc.formula, reps, sig, opts);
      if (auto dj = candidate->all_pumpable_disjunct()) {
        pumped = dj;
        ys = reps;
        analysis = std::move(candidate);
        break;
      }
    }
  }
  if (!pumped) throw InternalError("growth_lower_witness: projection has no all-pumpable disjunct");
  const TypeMonoid& mon = analysis->monoid();
  auto es = detail::pumping_idempotents(mon, *pumped);

  const std::size_t m = 2 * k + 3, r = (m + 1) / 2;
  auto build = [&](std::size_t copies) {
    detail::LayoutBuilder b;
    b.add('L', 0, 0, detail::plain(mon, pumped->types[0]));
    for (std::size_t i = 1; i <= d; ++i) {
      for (std::size_t c = 1; c <= copies; ++c) b.add('U', i, c, detail::plain(mon, es[i - 1]));
      b.add('L', i, 0, detail::plain(mon, pumped->types[i]));
    }
    return b;
  };
  auto u_start = [](const detail::LayoutBuilder& b, std::size_t i, std::size_t c) {
    for (const auto& blk : b.layout)
      if (blk.role == 'U' && blk.index == i && blk.copy == c) return blk.begin;
    throw InternalError("growth_lower_witness: missing block");
  };
  auto l_start = [](const detail::LayoutBuilder& b, std::size_t i) {
    for (const auto& blk : b.layout)
      if (blk.role == 'L' && blk.index == i) return blk.begin;
    throw InternalError("growth_lower_witness: missing block");
  };

  // vars of g: domain then image; image coordinates follow the order case
  std::vector<std::string> joint = xs;
  joint.insert(joint.end(), rep.image.begin(), rep.image.end());
  const TrackDfa gdfa = compile_tracks(rep.g, sig, opts.compile);
  auto image_positions = [&](const std::vector<std::size_t>& ypos) {
    std::vector<std::size_t> out;
    for (const auto& y : rep.image) out.push_back(ypos[std::find(ys.begin(), ys.end(), y) - ys.begin()]);
    return out;
  };
  auto holds = [&](const Word& w, std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return accepts(gdfa, w, joint, a);
  };

  // seed: lexicographically least a with g(a, b) in M_1
  const detail::LayoutBuilder m1 = build(m);
  std::vector<std::size_t> b1;
  for (std::size_t i = 1; i <= d; ++i) b1.push_back(u_start(m1, i, r));
  const std::vector<std::size_t> b1_image = image_positions(b1);
  std::vector<std::size_t> seed(k, 0);
  bool found = m1.word.size() > 0 || k == 0;
  if (found) {
    found = false;
    while (true) {
      if (holds(m1.word, seed, b1_image)) {
        found = true;
        break;
      }
      std::size_t i = k;
      while (i > 0 && ++seed[i - 1] == m1.word.size()) seed[--i] = 0;
      if (i == 0) break;
    }
  }
  if (!found) throw InternalError("growth_lower_witness: no seed tuple in the base structure");

  // where each seed coordinate sits; occupied copy offsets C_i and L positions
  struct Place {
    const Block* block;
    std::size_t offset;
  };
  std::vector<Place> places;
  std::vector<std::vector<std::size_t>> offsets(d + 1);
  std::vector<std::vector<char>> occupied(d + 1, std::vector<char>(m + 1, 0));
  for (auto p : seed) {
    const Block* blk = nullptr;
    for (const auto& cand : m1.layout)
      if (cand.begin <= p && p < cand.end) blk = &cand;
    places.push_back({blk, p - blk->begin});
    if (blk->role == 'U') {
      offsets[blk->index].push_back(p - blk->begin);
      occupied[blk->index][blk->copy] = 1;
    }
  }
  std::vector<std::size_t> left(d + 1), right(d + 1);
  for (std::size_t i = 1; i <= d; ++i) {
    left[i] = right[i] = 0;
    for (std::size_t c = r - 1; c >= 1 && !left[i]; --c)
      if (!occupied[i][c]) left[i] = c;
    for (std::size_t c = r + 1; c <= m && !right[i]; ++c)
      if (!occupied[i][c]) right[i] = c;
    if (!left[i] || !right[i]) throw InternalError("growth_lower_witness: no empty buffer copy");
  }

  detail::LayoutBuilder mn = build(m + n);
  for (auto& blk : mn.layout)
    if (blk.role == 'U' && (blk.copy == left[blk.index] || blk.copy == right[blk.index] + n)) blk.buffer = true;
  std::vector<std::size_t> s;
  for (const auto& pl : places)
    if (pl.block->role == 'L') s.push_back(l_start(mn, pl.block->index) + pl.offset);
  for (std::size_t i = 1; i <= d; ++i)
    for (std::size_t c = 1; c <= m + n; ++c)
      for (auto o : offsets[i]) s.push_back(u_start(mn, i, c) + o);

  // transport the seed along every pi : {1..d} -> {1..n}
  std::vector<std::size_t> pi(d, 1);
  std::set<std::vector<std::size_t>> transported;
  while (true) {
    std::vector<std::size_t> c;
    for (std::size_t i = 1; i <= d; ++i) c.push_back(u_start(mn, i, r + pi[i - 1]));
    std::vector<std::size_t> a;
    for (const auto& pl : places) {
      if (pl.block->role == 'L') {
        a.push_back(l_start(mn, pl.block->index) + pl.offset);
        continue;
      }
      std::size_t i = pl.block->index, copy = pl.block->copy;
      std::size_t moved = copy < left[i] ? copy : copy > right[i] ? copy + n : copy + pi[i - 1];
      a.push_back(u_start(mn, i, moved) + pl.offset);
    }
    if (!holds(mn.word, a, image_positions(c)))
      throw InternalError("growth_lower_witness: transported tuple does not satisfy the reparameterization");
    transported.insert(a);
    std::size_t i = d;
    while (i > 0 && ++pi[i - 1] > n) pi[--i] = 1;
    if (i == 0) break;
  }
  out.required = detail::power(n, d);
  if (transported.size() != out.required) throw InternalError("growth_lower_witness: transported tuples collide");
  out.word = mn.word;
  out.layout = mn.layout;
  detail::finish(out, f, s);
  return out;
}

inline WitnessStructure growth_lower_witness(const Formula& f, std::size_t n, const Signature& sig,
                                             const ReparamOptions& opts = {}) {
  return growth_lower_witness(f, minimal_reparameterization(f, sig, opts), n, sig, opts);
}

inline std::string dump(const WitnessStructure& w, const Signature& sig) {
  std::string out = "# witness kind=" + w.kind + " vars=";
  for (std::size_t i = 0; i < w.vars.size(); ++i) out += (i ? "," : "") + w.vars[i];
  out += " required=" + std::to_string(w.required) + " count=" + std::to_string(w.claimed_tuple_count) + "\n";
  out += "word " + render_word(w.word, sig) + "\n";
  out += "S";
  for (std::size_t i = 0; i < w.marked_set.size(); ++i) out += (i ? "," : " ") + std::to_string(w.marked_set[i]);
  out += "\n";
  for (const auto& b : w.layout) {
    out += "# " + std::string(1, b.role) + std::to_string(b.index);
    if (b.role == 'U') out += " copy " + std::to_string(b.copy);
    out += " [" + std::to_string(b.begin) + "," + std::to_string(b.end) + ")";
    if (b.buffer) out += " buffer";
    out += "\n";
  }
  return out;
}

inline Json witness_json(const WitnessStructure& w, const Signature& sig) {
  Json layout = Json::array();
  for (const auto& b : w.layout) {
    Json j{{"role", std::string(1, b.role)}, {"index", b.index}, {"begin", b.begin}, {"end", b.end}};
    if (b.role == 'U') j["copy"] = b.copy;
    if (b.buffer) j["buffer"] = true;
    layout.push_back(j);
  }
  return Json{{"kind", w.kind},         {"vars", w.vars},     {"word", render_word(w.word, sig)},
              {"S", w.marked_set},      {"count", w.claimed_tuple_count},
              {"required", w.required}, {"layout", layout}};
}

struct GrowthSample {
  std::size_t n = 0;
  std::size_t lower = 0;  // growth_lower_witness count
  Bound upper = 0;        // bound * n^degree
  std::size_t brute = 0;  // brute_growth(n, max_len)
};

struct GrowthReport {
  Reparameterization rep;
  std::vector<GrowthSample> samples;

  std::size_t degree() const noexcept { return rep.dimension(); }
  // lower >= n^d (satisfiable f) and brute <= upper at every sample
  bool sandwich() const {
    for (const auto& s : samples) {
      if (rep.bound != 0 && s.lower < detail::power(s.n, degree())) return false;
      if (Bound(s.brute) > s.upper) return false;
    }
    return true;
  }
};

inline GrowthReport growth_report(const Formula& f, std::size_t max_n, std::size_t max_len, const Signature& sig,
                                  const GrowthOptions& opts = {}) {
  GrowthReport out{minimal_reparameterization(f, sig, opts.reparam), {}};
  auto brute = brute_growth_profile(f, max_n, max_len, sig, opts);
  for (std::size_t n = 1; n <= max_n; ++n)
    out.samples.push_back({n, growth_lower_witness(f, out.rep, n, sig, opts.reparam).claimed_tuple_count,
                           out.rep.bound * Bound(detail::power(n, out.degree())), brute[n]});
  return out;
}

inline Json growth_json(const GrowthReport& g, const Signature& sig) {
  Json samples = Json::array();
  for (const auto& s : g.samples)
    samples.push_back(Json{{"n", s.n}, {"lower", s.lower}, {"upper", bound_json(s.upper)}, {"brute", s.brute}});
  return Json{{"formula", render(g.rep.source, sig)},
              {"degree", g.degree()},
              {"bound", bound_json(g.rep.bound)},
              {"samples", samples},
              {"sandwich", g.sandwich()}};
}

}  // namespace chainrep
