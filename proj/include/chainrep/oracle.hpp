#pragma once

// Brute-force MSO semantics over finite words. This is the ground truth the
// automata pipeline is checked against, so it deliberately shares nothing
// with it beyond the syntax tree and word types.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chainrep/bound.hpp"
#include "chainrep/error.hpp"
#include "chainrep/formula.hpp"
#include "chainrep/word.hpp"

namespace chainrep::oracle {

using PositionSet = std::uint64_t;  // bit i set iff position i is in the set
using Tuple = std::vector<std::size_t>;

struct Assignment {
  std::map<std::string, std::size_t> fo;
  std::map<std::string, PositionSet> so;
};

// A formula resolved against an ordered parameter list; evaluation is then
// index based. Immutable and safe to share between threads.
class Evaluator {
 public:
  Evaluator(const Formula& f, std::vector<std::string> fo_params, std::vector<std::string> so_params = {})
      : fo_params_(std::move(fo_params)), so_params_(std::move(so_params)) {
    std::vector<std::pair<std::string, int>> fo_scope, so_scope;
    for (std::size_t i = 0; i < fo_params_.size(); ++i) fo_scope.emplace_back(fo_params_[i], static_cast<int>(i));
    for (std::size_t i = 0; i < so_params_.size(); ++i) so_scope.emplace_back(so_params_[i], static_cast<int>(i));
    fo_slots_ = fo_params_.size();
    so_slots_ = so_params_.size();
    root_ = build(f, fo_scope, so_scope);
  }

  std::size_t fo_arity() const noexcept { return fo_params_.size(); }

  bool operator()(const Word& w, std::span<const std::size_t> fo_values, std::span<const PositionSet> so_values = {}) const {
    if (fo_values.size() != fo_params_.size() || so_values.size() != so_params_.size())
      throw PreconditionError("oracle: wrong number of assigned values");
    State st{w, std::vector<std::size_t>(fo_slots_), std::vector<PositionSet>(so_slots_)};
    for (std::size_t i = 0; i < fo_values.size(); ++i) {
      if (fo_values[i] >= w.size()) throw PreconditionError("oracle: position out of range");
      st.fo[i] = fo_values[i];
    }
    for (std::size_t i = 0; i < so_values.size(); ++i) st.so[i] = so_values[i];
    return eval(root_, st);
  }

 private:
  struct Node {
    Op op;
    int a = -1, b = -1;  // slots
    std::size_t pred = 0;
    std::size_t count = 0;
    int lhs = -1, rhs = -1;
  };
  struct State {
    const Word& w;
    std::vector<std::size_t> fo;
    std::vector<PositionSet> so;
  };

  static int lookup(const std::vector<std::pair<std::string, int>>& scope, const std::string& v) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == v) return it->second;
    throw PreconditionError("oracle: unassigned free variable '" + v + "'");
  }

  int build(const Formula& f, std::vector<std::pair<std::string, int>>& fo_scope,
            std::vector<std::pair<std::string, int>>& so_scope) {
    const auto& n = f.node();
    Node out{n.op};
    switch (n.op) {
      case Op::Less:
      case Op::Equal:
        out.a = lookup(fo_scope, n.var);
        out.b = lookup(fo_scope, n.var2);
        break;
      case Op::Pred:
        out.a = lookup(fo_scope, n.var);
        out.pred = n.pred;
        break;
      case Op::In:
        out.a = lookup(fo_scope, n.var);
        out.b = lookup(so_scope, n.var2);
        break;
      case Op::Not:
        out.lhs = build(n.lhs, fo_scope, so_scope);
        break;
      case Op::And:
      case Op::Or:
      case Op::Implies:
        out.lhs = build(n.lhs, fo_scope, so_scope);
        out.rhs = build(n.rhs, fo_scope, so_scope);
        // & and | are commutative: try the cheaper operand first
        if (n.op != Op::Implies && cost_[out.rhs] < cost_[out.lhs]) std::swap(out.lhs, out.rhs);
        break;
      case Op::ExistsFO:
      case Op::ForallFO:
      case Op::AtLeast:
        out.a = static_cast<int>(fo_slots_++);
        out.count = n.count;
        fo_scope.emplace_back(n.var, out.a);
        out.lhs = build(n.lhs, fo_scope, so_scope);
        fo_scope.pop_back();
        break;
      case Op::ExistsSO:
      case Op::ForallSO:
        out.a = static_cast<int>(so_slots_++);
        so_scope.emplace_back(n.var, out.a);
        out.lhs = build(n.lhs, fo_scope, so_scope);
        so_scope.pop_back();
        break;
      default:
        break;
    }
    double cost = 1;
    if (out.lhs >= 0) cost += cost_[out.lhs];
    if (out.rhs >= 0) cost += cost_[out.rhs];
    if (is_quantifier(n.op)) cost *= (n.op == Op::ExistsSO || n.op == Op::ForallSO) ? 64 : 8;
    nodes_.push_back(out);
    cost_.push_back(cost);
    return static_cast<int>(nodes_.size() - 1);
  }

  // Calls fn on every subset of {0..n-1} by increasing cardinality until fn returns true.
  static bool any_subset(std::size_t n, const std::function<bool(PositionSet)>& fn) {
    if (n > 62) throw ResourceLimit("oracle: set quantification over more than 62 positions");
    const PositionSet full = (PositionSet{1} << n) - 1;
    if (fn(0)) return true;
    for (std::size_t c = 1; c <= n; ++c) {
      PositionSet s = (PositionSet{1} << c) - 1;
      while (s <= full) {
        if (fn(s)) return true;
        PositionSet t = s | (s - 1);  // next subset of the same size
        s = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(s) + 1));
      }
    }
    return false;
  }

  bool eval(int idx, State& st) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    const std::size_t len = st.w.size();
    switch (n.op) {
      case Op::True:
        return true;
      case Op::False:
        return false;
      case Op::Less:
        return st.fo[n.a] < st.fo[n.b];
      case Op::Equal:
        return st.fo[n.a] == st.fo[n.b];
      case Op::Pred:
        return ((st.w[st.fo[n.a]] >> n.pred) & 1U) != 0;
      case Op::In:
        return ((st.so[n.b] >> st.fo[n.a]) & 1U) != 0;
      case Op::Not:
        return !eval(n.lhs, st);
      case Op::And:
        return eval(n.lhs, st) && eval(n.rhs, st);
      case Op::Or:
        return eval(n.lhs, st) || eval(n.rhs, st);
      case Op::Implies:
        return !eval(n.lhs, st) || eval(n.rhs, st);
      case Op::ExistsFO:
        for (std::size_t p = 0; p < len; ++p) {
          st.fo[n.a] = p;
          if (eval(n.lhs, st)) return true;
        }
        return false;
      case Op::ForallFO:
        for (std::size_t p = 0; p < len; ++p) {
          st.fo[n.a] = p;
          if (!eval(n.lhs, st)) return false;
        }
        return true;
      case Op::AtLeast: {
        std::size_t found = 0;
        if (n.count == 0) return true;
        for (std::size_t p = 0; p < len; ++p) {
          st.fo[n.a] = p;
          if (eval(n.lhs, st) && ++found >= n.count) return true;
        }
        return false;
      }
      case Op::ExistsSO:
        return any_subset(len, [&](PositionSet s) {
          st.so[n.a] = s;
          return eval(n.lhs, st);
        });
      case Op::ForallSO:
        return !any_subset(len, [&](PositionSet s) {
          st.so[n.a] = s;
          return !eval(n.lhs, st);
        });
    }
    return false;
  }

  std::vector<std::string> fo_params_, so_params_;
  std::size_t fo_slots_ = 0, so_slots_ = 0;
  std::vector<Node> nodes_;
  std::vector<double> cost_;  // rough evaluation cost per node
  int root_ = -1;
};

inline bool evaluate(const Formula& f, const Word& w, const Assignment& a) {
  std::vector<std::string> fo_names, so_names;
  std::vector<std::size_t> fo_vals;
  std::vector<PositionSet> so_vals;
  for (const auto& [v, p] : a.fo) {
    fo_names.push_back(v);
    fo_vals.push_back(p);
  }
  for (const auto& [v, s] : a.so) {
    so_names.push_back(v);
    so_vals.push_back(s);
  }
  return Evaluator(f, fo_names, so_names)(w, fo_vals, so_vals);
}

// Calls fn on every tuple of the given arity over `domain` in lexicographic order.
inline void for_each_tuple(std::span<const std::size_t> domain, std::size_t arity,
                           const std::function<void(const Tuple&)>& fn) {
  Tuple t(arity);
  std::vector<std::size_t> idx(arity, 0);
  if (arity > 0 && domain.empty()) return;
  while (true) {
    for (std::size_t i = 0; i < arity; ++i) t[i] = domain[idx[i]];
    fn(t);
    std::size_t i = arity;
    while (i > 0) {
      --i;
      if (++idx[i] < domain.size()) break;
      idx[i] = 0;
      if (i == 0) return;
    }
    if (arity == 0) return;
  }
}

inline std::vector<std::size_t> all_positions(const Word& w) {
  std::vector<std::size_t> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = i;
  return out;
}

// All tuples (over `vars`, default the free element variables of f) drawn from
// `restrict` (default: all positions) that satisfy f, in lexicographic order.
inline std::vector<Tuple> satisfying_tuples(const Formula& f, const Word& w,
                                            const std::optional<std::vector<std::size_t>>& restrict = std::nullopt,
                                            std::optional<std::vector<std::string>> vars = std::nullopt) {
  if (!vars) vars = free_variables(f).fo;
  Evaluator ev(f, *vars);
  std::vector<std::size_t> dom = restrict ? *restrict : all_positions(w);
  std::sort(dom.begin(), dom.end());
  dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
  std::vector<Tuple> out;
  for_each_tuple(dom, vars->size(), [&](const Tuple& t) {
    if (ev(w, t)) out.push_back(t);
  });
  return out;
}

// Words of length 0..max_len over 2^k letters, shortlex order.
inline void for_each_word(std::size_t k, std::size_t max_len, const std::function<void(const Word&)>& fn) {
  const std::size_t letters = std::size_t{1} << k;
  for (std::size_t len = 0; len <= max_len; ++len) {
    Word w;
    w.letters.assign(len, 0);
    while (true) {
      fn(w);
      std::size_t i = len;
      bool done = true;
      while (i > 0) {
        --i;
        if (++w.letters[i] < letters) {
          done = false;
          break;
        }
        w.letters[i] = 0;
      }
      if (done) break;
    }
  }
}

inline std::size_t word_count(std::size_t k, std::size_t max_len) {
  std::size_t total = 0, layer = 1;
  for (std::size_t len = 0; len <= max_len; ++len) {
    total += layer;
    layer <<= k;
  }
  return total;
}

inline std::vector<Word> enumerate_words(const Signature& sig, std::size_t max_len, std::size_t budget = 1'000'000) {
  if (sig.size() * max_len > 40 || word_count(sig.size(), max_len) > budget)
    throw ResourceLimit("enumerate_words: more than " + std::to_string(budget) + " words");
  std::vector<Word> out;
  for_each_word(sig.size(), max_len, [&](const Word& w) { out.push_back(w); });
  return out;
}

// ---------------------------------------------------------------------------
// Reparameterization contract check: same domain, functional, bounded preimage,
// and every image coordinate equal to some domain coordinate.

struct ReparamCheck {
  bool ok = true;
  std::size_t words_checked = 0;
  std::size_t observed_max_preimage = 0;
  std::string clause;  // failing clause: same-domain | functional | bounded-preimage | canonical
  std::string word;
  Tuple tuple;
  std::string detail;
};

inline ReparamCheck check_reparameterization(const Formula& f, const std::vector<std::string>& domain,
                                             const Formula& g, const std::vector<std::string>& image,
                                             const Bound& bound, const Signature& sig, std::size_t max_len) {
  ReparamCheck report;
  Evaluator fe(f, domain);
  std::vector<std::string> joint = domain;
  joint.insert(joint.end(), image.begin(), image.end());
  Evaluator ge(g, joint);
  const std::size_t k = domain.size(), d = image.size();
  auto fail = [&](const char* clause, const Word& w, Tuple t, std::string detail) {
    report.ok = false;
    report.clause = clause;
    report.word = render_word(w, sig);
    report.tuple = std::move(t);
    report.detail = std::move(detail);
  };
  for_each_word(sig.size(), max_len, [&](const Word& w) {
    if (!report.ok) return;
    ++report.words_checked;
    auto pos = all_positions(w);
    std::map<Tuple, std::size_t> preimage;
    for_each_tuple(pos, k, [&](const Tuple& xs) {
      if (!report.ok) return;
      bool holds = fe(w, xs);
      std::size_t images = 0;
      Tuple both = xs;
      both.resize(k + d);
      for_each_tuple(pos, d, [&](const Tuple& ys) {
        if (!report.ok) return;
        std::copy(ys.begin(), ys.end(), both.begin() + static_cast<std::ptrdiff_t>(k));
        if (!ge(w, both)) return;
        ++images;
        ++preimage[ys];
        for (auto y : ys)
          if (std::find(xs.begin(), xs.end(), y) == xs.end())
            return fail("canonical", w, both, "image coordinate differs from every domain coordinate");
      });
      if (!report.ok) return;
      if (images > 1) return fail("functional", w, xs, std::to_string(images) + " images");
      if (holds != (images == 1))
        return fail("same-domain", w, xs, holds ? "formula holds but no image" : "image exists but formula fails");
    });
    for (const auto& [ys, count] : preimage) {
      if (!report.ok) return;
      report.observed_max_preimage = std::max(report.observed_max_preimage, count);
      if (Bound(count) > bound) fail("bounded-preimage", w, ys, std::to_string(count) + " preimages");
    }
  });
  return report;
}

}  // namespace chainrep::oracle
