#pragma once

// Seeded random MSO formulas for differential testing.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chainrep/formula.hpp"

namespace chainrep {

struct RandomFormulaOptions {
  std::size_t predicates = 2;
  std::vector<std::string> free_vars{"x", "y"};
  std::size_t max_rank = 3;
  std::size_t max_size = 14;        // soft cap on node count
  double set_quantifier_rate = 0.1;  // share of quantifiers binding a set variable
};

class RandomFormulaGenerator {
 public:
  RandomFormulaGenerator(std::uint64_t seed, RandomFormulaOptions opts) : rng_(seed), opts_(std::move(opts)) {}

  // Every listed free variable occurs free in the result.
  Formula next() {
    size_ = 0;
    fresh_ = 0;
    std::vector<std::string> fo = opts_.free_vars, so;
    Formula f = gen(opts_.max_rank, fo, so);
    auto present = free_variables(f).fo;
    for (const auto& v : opts_.free_vars)
      if (std::find(present.begin(), present.end(), v) == present.end()) f = conj(f, atom_with(v, fo, so));
    return f;
  }

 private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  Formula atom_with(const std::string& x, const std::vector<std::string>& fo, const std::vector<std::string>& so) {
    std::size_t kinds = 3 + (so.empty() ? 0 : 1);
    switch (pick(kinds)) {
      case 0:
        return opts_.predicates ? pred(pick(opts_.predicates), x) : less(x, fo[pick(fo.size())]);
      case 1:
        return less(x, fo[pick(fo.size())]);
      case 2:
        return chance(0.5) ? equal(x, fo[pick(fo.size())]) : less(fo[pick(fo.size())], x);
      default:
        return member(so[pick(so.size())], x);
    }
  }

  Formula atom(const std::vector<std::string>& fo, const std::vector<std::string>& so) {
    if (fo.empty()) return chance(0.5) ? truth() : falsity();
    return atom_with(fo[pick(fo.size())], fo, so);
  }

  Formula gen(std::size_t rank, std::vector<std::string>& fo, std::vector<std::string>& so) {
    ++size_;
    if (size_ >= opts_.max_size || chance(0.25)) return atom(fo, so);
    std::size_t choice = pick(rank > 0 ? 6 : 4);
    switch (choice) {
      case 0:
        return negate(gen(rank, fo, so));
      case 1:
        return conj(gen(rank, fo, so), gen(rank, fo, so));
      case 2:
        return disj(gen(rank, fo, so), gen(rank, fo, so));
      case 3:
        return chance(0.3) ? implies(gen(rank, fo, so), gen(rank, fo, so)) : atom(fo, so);
      default: {
        bool universal = choice == 5;
        if (chance(opts_.set_quantifier_rate)) {
          std::string v = "Z" + std::to_string(++fresh_);
          so.push_back(v);
          Formula body = gen(rank - 1, fo, so);
          so.pop_back();
          return universal ? forall_so(v, body) : exists_so(v, body);
        }
        std::string v = "z" + std::to_string(++fresh_);
        fo.push_back(v);
        Formula body = gen(rank - 1, fo, so);
        fo.pop_back();
        return universal ? forall_fo(v, body) : exists_fo(v, body);
      }
    }
  }

  std::mt19937_64 rng_;
  RandomFormulaOptions opts_;
  std::size_t size_ = 0;
  std::size_t fresh_ = 0;
};

}  // namespace chainrep
