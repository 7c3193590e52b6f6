#include <gtest/gtest.h>

#include "chainrep/growth.hpp"

using namespace chainrep;

namespace {

const Signature k0 = Signature::numbered(0);
const Signature k1 = Signature::numbered(1);

const char* kFirst = "~ex y. y<x";
const char* kFirstLast = "x<y & ~(ex z. z<x) & ~(ex z. y<z)";
const char* kConsecutive = "x<y & P1(x) & P1(y) & ~(ex z. x<z & z<y & P1(z))";

void expect_tiled(const WitnessStructure& w) {
  std::size_t at = 0;
  for (const auto& b : w.layout) {
    EXPECT_EQ(b.begin, at);
    at = b.end;
  }
  EXPECT_EQ(at, w.word.size());
  for (auto p : w.marked_set) EXPECT_LT(p, w.word.size());
  EXPECT_TRUE(std::is_sorted(w.marked_set.begin(), w.marked_set.end()));
}

}  // namespace

TEST(GrowthDegree, MatchesDimension) {
  EXPECT_EQ(growth_degree(parse("x<y", k0), k0), 2u);
  EXPECT_EQ(growth_degree(parse(kFirst, k0), k0), 0u);
  EXPECT_EQ(growth_degree(parse("P1(x)", k1), k1), 1u);
}

TEST(BruteGrowth, PairsOfAnOrder) {
  Formula f = parse("x<y", k0);
  EXPECT_EQ(brute_growth(f, 4, 4, k0), 6u);
  auto profile = brute_growth_profile(f, 4, 6, k0);
  for (std::size_t n = 0; n <= 4; ++n) EXPECT_EQ(profile[n], n * (n - (n > 0)) / 2) << n;
}

TEST(BruteGrowth, EmptySelection) {
  EXPECT_EQ(brute_growth(parse("P1(x)", k1), 0, 4, k1), 0u);
  EXPECT_EQ(brute_growth(parse("ex x. P1(x)", k1), 0, 4, k1), 1u);
  EXPECT_EQ(brute_growth(parse("P1(x) & ~P1(x)", k1), 3, 5, k1), 0u);
}

TEST(BruteGrowth, MonotoneInSizeAndLength) {
  for (const char* text : {"P1(x)", kConsecutive, "P1(x) & x<y & ~(ex z. x<z & z<y)"}) {
    Formula f = parse(text, k1);
    std::vector<std::size_t> prev;
    for (std::size_t len = 2; len <= 6; ++len) {
      auto p = brute_growth_profile(f, 4, len, k1);
      EXPECT_TRUE(std::is_sorted(p.begin(), p.end())) << text;
      for (std::size_t n = 0; n < prev.size(); ++n) EXPECT_LE(prev[n], p[n]) << text;
      prev = p;
    }
  }
}

TEST(BruteGrowth, ThreadCountDoesNotMatter) {
  Formula f = parse(kConsecutive, k1);
  GrowthOptions one, many;
  one.threads = 1;
  many.threads = 4;
  EXPECT_EQ(brute_growth_profile(f, 4, 7, k1, one), brute_growth_profile(f, 4, 7, k1, many));
}

TEST(BruteGrowth, WordBudget) {
  GrowthOptions tight;
  tight.max_words = 10;
  EXPECT_THROW(brute_growth(parse("P1(x)", k1), 2, 6, k1, tight), ResourceLimit);
}

TEST(PumpWitness, PredicateBlocks) {
  WitnessStructure w = pump_witness(parse("P1(x)", k1), 5, k1);
  EXPECT_GE(w.claimed_tuple_count, 5u);
  EXPECT_EQ(w.marked_set.size(), 5u);
  for (auto p : w.marked_set) EXPECT_EQ(w.word.letters[p] & 1U, 1U);
  expect_tiled(w);
  EXPECT_EQ(pump_witness(parse("P1(x)", k1), 0, k1).claimed_tuple_count, 0u);
  EXPECT_GE(pump_witness(parse("P1(x)", k1), 1, k1).claimed_tuple_count, 1u);
}

TEST(PumpWitness, RejectsUnpumpablePair) {
  EXPECT_THROW(pump_witness(parse(kFirst, k0), 2, k0), PreconditionError);
  EXPECT_THROW(pump_witness(parse("x<y", k0), 2, k0), PreconditionError);
}

TEST(NoDecrementWitness, Examples) {
  WitnessStructure pairs = no_decrement_witness(parse("x<y", k0), {"x", "y"}, 2, k0);
  EXPECT_LE(pairs.marked_set.size(), 8u);
  EXPECT_GE(pairs.claimed_tuple_count, 16u);
  expect_tiled(pairs);
  WitnessStructure single = no_decrement_witness(parse("P1(x)", k1), {"x"}, 3, k1);
  EXPECT_LE(single.marked_set.size(), 6u);
  EXPECT_GE(single.claimed_tuple_count, 6u);
  WitnessStructure triple = no_decrement_witness(parse("x<y & y<z", k0), {"x", "y", "z"}, 1, k0);
  EXPECT_GE(triple.claimed_tuple_count, 8u);
}

TEST(NoDecrementWitness, RequiresAllPumpable) {
  EXPECT_THROW(no_decrement_witness(parse(kFirstLast, k0), {"x", "y"}, 2, k0), PreconditionError);
}

TEST(GrowthLowerWitness, Examples) {
  WitnessStructure pairs = growth_lower_witness(parse("x<y", k0), 3, k0);
  EXPECT_GE(pairs.claimed_tuple_count, 9u);
  EXPECT_EQ(pairs.required, 9u);
  expect_tiled(pairs);
  EXPECT_GE(growth_lower_witness(parse(kFirstLast, k0), 5, k0).claimed_tuple_count, 1u);
  EXPECT_GE(growth_lower_witness(parse("P1(x)", k1), 4, k1).claimed_tuple_count, 4u);
}

TEST(GrowthLowerWitness, SetGrowsLinearly) {
  Formula f = parse(kConsecutive, k1);
  Reparameterization rep = minimal_reparameterization(f, k1);
  std::vector<std::size_t> sizes;
  for (std::size_t n = 1; n <= 4; ++n) {
    WitnessStructure w = growth_lower_witness(f, rep, n, k1);
    EXPECT_GE(w.claimed_tuple_count, n);
    sizes.push_back(w.marked_set.size());
  }
  for (std::size_t i = 2; i < sizes.size(); ++i) EXPECT_EQ(sizes[i] - sizes[i - 1], sizes[1] - sizes[0]);
}

TEST(GrowthLowerWitness, TwoBuffersPerBlockRun) {
  WitnessStructure w = growth_lower_witness(parse("x<y & y<z", k0), 2, k0);
  std::map<std::size_t, int> buffers;
  for (const auto& b : w.layout)
    if (b.buffer) ++buffers[b.index];
  EXPECT_EQ(buffers, (std::map<std::size_t, int>{{1, 2}, {2, 2}, {3, 2}}));
  // m = 2k + 3 copies plus n
  EXPECT_EQ(std::count_if(w.layout.begin(), w.layout.end(), [](const Block& b) { return b.role == 'U' && b.index == 1; }), 11);
}

TEST(GrowthLowerWitness, UnsatisfiableIsEmpty) {
  WitnessStructure w = growth_lower_witness(parse("P1(x) & ~P1(x)", k1), 3, k1);
  EXPECT_EQ(w.claimed_tuple_count, 0u);
  EXPECT_TRUE(w.word.empty());
}

TEST(GrowthUpperCheck, Examples) {
  Formula pairs = parse("x<y", k0);
  Reparameterization trivial = minimal_reparameterization(pairs, k0);
  for (std::size_t n = 1; n <= 5; ++n) EXPECT_TRUE(growth_upper_check(pairs, trivial, n, 6, k0));
  Formula fl = parse(kFirstLast, k0);
  Reparameterization constant = minimal_reparameterization(fl, k0);
  for (std::size_t n = 0; n <= 4; ++n) EXPECT_TRUE(growth_upper_check(fl, constant, n, 6, k0));
  Formula unsat = parse("P1(x) & ~P1(x)", k1);
  EXPECT_TRUE(growth_upper_check(unsat, minimal_reparameterization(unsat, k1), 3, 4, k1));
}

TEST(GrowthUpperCheck, DetectsUnderstatedBound) {
  Formula pairs = parse("x<y", k0);
  Reparameterization r = minimal_reparameterization(pairs, k0);
  r.image.pop_back();  // claims dimension 1
  EXPECT_FALSE(growth_upper_check(pairs, r, 4, 5, k0));
}

TEST(GrowthReport, Sandwich) {
  GrowthReport g = growth_report(parse(kConsecutive, k1), 4, 7, k1);
  EXPECT_EQ(g.degree(), 1u);
  ASSERT_EQ(g.samples.size(), 4u);
  EXPECT_TRUE(g.sandwich());
  Json j = growth_json(g, k1);
  for (const char* key : {"degree", "bound", "samples"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["samples"][0].size(), 4u);
}

TEST(WitnessDump, Format) {
  std::string text = dump(pump_witness(parse("P1(x)", k1), 2, k1), k1);
  EXPECT_EQ(text.rfind("# witness kind=pump vars=x required=2 count=", 0), 0u);
  EXPECT_NE(text.find("\nword ["), std::string::npos);
  EXPECT_NE(text.find("\nS "), std::string::npos);
  EXPECT_NE(text.find("# U1 copy 2"), std::string::npos);
}
