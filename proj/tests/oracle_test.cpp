#include <gtest/gtest.h>

#include "chainrep/oracle.hpp"

using namespace chainrep;
using oracle::Tuple;

namespace {

const Signature k1 = Signature::numbered(1);

bool eval(const char* text, const char* word, oracle::Assignment a = {}) {
  return oracle::evaluate(parse(text, k1), parse_word(word, k1), a);
}

}  // namespace

TEST(Evaluate, Examples) {
  EXPECT_TRUE(eval("P1(x)", "[P1]", {{{"x", 0}}, {}}));
  EXPECT_FALSE(eval("P1(x)", "[., P1]", {{{"x", 0}}, {}}));
  EXPECT_TRUE(eval("EX X. all x. X(x)", "[., P1, .]"));
  EXPECT_TRUE(eval("EX X. all x. X(x)", "[]"));
  EXPECT_TRUE(eval("atleast 2 x. P1(x)", "[P1, ., P1]"));
  EXPECT_FALSE(eval("atleast 3 x. P1(x)", "[P1, ., P1]"));
}

TEST(Evaluate, EmptyWord) {
  EXPECT_FALSE(eval("ex x. x=x", "[]"));
  EXPECT_TRUE(eval("all x. P1(x)", "[]"));
}

TEST(Evaluate, SetQuantifiers) {
  // even length: some set contains the first position, alternates, and misses the last
  const char* even = "ex f. ex l. (~(ex z. z<f)) & (~(ex z. l<z)) & EX X. X(f) & ~X(l) & "
                     "all a. all b. (a<b & ~(ex c. a<c & c<b)) -> (X(a) -> ~X(b)) & (~X(a) -> X(b))";
  for (std::size_t n = 1; n <= 6; ++n) {
    Word w;
    w.letters.assign(n, 0);
    EXPECT_EQ(oracle::evaluate(parse(even, k1), w, {}), n % 2 == 0) << n;
  }
  EXPECT_TRUE(eval("X(x)", "[., .]", {{{"x", 1}}, {{"X", 0b10}}}));
}

TEST(Evaluate, UnassignedVariable) {
  EXPECT_THROW(eval("x<y", "[., .]", {{{"x", 0}}, {}}), PreconditionError);
  EXPECT_THROW(eval("P1(x)", "[.]", {{{"x", 3}}, {}}), PreconditionError);
}

TEST(SatisfyingTuples, Examples) {
  Formula f = parse("x<y", k1);
  Word w = parse_word("[., ., .]", k1);
  EXPECT_EQ(oracle::satisfying_tuples(f, w), (std::vector<Tuple>{{0, 1}, {0, 2}, {1, 2}}));
  EXPECT_EQ(oracle::satisfying_tuples(f, w, std::vector<std::size_t>{2, 0}), (std::vector<Tuple>{{0, 2}}));
  EXPECT_TRUE(oracle::satisfying_tuples(parse("x<y & y<x", k1), w).empty());
}

TEST(EnumerateWords, Counts) {
  EXPECT_EQ(oracle::enumerate_words(Signature::numbered(0), 2).size(), 3u);
  auto one = oracle::enumerate_words(k1, 1);
  ASSERT_EQ(one.size(), 3u);
  EXPECT_TRUE(one[0].empty());
  EXPECT_EQ(one[2].letters, std::vector<Label>{1});
  EXPECT_EQ(oracle::enumerate_words(k1, 3).size(), 15u);
  EXPECT_EQ(oracle::word_count(2, 3), 1u + 4 + 16 + 64);
  EXPECT_THROW(oracle::enumerate_words(Signature::numbered(2), 12, 1000), ResourceLimit);
}

TEST(EnumerateWords, ShortlexOrder) {
  auto words = oracle::enumerate_words(k1, 3);
  for (std::size_t i = 1; i < words.size(); ++i) {
    const auto& a = words[i - 1].letters;
    const auto& b = words[i].letters;
    EXPECT_TRUE(a.size() < b.size() || (a.size() == b.size() && a < b));
  }
}

TEST(CheckReparameterization, IdentityIsFunctional) {
  Formula f = parse("x<y & P1(y)", k1);
  auto r = oracle::check_reparameterization(f, {"x", "y"}, parse("x<y & P1(y) & u=x & v=y", k1), {"u", "v"}, 1, k1, 5);
  EXPECT_TRUE(r.ok) << r.clause;
  EXPECT_LE(r.observed_max_preimage, 1u);
  EXPECT_EQ(r.words_checked, 63u);
}

TEST(CheckReparameterization, FaultInjection) {
  Formula f = parse("x<y & P1(y)", k1);
  // dropped guard: the image no longer implies the domain formula
  auto guard = oracle::check_reparameterization(f, {"x", "y"}, parse("u=x & v=y", k1), {"u", "v"}, 1, k1, 4);
  EXPECT_FALSE(guard.ok);
  EXPECT_EQ(guard.clause, "same-domain");
  // two images for one tuple
  auto two = oracle::check_reparameterization(f, {"x", "y"}, parse("x<y & P1(y) & (u=x | u=y)", k1), {"u"}, 2, k1, 4);
  EXPECT_FALSE(two.ok);
  EXPECT_EQ(two.clause, "functional");
  // keeping only y has two preimages on [., ., P1] but claims one
  auto bound = oracle::check_reparameterization(f, {"x", "y"}, parse("x<y & P1(y) & u=y", k1), {"u"}, 1, k1, 4);
  EXPECT_FALSE(bound.ok);
  EXPECT_EQ(bound.clause, "bounded-preimage");
  // image not a domain position
  auto canon = oracle::check_reparameterization(f, {"x", "y"}, parse("x<y & P1(y) & ~(ex z. z<u)", k1), {"u"}, 4, k1, 4);
  EXPECT_FALSE(canon.ok);
  EXPECT_EQ(canon.clause, "canonical");
}

TEST(Evaluator, ReusableAcrossWords) {
  oracle::Evaluator ev(parse("x<y & P1(x)", k1), {"x", "y"});
  EXPECT_TRUE(ev(parse_word("[P1, .]", k1), std::vector<std::size_t>{0, 1}));
  EXPECT_FALSE(ev(parse_word("[., P1]", k1), std::vector<std::size_t>{0, 1}));
  EXPECT_THROW(ev(parse_word("[P1]", k1), std::vector<std::size_t>{0}), PreconditionError);
}
