#include <gtest/gtest.h>

#include <random>

#include "chainrep/compiler.hpp"
#include "chainrep/monoid.hpp"
#include "chainrep/oracle.hpp"

using namespace chainrep;

namespace {

const Signature k0 = Signature::numbered(0);
const Signature k1 = Signature::numbered(1);

const char* kEven =
    "EX X. (all x. (~ex y. y<x) -> ~(X(x))) & (all x. (~ex y. x<y) -> X(x)) & "
    "(all x. all y. (x<y & ~(ex z. x<z & z<y)) -> ((X(x) & ~(X(y))) | (~(X(x)) & X(y))))";

std::vector<Element> unmarked_elements(const TypeMonoid& m) {
  std::vector<Element> out;
  for (Element e = 0; e < m.size(); ++e)
    if (m.unmarked(e)) out.push_back(e);
  return out;
}

}  // namespace

TEST(TransitionMonoid, ParityHasTwoUnmarkedElements) {
  TypeMonoid m = transition_monoid(compile(parse(kEven, k0), {}, k0));
  auto sub = unmarked_elements(m);
  ASSERT_EQ(sub.size(), 2u);
  Element flip = m.letter_image({0, false});
  EXPECT_NE(flip, TypeMonoid::identity());
  EXPECT_EQ(m.multiply(flip, flip), TypeMonoid::identity());
  EXPECT_TRUE(m.nonempty(TypeMonoid::identity()));
  EXPECT_EQ(m.witness(flip).size(), 1u);
}

TEST(TransitionMonoid, AllWordsIsTrivialOnUnmarkedLetters) {
  TypeMonoid m = transition_monoid(compile(parse("true", k1), {}, k1));
  EXPECT_EQ(unmarked_elements(m).size(), 1u);
  EXPECT_TRUE(m.witness(TypeMonoid::identity()).empty());
}

TEST(TransitionMonoid, IdentityAndAssociativity) {
  TypeMonoid m = transition_monoid(compile(parse("x<y & P1(x) & ~(ex z. x<z & z<y & P1(z))", k1), {"x", "y"}, k1));
  ASSERT_LE(m.size(), 50u);
  for (Element a = 0; a < m.size(); ++a) {
    EXPECT_EQ(m.multiply(a, TypeMonoid::identity()), a);
    EXPECT_EQ(m.multiply(TypeMonoid::identity(), a), a);
    EXPECT_EQ(m.image(m.witness(a)), a);
    for (Element b = 0; b < m.size(); ++b)
      for (Element c = 0; c < m.size(); ++c)
        ASSERT_EQ(m.multiply(m.multiply(a, b), c), m.multiply(a, m.multiply(b, c)));
  }
}

TEST(TransitionMonoid, MorphismOnRandomWords) {
  const Signature sig = Signature::numbered(2);
  Dfa d = compile(parse("ex y. x<y & P2(y) & all z. z<x -> P1(z)", sig), {"x"}, sig);
  TypeMonoid m = transition_monoid(d);
  std::mt19937_64 rng(7);
  auto random_word = [&] {
    MarkedWord w(rng() % 6);
    for (auto& l : w) l = letter_at(rng() % d.letters(), d.predicates);
    return w;
  };
  for (int i = 0; i < 500; ++i) {
    MarkedWord u = random_word(), v = random_word(), uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    ASSERT_EQ(m.image(uv), m.multiply(m.image(u), m.image(v)));
    // the element determines acceptance
    ASSERT_EQ(run(d, uv), d.accepting(m.apply(m.image(uv), d.initial())));
  }
}

TEST(TransitionMonoid, PowersReachIdempotents) {
  TypeMonoid m = transition_monoid(compile(parse(kEven, k0), {}, k0));
  for (Element a = 0; a < m.size(); ++a) {
    Element x = m.power(a, 6);  // 3! covers every element order here
    EXPECT_TRUE(m.idempotent(x));
    EXPECT_TRUE(m.idempotent(m.power(a, m.idempotent_exponent(a))));
  }
}

TEST(Idempotents, ParityMonoid) {
  TypeMonoid m = transition_monoid(compile(parse(kEven, k0), {}, k0));
  auto unmarked_idem = [&](bool nonempty) {
    std::vector<Element> out;
    for (Element e : idempotents(m, nonempty))
      if (m.unmarked(e)) out.push_back(e);
    return out;
  };
  EXPECT_EQ(unmarked_idem(false), std::vector<Element>{TypeMonoid::identity()});
  // a length-two word acts as the identity
  EXPECT_EQ(unmarked_idem(true), std::vector<Element>{TypeMonoid::identity()});
}

TEST(Idempotents, IdentityExcludedWithoutNonemptyRealization) {
  // "x is the first position": no nonempty unmarked word acts as the identity
  TypeMonoid seg = segment_monoid(compile(parse("~ex y. y<x", k0), {"x"}, k0));
  EXPECT_FALSE(seg.nonempty(TypeMonoid::identity()));
  auto all = idempotents(seg, false);
  EXPECT_NE(std::find(all.begin(), all.end(), TypeMonoid::identity()), all.end());
  auto ne = idempotents(seg, true);
  EXPECT_EQ(std::find(ne.begin(), ne.end(), TypeMonoid::identity()), ne.end());
}

TEST(Pumpable, TrivialMonoid) {
  TypeMonoid m = segment_monoid(compile(parse("true", k1), {}, k1));
  ASSERT_EQ(m.size(), 2u);  // the empty segment and every nonempty one
  Element any = m.letter_image({0, false});
  auto w = is_pumpable(m, any, any);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(*w, any);
}

TEST(Pumpable, FirstPositionIsNotPumpable) {
  Dfa d = compile(parse("~ex y. y<x", k0), {"x"}, k0);
  TypeMonoid seg = segment_monoid(d);
  Element suffix = seg.image(Word{{0, 0}});
  EXPECT_FALSE(is_pumpable(seg, TypeMonoid::identity(), suffix).has_value());
}

TEST(Pumpable, EvenPrefixIsPumpableByLengthTwo) {
  std::string even_before =
      "EX X. (all z. (~ex y. y<z) -> ~(X(z))) & (all z. all y. (z<y & ~(ex u. z<u & u<y)) -> "
      "((X(z) & ~(X(y))) | (~(X(z)) & X(y)))) & ~(X(x))";
  Dfa d = compile(parse(even_before, k0), {"x"}, k0);
  TypeMonoid seg = segment_monoid(d);
  Element prefix = seg.image(Word{{0, 0}});
  Element suffix = seg.image(Word{{0}});
  auto e = is_pumpable(seg, prefix, suffix);
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ(seg.witness(*e).size(), 2u);
}

TEST(SegmentMonoid, DeterminesAcceptance) {
  Dfa d = compile(parse("x<y & P1(x) & ~(ex z. x<z & z<y & P1(z))", k1), {"x", "y"}, k1);
  TypeMonoid seg = segment_monoid(d);
  oracle::for_each_word(1, 6, [&](const Word& w) {
    for (std::size_t i = 0; i < w.size(); ++i)
      for (std::size_t j = i + 1; j < w.size(); ++j) {
        MarkedWord marked = mark_positions(w, {i, j});
        ASSERT_EQ(segments_accepted(d, seg, segment_types(seg, marked)), run(d, marked));
      }
  });
}

TEST(Ramsey, Recurrence) {
  EXPECT_EQ(ramsey_bound(1), 3u);
  EXPECT_EQ(ramsey_bound(2), 6u);
  EXPECT_EQ(ramsey_bound(3), 17u);
  EXPECT_EQ(ramsey_bound(4), 66u);
  EXPECT_EQ(ramsey_bound(5), 327u);
  EXPECT_THROW(ramsey_bound(40), ResourceLimit);
  EXPECT_EQ(ramsey_bound_big(3), Bound(17));
  EXPECT_GT(ramsey_bound_big(40), Bound(std::numeric_limits<std::uint64_t>::max()));
  EXPECT_THROW(ramsey_bound(0), PreconditionError);
}

TEST(Dump, Format) {
  TypeMonoid m = transition_monoid(compile(parse(kEven, k0), {}, k0));
  std::string text = dump(m, k0);
  EXPECT_EQ(text.substr(0, text.find('\n')), "monoid size=" + std::to_string(m.size()));
  EXPECT_NE(text.find("0 witness=[] idempotent=1 nonempty=1"), std::string::npos);
}
