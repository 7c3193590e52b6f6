#include <gtest/gtest.h>

#include "chainrep/oracle.hpp"
#include "chainrep/random_formula.hpp"

using namespace chainrep;

namespace {

const Signature k1 = Signature::numbered(1);
const Signature k2 = Signature::numbered(2);

}  // namespace

TEST(Parse, Atoms) {
  EXPECT_EQ(parse("ex x. P1(x)", k1), exists_fo("x", pred(0, "x")));
  EXPECT_EQ(parse("x < y & ~(x = y)", k1), conj(less("x", "y"), negate(equal("x", "y"))));
  EXPECT_EQ(parse("X(x) -> EX Y. Y(x)", k1), implies(member("X", "x"), exists_so("Y", member("Y", "x"))));
  EXPECT_EQ(parse("atleast 2 x. P1(x)", k1), at_least(2, "x", pred(0, "x")));
}

TEST(Parse, Precedence) {
  EXPECT_EQ(parse("a<b | b<c & c<d", k1), disj(less("a", "b"), conj(less("b", "c"), less("c", "d"))));
  EXPECT_EQ(parse("a<b -> b<c | c<d", k1), implies(less("a", "b"), disj(less("b", "c"), less("c", "d"))));
  // quantifiers extend to the right as far as possible
  EXPECT_EQ(parse("ex x. x<y & P1(x)", k1), exists_fo("x", conj(less("x", "y"), pred(0, "x"))));
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse("ex x", k1), SyntaxError);
  EXPECT_EQ(free_variables(parse("P3(x)", k2)).so, std::vector<std::string>{"P3"});
  EXPECT_THROW(parse("p3(x)", k2), InputError);
  EXPECT_THROW(parse("ex X. X(x)", k1), InputError);  // set variable bound as element
  EXPECT_THROW(parse("x(y)", k1), InputError);
  EXPECT_THROW(parse("x < ", k1), SyntaxError);
  try {
    parse("x < y &", k1);
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 7u);
  }
}

TEST(Render, Stable) {
  EXPECT_EQ(render(exists_fo("x", pred(0, "x")), k1), "ex x. P1(x)");
  EXPECT_EQ(render(parse("a<b & b<c & c<d", k1), k1), "((a<b & b<c) & c<d)");
  EXPECT_EQ(render(parse("P1(x) & P2(x)", Signature({"A", "B"})), k2), "(P1(x) & P2(x))");
}

TEST(Render, RoundTripOnRandomFormulas) {
  RandomFormulaOptions opts;
  opts.set_quantifier_rate = 0.3;
  RandomFormulaGenerator gen(7, opts);
  for (int i = 0; i < 500; ++i) {
    Formula f = gen.next();
    std::string text = render(f, k2);
    Formula back = parse(text, k2);
    EXPECT_EQ(back, f) << text;
    EXPECT_EQ(render(back, k2), text);
  }
}

TEST(QuantifierRank, Examples) {
  EXPECT_EQ(quantifier_rank(pred(0, "x")), 0u);
  EXPECT_EQ(quantifier_rank(parse("ex x. P1(x)", k1)), 1u);
  EXPECT_EQ(quantifier_rank(parse("ex x. (all y. x<y) & (EX X. X(x))", k1)), 2u);
  EXPECT_EQ(quantifier_rank(parse("~~(all x. ex y. x<y)", k1)), 2u);
}

TEST(FreeVariables, Examples) {
  auto a = free_variables(parse("x < y", k1));
  EXPECT_EQ(a.fo, (std::vector<std::string>{"x", "y"}));
  EXPECT_TRUE(a.so.empty());
  EXPECT_EQ(free_variables(parse("ex x. x < y", k1)).fo, std::vector<std::string>{"y"});
  auto c = free_variables(parse("X(x) & ex y. X(y)", k1));
  EXPECT_EQ(c.fo, std::vector<std::string>{"x"});
  EXPECT_EQ(c.so, std::vector<std::string>{"X"});
}

TEST(Substitute, Examples) {
  EXPECT_EQ(substitute(parse("x<y", k1), {{"x", "u"}}), parse("u<y", k1));
  Formula captured = substitute(parse("ex x. x<y", k1), {{"y", "x"}});
  EXPECT_EQ(free_variables(captured).fo, std::vector<std::string>{"x"});
  EXPECT_NE(captured.node().var, "x");
  Formula f = parse("ex z. P1(z) & z<x", k1);
  EXPECT_EQ(substitute(f, {{"x", "x"}}), f);
  EXPECT_THROW(substitute(parse("x<y", k1), {{"x", "y"}}), PreconditionError);
}

TEST(OrderCaseSplit, Trichotomy) {
  auto cases = order_case_split(parse("x < y", k1));
  ASSERT_EQ(cases.size(), 3u);
  std::size_t satisfiable = 0;
  for (const auto& c : cases) {
    bool any = false;
    oracle::for_each_word(1, 3, [&](const Word& w) {
      if (!oracle::satisfying_tuples(c.formula, w, std::nullopt, c.order.representatives()).empty()) any = true;
    });
    satisfiable += any;
  }
  EXPECT_EQ(satisfiable, 1u);
  EXPECT_EQ(order_case_split(parse("P1(x)", k1)).size(), 1u);
}

TEST(OrderCaseSplit, MergedRepresentative) {
  for (const auto& c : order_case_split(parse("x=y & P1(x)", k1))) {
    if (c.order.classes.size() != 1) continue;
    ASSERT_EQ(c.order.representatives(), std::vector<std::string>{"x"});
    oracle::for_each_word(1, 4, [&](const Word& w) {
      for (std::size_t p = 0; p < w.size(); ++p)
        EXPECT_EQ(oracle::evaluate(c.formula, w, {{{"x", p}}, {}}), oracle::evaluate(parse("P1(x)", k1), w, {{{"x", p}}, {}}));
    });
  }
}

TEST(OrderCaseSplit, ExactlyOneCaseHolds) {
  RandomFormulaGenerator gen(11, RandomFormulaOptions{});
  for (int i = 0; i < 40; ++i) {
    Formula f = gen.next();
    auto vars = free_variables(f).fo;
    auto cases = order_case_split(f, vars);
    oracle::for_each_word(2, 3, [&](const Word& w) {
      oracle::for_each_tuple(oracle::all_positions(w), vars.size(), [&](const oracle::Tuple& t) {
        oracle::Assignment a;
        for (std::size_t j = 0; j < vars.size(); ++j) a.fo[vars[j]] = t[j];
        std::size_t holding = 0;
        bool via_case = false;
        for (const auto& c : cases) {
          if (!oracle::evaluate(c.order.constraint(), w, a)) continue;
          ++holding;
          via_case = oracle::evaluate(c.formula, w, a);
        }
        ASSERT_EQ(holding, 1u);
        ASSERT_EQ(via_case, oracle::evaluate(f, w, a)) << render(f, k2);
      });
    });
  }
}

TEST(Macros, LexicographicSelection) {
  // "(x, y) is the 2nd pair with x<y" on a 3-letter word is (0, 2)
  NameSupply names;
  names.reserve("x");
  names.reserve("y");
  Formula second = nth_lex(parse("x<y", k1), {"x", "y"}, 2, names);
  Word w = parse_word("[., ., .]", k1);
  EXPECT_EQ(oracle::satisfying_tuples(second, w, std::nullopt, std::vector<std::string>{"x", "y"}),
            (std::vector<oracle::Tuple>{{0, 2}}));
  Formula least = lex_min(parse("x<y", k1), {"x", "y"}, names);
  EXPECT_EQ(oracle::satisfying_tuples(least, w, std::nullopt, std::vector<std::string>{"x", "y"}),
            (std::vector<oracle::Tuple>{{0, 1}}));
}

TEST(Macros, CountingExpandsToCoreSyntax) {
  Formula f = parse("atleast 3 x. P1(x)", k1);
  Formula e = expand_macros(f);
  EXPECT_EQ(quantifier_rank(e), 3u);
  oracle::for_each_word(1, 5, [&](const Word& w) {
    EXPECT_EQ(oracle::evaluate(f, w, {}), oracle::evaluate(e, w, {}));
  });
}

TEST(NameSupply, SmallestUnusedSuffix) {
  NameSupply names;
  names.reserve(parse("y1<y2 & y4<x", k1));
  EXPECT_EQ(names.fresh("y"), "y3");
  EXPECT_EQ(names.fresh("y"), "y5");
  EXPECT_EQ(names.fresh("x7"), "x1");
}
