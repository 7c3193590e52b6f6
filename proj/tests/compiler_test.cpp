#include <gtest/gtest.h>

#include "chainrep/compiler.hpp"
#include "chainrep/oracle.hpp"
#include "chainrep/random_formula.hpp"

using namespace chainrep;

namespace {

const Signature k1 = Signature::numbered(1);
const Signature k0 = Signature::numbered(0);

MarkedWord mw(const std::string& text, const Signature& sig) { return parse_marked_word(text, sig); }

}  // namespace

TEST(Compile, PredicateAtom) {
  Dfa d = compile(parse("P1(x)", k1), {"x"}, k1);
  EXPECT_TRUE(run(d, mw("[P1*]", k1)));
  EXPECT_FALSE(run(d, mw("[.*]", k1)));
  EXPECT_FALSE(run(d, mw("[P1]", k1)));
  EXPECT_FALSE(run(d, mw("[P1*, P1*]", k1)));
  EXPECT_TRUE(run(d, mw("[., P1*, .]", k1)));
}

TEST(Compile, SentenceRejectsEmptyWord) {
  Dfa d = compile(parse("ex x. P1(x)", k1), {}, k1);
  EXPECT_FALSE(run(d, {}));
  EXPECT_TRUE(run(d, mw("[., P1]", k1)));
  EXPECT_FALSE(run(d, mw("[., .]", k1)));
}

TEST(Compile, Emptiness) {
  EXPECT_TRUE(dfa_empty(compile(parse("x<x", k0), {"x"}, k0)));
  EXPECT_FALSE(dfa_empty(compile(parse("ex x. x=x", k0), {}, k0)));
  EXPECT_TRUE(dfa_empty(compile(parse("P1(x) & ~P1(x)", k1), {"x"}, k1)));
}

TEST(Compile, Equivalence) {
  auto a = compile(parse("x<y", k0), {"x", "y"}, k0);
  auto b = compile(parse("~(y<x) & ~(x=y)", k0), {"x", "y"}, k0);
  EXPECT_TRUE(dfa_equivalent(a, b));
  auto renamed = compile(parse("u<v", k0), {"u", "v"}, k0);
  EXPECT_TRUE(dfa_equivalent(a, renamed));
  EXPECT_FALSE(dfa_equivalent(compile(parse("P1(x)", k1), {"x"}, k1), compile(parse("~P1(x)", k1), {"x"}, k1)));
  EXPECT_THROW(dfa_equivalent(a, compile(parse("P1(x)", k1), {"x"}, k1)), PreconditionError);
}

TEST(Compile, MarkOrderFollowsVariableList) {
  // second mark is x, first is y: accepts iff y<x in position order, i.e. never x<y
  auto d = compile(parse("x<y", k0), {"y", "x"}, k0);
  EXPECT_TRUE(dfa_empty(d));
  auto e = compile(parse("y<x", k0), {"y", "x"}, k0);
  EXPECT_TRUE(run(e, mw("[.*, .*]", k0)));
}

TEST(Compile, EmptyWordOnAcceptingInitial) {
  Dfa d = compile(parse("all x. P1(x)", k1), {}, k1);
  EXPECT_TRUE(d.accepting(d.initial()));
  EXPECT_TRUE(run(d, {}));
}

TEST(Compile, RejectsBadInput) {
  EXPECT_THROW(compile(parse("x<y", k0), {"x"}, k0), PreconditionError);
  EXPECT_THROW(compile(parse("X(x)", k0), {"x"}, k0), PreconditionError);
  Dfa d = compile(parse("P1(x)", k1), {"x"}, k1);
  EXPECT_THROW(run(d, {MarkedLetter{2, true}}), InputError);
}

TEST(Compile, StateBudgetNamesSubformula) {
  CompileOptions tight;
  tight.max_states = 3;
  try {
    compile(parse("ex y. x<y & P1(y)", k1), {"x"}, k1, tight);
    FAIL() << "expected a resource limit";
  } catch (const ResourceLimit& e) {
    EXPECT_NE(std::string(e.what()).find("while compiling"), std::string::npos);
  }
}

TEST(Compile, IsMinimalAndTotal) {
  Dfa d = compile(parse("x<y & P1(x) & ~(ex z. x<z & z<y & P1(z))", k1), {"x", "y"}, k1);
  EXPECT_EQ(d.automaton.delta.size(), d.states() * d.letters());
  // no two distinct states are equivalent: minimizing again keeps the size
  EXPECT_EQ(detail::minimize(d.automaton).states, d.states());
}

TEST(Compile, SerializationRoundTrip) {
  Dfa d = compile(parse("P1(x)", k1), {"x"}, k1);
  std::string text = serialize(d, k1);
  EXPECT_EQ(text.substr(0, text.find('\n')), "dfa states=" + std::to_string(d.states()) +
                                                 " init=0 accepting=" + [&] {
                                                   for (std::uint32_t s = 0; s < d.states(); ++s)
                                                     if (d.accepting(s)) return std::to_string(s);
                                                   return std::string();
                                                 }() + " alphabet=.,P1,.*,P1*");
  Dfa back = deserialize(text, k1, 1);
  EXPECT_TRUE(dfa_equivalent(d, back));
  EXPECT_EQ(serialize(back, k1), text);
}

TEST(Compile, SetQuantifierParity) {
  // even length via a set alternating from the first position
  Formula even = parse(
      "EX X. (all x. (~ex y. y<x) -> ~(X(x))) & (all x. (~ex y. x<y) -> X(x)) & "
      "(all x. all y. (x<y & ~(ex z. x<z & z<y)) -> ((X(x) & ~(X(y))) | (~(X(x)) & X(y))))",
      k0);
  Dfa d = compile(even, {}, k0);
  for (std::size_t n = 0; n < 7; ++n) EXPECT_EQ(run(d, MarkedWord(n)), n % 2 == 0) << n;
  EXPECT_EQ(d.states(), 3u);  // two parity states plus the sink for marked letters
}

// Differential check against the brute-force oracle.
TEST(Compile, AgreesWithOracleOnRandomFormulas) {
  const Signature sig = Signature::numbered(2);
  RandomFormulaOptions opts;
  opts.predicates = 2;
  opts.free_vars = {"x", "y"};
  RandomFormulaGenerator gen(20261016, opts);
  std::size_t checked = 0;
  for (int n = 0; n < 200; ++n) {
    Formula f = gen.next();
    std::vector<std::string> vars = {"x", "y"};
    Dfa d = compile(f, vars, sig);
    oracle::Evaluator ev(f, vars);
    oracle::for_each_word(sig.size(), 5, [&](const Word& w) {
      for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = i + 1; j < w.size(); ++j) {
          std::vector<std::size_t> ms{i, j};
          ASSERT_EQ(run(d, mark_positions(w, ms)), ev(w, ms)) << render(f, sig) << " on " << render_word(w, sig);
          ++checked;
        }
    });
  }
  EXPECT_GT(checked, 0u);
}
