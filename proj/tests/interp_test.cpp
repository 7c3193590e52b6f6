#include <gtest/gtest.h>

#include "chainrep/interp.hpp"

using namespace chainrep;

namespace {

const Signature k1 = Signature::numbered(1);

const char* kSuccessorSpec = R"(# successor pairs starting at a P1 position
component s dim=2 (x,y)
universe P1(x) & x<y & ~(ex z. x<z & z<y)
component p dim=1
universe P1(x1)
relation E/2 on (s,s) (x,y;u,v) := y=u
relation F/2 on (p,s) (a;u,v) := a<u
)";

// y at distance one or two after x: two preimages per image position
const char* kNearSpec = R"(component n dim=2 (x,y)
universe x<y & ~(ex z. ex w. x<z & z<w & w<y)
relation E/2 on (n,n) (x,y;u,v) := y<v
)";

// the first/last pair has dimension 0; a sentence component has dimension 0
const char* kMixedSpec = R"(component e dim=2 (x,y)
universe x<y & ~(ex z. z<x) & ~(ex z. y<z)
component p dim=1 (x)
universe P1(x)
component c dim=0
universe ex x. P1(x)
relation L/2 on (p,e) (a;x,y) := a<y
relation M/1 on (c) () := true
)";

InterpretationSpec spec(const char* text) { return parse_interpretation(text, k1); }

}  // namespace

TEST(InterpretationText, RoundTrip) {
  for (const char* text : {kSuccessorSpec, kNearSpec, kMixedSpec}) {
    InterpretationSpec s = spec(text);
    std::string once = format_interpretation(s, k1);
    EXPECT_EQ(format_interpretation(parse_interpretation(once, k1), k1), once);
  }
}

TEST(InterpretationText, Defaults) {
  InterpretationSpec s = spec("component q dim=2\nuniverse x1<x2\ncomponent p dim=1\nuniverse P1(x1)\nrelation R/2 on (p,p) := x1<x2\n");
  EXPECT_EQ(s.component("q").vars, (std::vector<std::string>{"x1", "x2"}));
  EXPECT_EQ(s.relation_formulas[0].vars, (std::vector<std::vector<std::string>>{{"x1"}, {"x2"}}));
  EXPECT_EQ(s.dimension(), 2u);
}

TEST(InterpretationText, Rejections) {
  EXPECT_THROW(spec("congruence E (x;y) := x=y\n"), InputError);
  EXPECT_THROW(spec("component q dim=1\n"), InputError);                                         // no universe
  EXPECT_THROW(spec("component q dim=1\nuniverse P1(y)\n"), InputError);                         // undeclared
  EXPECT_THROW(spec("component q dim=1\nuniverse P1(x1)\nrelation R/2 on (q) := true\n"), InputError);
  EXPECT_THROW(spec("component q dim=1\nuniverse P1(x1)\nrelation R/1 on (r) := true\n"), InputError);
  EXPECT_THROW(spec("component q dim=2\nuniverse true\nrelation R/1 on (q) := true\n"), InputError);  // needs a list
  EXPECT_THROW(spec("component q dim=1\nuniverse P1(x1) &\n"), InputError);
  EXPECT_THROW(spec("component q dim=x\nuniverse true\n"), InputError);
  EXPECT_THROW(spec("component q dim=1\nuniverse true\ncomponent q dim=1\nuniverse true\n"), InputError);
}

TEST(ApplyInterpretation, OrderedPredicatePositions) {
  InterpretationSpec s = spec("component q dim=1 (x)\nuniverse P1(x)\nrelation E/2 on (q,q) (x;y) := x<y\n");
  OutputStructure out = apply_interpretation(s, parse_word("[P1, ., P1]", k1));
  ASSERT_EQ(out.elements.size(), 2u);
  EXPECT_EQ(out.elements[0].tuple, std::vector<std::size_t>{0});
  EXPECT_EQ(out.elements[1].tuple, std::vector<std::size_t>{2});
  EXPECT_EQ(out.relations["E"], (std::set<std::vector<std::size_t>>{{0, 1}}));
}

TEST(ApplyInterpretation, EmptyAndSentenceComponents) {
  InterpretationSpec unsat = spec("component q dim=1 (x)\nuniverse P1(x) & ~P1(x)\n");
  EXPECT_TRUE(apply_interpretation(unsat, parse_word("[P1, .]", k1)).elements.empty());
  InterpretationSpec mixed = spec(kMixedSpec);
  OutputStructure out = apply_interpretation(mixed, parse_word("[., P1, P1]", k1));
  std::size_t from_c = std::count_if(out.elements.begin(), out.elements.end(), [](const auto& e) { return e.component == "c"; });
  EXPECT_EQ(from_c, 1u);
  EXPECT_EQ(out.relations["M"].size(), 1u);
  EXPECT_EQ(out.relations["L"].size(), 1u);  // a=1 before y=2
}

TEST(ReduceInterpretation, SuccessorPairs) {
  InterpretationSpec s = spec(kSuccessorSpec);
  InterpretationSpec r = reduce_interpretation(s, 1, k1);
  EXPECT_EQ(r.dimension(), 1u);
  EXPECT_EQ(r.component("s_1").vars.size(), 1u);
  EXPECT_FALSE(r.has_component("s_2"));
  EXPECT_EQ(r.origins.at("s_1").bound, 1u);
  EquivalenceReport eq = check_equivalence(s, r, 6, k1);
  EXPECT_TRUE(eq.ok) << eq.word << ": " << eq.detail;
  EXPECT_EQ(eq.words_checked, 127u);
}

TEST(ReduceInterpretation, TwoPreimageSlots) {
  InterpretationSpec s = spec(kNearSpec);
  InterpretationSpec r = reduce_interpretation(s, 1, k1);
  EXPECT_EQ(r.origins.at("n_1").bound, 2u);
  EXPECT_EQ(r.origins.at("n_2").index, 2u);
  EXPECT_EQ(r.relation_formulas.size(), 4u);
  EquivalenceReport eq = check_equivalence(s, r, 5, k1);
  EXPECT_TRUE(eq.ok) << eq.word << ": " << eq.detail;
}

TEST(ReduceInterpretation, SmallComponentsUnchanged) {
  InterpretationSpec s = spec(kMixedSpec);
  InterpretationSpec r = reduce_interpretation(s, 1, k1);
  EXPECT_EQ(r.component("p_1").universe, parse("P1(y1)", k1));
  EXPECT_EQ(r.component("c_1").vars.size(), 0u);
  EXPECT_EQ(r.component("e_1").vars.size(), 0u);
  EquivalenceReport eq = check_equivalence(s, r, 6, k1);
  EXPECT_TRUE(eq.ok) << eq.word << ": " << eq.detail;
}

TEST(ReduceInterpretation, InsufficientDimension) {
  InterpretationSpec s = spec("component q dim=2 (x,y)\nuniverse x<y\n");
  try {
    reduce_interpretation(s, 1, k1);
    FAIL() << "expected an error";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("'q' has minimal dimension 2"), std::string::npos) << e.what();
  }
  EXPECT_TRUE(check_equivalence(s, reduce_interpretation(s, 2, k1), 5, k1).ok);
}

TEST(ReduceInterpretation, FreeDeclaredVariable) {
  // y is unconstrained: minimal dimension 2 even though only x is mentioned
  InterpretationSpec s = spec("component q dim=2 (x,y)\nuniverse P1(x)\n");
  EXPECT_THROW(reduce_interpretation(s, 1, k1), PreconditionError);
}

TEST(CheckEquivalence, SelfAndFaults) {
  InterpretationSpec s = spec(kNearSpec);
  EXPECT_TRUE(check_equivalence(s, s, 5, k1).ok);

  InterpretationSpec r = reduce_interpretation(s, 1, k1);
  InterpretationSpec swapped = r;
  std::swap(swapped.origins.at("n_1").index, swapped.origins.at("n_2").index);
  EquivalenceReport bad_index = check_equivalence(s, swapped, 5, k1);
  EXPECT_FALSE(bad_index.ok);
  EXPECT_FALSE(bad_index.detail.empty());

  InterpretationSpec wrong_universe = r;
  wrong_universe.components[1].universe = wrong_universe.components[0].universe;
  EXPECT_FALSE(check_equivalence(s, wrong_universe, 5, k1).ok);

  InterpretationSpec wrong_relation = r;
  wrong_relation.relation_formulas.pop_back();
  EXPECT_FALSE(check_equivalence(s, wrong_relation, 5, k1).ok);

  InterpretationSpec other = spec("component n dim=1 (x)\nuniverse true\nrelation G/1 on (n) (x) := true\n");
  EXPECT_EQ(check_equivalence(s, other, 3, k1).detail, "output signatures differ");
}
