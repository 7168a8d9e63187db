#include <gtest/gtest.h>

#include "cel/prove.hpp"
#include "cel/reduce.hpp"
#include "support/random_formula.hpp"
#include "support/translate.hpp"

namespace {

using namespace cel;

Rewrite rw(const std::string& s) { return rewrite_redex(parse_formula(s)); }

TEST(Axioms, OneRewritePerShape) {
    EXPECT_EQ(rw("(p)^ci").result, parse_formula("@ci -> p"));
    EXPECT_EQ(rw("(p)^ci").axiom, "Atoms");
    EXPECT_EQ(rw("(@cj)^ci").result, parse_formula("@ci -> @cj"));
    EXPECT_EQ(rw("((p)^cj)^ci").result, parse_formula("@ci -> (p)^cj"));
    EXPECT_EQ(rw("((p)^cj)^ci").axiom, "Context iteration");
    EXPECT_EQ(rw("(~p)^ci").result, parse_formula("@ci -> ~(p)^ci"));
    EXPECT_EQ(rw("(~p)^ci").axiom, "Contextual negation");
    EXPECT_EQ(rw("(p & q)^ci").result, parse_formula("(p)^ci & (q)^ci"));
    EXPECT_EQ(rw("(p & q)^ci").axiom, "Contextual conjunction");
}

TEST(Axioms, KnowledgeVariants) {
    EXPECT_EQ(rw("(K{j,1.1} p)^ci").result, parse_formula("@ci -> K{j,1.1} (p)^ci"));
    EXPECT_EQ(rw("(K{j,1.2} p)^ci").result, parse_formula("@ci -> K{j,1.2} (p)^cj"));
    EXPECT_EQ(rw("(K{j,2.1} p)^ci").result, parse_formula("@cj -> K{j,2.1} (p)^ci"));
    EXPECT_EQ(rw("(K{j,2.2} p)^ci").result, parse_formula("@cj -> K{j,2.2} (p)^cj"));
    EXPECT_EQ(rw("(K{j,2.2} p)^ci").axiom, "2.2-Contextual Knowledge");
    EXPECT_THROW(rw("(K_j p)^ci"), std::invalid_argument);
    EXPECT_THROW(rw("p"), std::invalid_argument);
}

TEST(Axioms, DerivedConnectives) {
    EXPECT_EQ(rw("(p | q)^ci").result, parse_formula("@ci -> (p)^ci | (q)^ci"));
    EXPECT_EQ(rw("(p -> q)^ci").result, parse_formula("@ci -> ((p)^ci -> (q)^ci)"));
    EXPECT_EQ(rw("(p <-> q)^ci").result, parse_formula("((p -> q) & (q -> p))^ci"));
    EXPECT_EQ(rw("(P{j,1.2} p)^ci").result, parse_formula("(~K{j,1.2} ~p)^ci"));
}

TEST(Axioms, EachRewriteIsSound) {
    // every axiom shape, every variant, checked against the translation oracle
    std::vector<std::string> bodies = {"p", "@cj", "(p)^cj", "~p", "p & q", "p | q", "p -> q", "p <-> q"};
    for (const char* v : {"1.1", "1.2", "2.1", "2.2"}) {
        bodies.push_back(std::string("K{j,") + v + "} p");
        bodies.push_back(std::string("P{i,") + v + "} ~q");
    }
    for (const auto& b : bodies) {
        Formula redex = Formula::rel(parse_formula(b), "ci");
        Formula local = Formula::iff(fixtures::tr(redex), fixtures::tr(rewrite_redex(redex).result));
        EXPECT_TRUE(is_valid(prove_el(local))) << render_formula(redex);
    }
}

TEST(Oracle, DetectsAWrongRewrite) {
    // swapping guard and continuation of a 1.2 operator is not an identity
    Formula redex = parse_formula("(K{j,1.2} p)^ci");
    Formula wrong = parse_formula("@cj -> K{j,1.2} (p)^ci");
    EXPECT_FALSE(is_valid(prove_el(Formula::iff(fixtures::tr(redex), fixtures::tr(wrong)))));
}

TEST(Paths, SubformulaAndReplace) {
    Formula f = parse_formula("p & ~(q -> K{i,1.1} r)");
    EXPECT_EQ(subformula_at(f, {1, 0, 1, 0}), Formula::atom("r"));
    EXPECT_EQ(replace_at(f, {1, 0, 0}, Formula::atom("s")), parse_formula("p & ~(s -> K{i,1.1} r)"));
    EXPECT_EQ(replace_at(f, {}, Formula::atom("s")), Formula::atom("s"));
    EXPECT_THROW(replace_at(f, {0, 0}, Formula::atom("s")), std::invalid_argument);
    EXPECT_EQ(render_path({1, 0, 1}), "1.0.1");
    EXPECT_EQ(render_path({}), "ε");
}

TEST(Strategy, LeftmostOutermost) {
    Formula f = parse_formula("(p)^ci & ((q)^cj)^ck");
    auto s = reduce_once(f);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->path, (Path{0}));
    EXPECT_EQ(s->axiom, "Atoms");

    Formula g = parse_formula("q & ((p)^cj)^ck");
    s = reduce_once(g);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->path, (Path{1}));
    EXPECT_EQ(s->axiom, "Context iteration");

    EXPECT_FALSE(reduce_once(parse_formula("K{i,1.1} p -> @ci")));
}

TEST(Full, TraceIsAChain) {
    Formula f = parse_formula("(K{i,1.2} K{j,2.1} (p & ~q))^ci");
    ReductionTrace t = reduce_full(f);
    ASSERT_FALSE(t.steps.empty());
    EXPECT_EQ(t.steps.front().before, f);
    for (std::size_t k = 1; k < t.steps.size(); ++k) EXPECT_EQ(t.steps[k].before, t.steps[k - 1].after);
    EXPECT_EQ(t.steps.back().after, t.result);
    EXPECT_TRUE(is_el(t.result));
    for (const auto& s : t.steps) EXPECT_EQ(subformula_at(s.before, s.path).kind(), Kind::Rel);
}

TEST(Full, FixedPointOnPlainFormulas) {
    Formula f = parse_formula("K{i,1.1} p -> @ci");
    ReductionTrace t = reduce_full(f);
    EXPECT_TRUE(t.steps.empty());
    EXPECT_EQ(t.result, f);
}

TEST(Full, BudgetIsQuadratic) {
    Formula f = parse_formula("(p & q)^ci");
    EXPECT_EQ(default_step_budget(f), 4U * 16U);
    EXPECT_THROW(reduce_full(parse_formula("((p & q) & r)^ci"), 2), BudgetExceeded);
}

TEST(Full, RandomFormulasReachThePlainFragment) {
    fixtures::GeneratorConfig cfg;
    cfg.max_depth = 6;
    cfg.context_atoms = true;
    fixtures::FormulaGenerator gen(31, cfg);
    for (int k = 0; k < 500; ++k) {
        Formula f = gen.next();
        ReductionTrace t = reduce_full(f);
        EXPECT_TRUE(is_el(t.result)) << render_formula(f);
        EXPECT_LE(t.steps.size(), default_step_budget(f));
    }
}

TEST(Full, DeepContextStacksStayWithinBudget) {
    std::string s = "p";
    for (int k = 0; k < 40; ++k) s = "(" + s + ")^c" + std::to_string(k % 3);
    Formula f = parse_formula("K{i,2.2} " + s);
    EXPECT_NO_THROW(reduce_full(f));
}

}  // namespace
