#include <gtest/gtest.h>

#include "cel/syntax.hpp"
#include "support/random_formula.hpp"

namespace {

using namespace cel;

TEST(Parse, ImplicationIsRightAssociative) {
    Formula f = parse_formula("p -> q -> r");
    ASSERT_EQ(f.kind(), Kind::Imp);
    EXPECT_EQ(f.left(), Formula::atom("p"));
    EXPECT_EQ(f.right().kind(), Kind::Imp);
}

TEST(Parse, BiconditionalIsLeftAssociative) {
    Formula f = parse_formula("p <-> q <-> r");
    ASSERT_EQ(f.kind(), Kind::Iff);
    EXPECT_EQ(f.left().kind(), Kind::Iff);
    EXPECT_EQ(f.right(), Formula::atom("r"));
}

TEST(Parse, Precedence) {
    EXPECT_EQ(parse_formula("~p & q | r -> s <-> t"),
              parse_formula("((((~p) & q) | r) -> s) <-> t"));
    EXPECT_EQ(parse_formula("K{i,1.1} p & q"), parse_formula("(K{i,1.1} p) & q"));
}

TEST(Parse, KnowledgeTagsAndShorthand) {
    Formula f = parse_formula("K{i,1.2} p");
    EXPECT_EQ(f.kind(), Kind::Know);
    EXPECT_EQ(f.name(), "i");
    EXPECT_EQ(f.variant(), Variant::V12);
    EXPECT_EQ(parse_formula("K_i p").variant(), Variant::Unset);
    EXPECT_EQ(parse_formula("K_i p", Variant::V22).variant(), Variant::V22);
    EXPECT_EQ(parse_formula("K{i,2.1} p", Variant::V22).variant(), Variant::V21);
    EXPECT_EQ(parse_formula("P{j} p").kind(), Kind::Poss);
}

TEST(Parse, RelativizationStacks) {
    Formula f = parse_formula("(p)^ci^cj");
    ASSERT_EQ(f.kind(), Kind::Rel);
    EXPECT_EQ(f.name(), "cj");
    EXPECT_EQ(f.body().kind(), Kind::Rel);
    EXPECT_EQ(f.body().name(), "ci");
    EXPECT_EQ(parse_formula("p^ci"), Formula::rel(Formula::atom("p"), "ci"));
}

TEST(Parse, ContextReference) {
    Formula f = parse_formula("@ci -> p");
    EXPECT_EQ(f.left().kind(), Kind::Ctx);
    EXPECT_EQ(f.left().name(), "ci");
}

TEST(Parse, UnicodeConnectives) {
    EXPECT_EQ(parse_formula("¬p ∧ q → r ∨ s ↔ t"), parse_formula("~p & q -> r | s <-> t"));
}

TEST(Parse, ErrorsCarryPositions) {
    try {
        parse_formula("p &");
        FAIL() << "no error";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.position(), 3U);
    }
    EXPECT_THROW(parse_formula("K{i,3.1} p"), SyntaxError);
    EXPECT_THROW(parse_formula("(p"), SyntaxError);
    EXPECT_THROW(parse_formula("p q"), SyntaxError);
    EXPECT_THROW(parse_formula(""), SyntaxError);
    EXPECT_THROW(parse_formula("K{} p"), SyntaxError);
}

TEST(Render, MinimalParentheses) {
    for (const char* s : {"p -> q -> r", "(p -> q) -> r", "p & q | r", "p & (q | r)", "~K{i,1.2} p",
                          "(p)^ci^cj", "P{j} (p & q)^ci", "p <-> q <-> r", "p <-> (q <-> r)", "@ci -> ~(p)^ci"})
        EXPECT_EQ(render_formula(parse_formula(s)), s);
    EXPECT_EQ(render_formula(parse_formula("K_i p")), "K{i} p");
}

TEST(Render, RoundTripsRandomFormulas) {
    fixtures::GeneratorConfig cfg;
    cfg.max_depth = 5;
    cfg.context_atoms = true;
    fixtures::FormulaGenerator gen(99, cfg);
    for (int k = 0; k < 2000; ++k) {
        Formula f = gen.next();
        const std::string text = render_formula(f);
        ASSERT_EQ(parse_formula(text), f) << text;
    }
}

TEST(Formula, StructuralEqualityAndHash) {
    Formula a = parse_formula("K{i,1.1} (p & q)^ci");
    Formula b = Formula::know("i", Variant::V11, Formula::rel(Formula::conj(Formula::atom("p"), Formula::atom("q")), "ci"));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_NE(a, a.with_variant(Variant::V12));
    EXPECT_FALSE(a < b);
    EXPECT_FALSE(b < a);
    EXPECT_EQ(a.size(), 5U);
}

TEST(Formula, Info) {
    FormulaInfo info = formula_info(parse_formula("(K{i,1.2} K{j,2.2} p)^ci -> @cj | q"));
    EXPECT_EQ(info.atoms, (std::set<std::string>{"p", "q"}));
    EXPECT_EQ(info.agents, (std::set<std::string>{"i", "j"}));
    EXPECT_EQ(info.contexts, (std::set<std::string>{"ci", "cj"}));
    EXPECT_EQ(info.modal_depth, 2);
    EXPECT_FALSE(info.is_el);
    EXPECT_FALSE(info.is_absolute);

    FormulaInfo plain = formula_info(parse_formula("p & ~q"));
    EXPECT_TRUE(plain.is_el);
    EXPECT_TRUE(plain.is_absolute);
    EXPECT_EQ(plain.modal_depth, 0);
}

TEST(Formula, FillVariantsKeepsExplicitTags) {
    Formula f = fill_variants(parse_formula("K_i K{j,2.1} P_k p"), Variant::V12);
    EXPECT_FALSE(has_unset_variant(f));
    EXPECT_EQ(render_formula(f), "K{i,1.2} K{j,2.1} P{k,1.2} p");
    EXPECT_TRUE(has_unset_variant(parse_formula("K{i,1.1} K_j p")));
}

TEST(Variants, NamesAndOwnContexts) {
    EXPECT_EQ(to_string(Variant::V21), "2.1");
    EXPECT_EQ(parse_variant("2.2"), Variant::V22);
    EXPECT_FALSE(parse_variant("3.3"));
    EXPECT_EQ(agent_context("j"), "cj");
}

TEST(Context, CanonicalForm) {
    EXPECT_EQ(parse_context("q & p & q"), parse_context("p & q"));
    EXPECT_TRUE(parse_context("p & ~p").is_bot());
    EXPECT_TRUE(parse_context("true").is_top());
    EXPECT_TRUE(parse_context("⊤").is_top());
    EXPECT_TRUE(parse_context("false").is_bot());
    EXPECT_EQ(render_context(parse_context("~q & p")), "p & ~q");
    EXPECT_THROW(parse_context("p | q"), SyntaxError);
}

TEST(Context, Entailment) {
    ContextFormula pq = parse_context("p & q");
    ContextFormula p = parse_context("p");
    EXPECT_TRUE(pq.entails(p));
    EXPECT_FALSE(p.entails(pq));
    EXPECT_TRUE(p.entails(ContextFormula::top()));
    EXPECT_FALSE(ContextFormula::top().entails(p));
    EXPECT_TRUE(ContextFormula::bot().entails(p));
    EXPECT_FALSE(parse_context("~p").entails(p));
}

}  // namespace
