#include <gtest/gtest.h>

#include "cel/prove.hpp"
#include "cel/reduce.hpp"
#include "support/random_formula.hpp"

namespace {

using namespace cel;

bool valid(const std::string& s, const ContextEnv& env = {}) { return is_valid(prove_cel(parse_formula(s), env)); }

TEST(Tableau, S5Principles) {
    EXPECT_TRUE(valid("K{i,1.1} (p -> q) -> K{i,1.1} p -> K{i,1.1} q"));
    EXPECT_TRUE(valid("K{i,1.1} p -> p"));
    EXPECT_TRUE(valid("K{i,1.1} p -> K{i,1.1} K{i,1.1} p"));
    EXPECT_TRUE(valid("~K{i,1.1} p -> K{i,1.1} ~K{i,1.1} p"));
    EXPECT_TRUE(valid("P{i,1.1} p <-> ~K{i,1.1} ~p"));
    EXPECT_TRUE(valid("p | ~p"));
    EXPECT_TRUE(valid("K{i,1.1} p & K{j,1.1} q -> K{i,1.1} p"));
}

TEST(Tableau, Refutations) {
    EXPECT_FALSE(valid("p -> K{i,1.1} p"));
    EXPECT_FALSE(valid("K{i,1.1} p -> K{j,1.1} p"));
    EXPECT_FALSE(valid("K{i,1.1} K{j,1.1} p -> K{j,1.1} K{i,1.1} p"));
    EXPECT_FALSE(valid("P{i,1.1} p & P{i,1.1} q -> P{i,1.1} (p & q)"));
    EXPECT_FALSE(valid("p"));
}

TEST(Tableau, CounterModelsAreChecked) {
    for (const char* s : {"p -> K{i,1.1} p", "K{i,1.1} K{j,1.1} p -> K{j,1.1} K{i,1.1} p",
                          "(K{i,1.2} a)^ci -> (K{i,1.2} K{i,1.2} a)^cj", "(K{j,1.1} K{k,2.2} p)^ci -> (K{k,2.2} p)^ci"}) {
        Formula f = parse_formula(s);
        Verdict v = prove_cel(f);
        ASSERT_FALSE(is_valid(v)) << s;
        const auto& bad = std::get<Invalid>(v);
        EXPECT_TRUE(check_model(bad.model).empty());
        EXPECT_FALSE(satisfies(bad.model, bad.world, {}, f)) << s;
    }
}

TEST(Tableau, ProofsClose) {
    Verdict v = prove_cel(parse_formula("K{i,1.1} a -> K{i,1.1} K{i,1.1} a"));
    ASSERT_TRUE(is_valid(v));
    const TableauNode& t = std::get<Valid>(v).proof;
    EXPECT_TRUE(t.closed());
    const std::string text = render_tableau(t);
    EXPECT_NE(text.find("closed"), std::string::npos);
}

TEST(Tableau, ContextsReadThroughTheEnvironment) {
    // @ci -> p is valid only if ci entails p
    EXPECT_FALSE(valid("@ci -> p"));
    ContextEnv env;
    env.bind("ci", parse_context("p & q"));
    EXPECT_TRUE(valid("@ci -> p", env));
    EXPECT_TRUE(valid("(p)^ci", env));
    EXPECT_TRUE(valid("~@ci", ContextEnv::constant(ContextFormula::bot())));
}

TEST(Tableau, RejectsBadInput) {
    EXPECT_THROW(prove_el(parse_formula("(p)^ci")), ProofError);
    EXPECT_THROW(prove_el(parse_formula("K_i p -> p")), ProofError);
    EXPECT_THROW(prove_cel(parse_formula("K_i p -> p")), ProofError);
}

TEST(Tableau, StepLimit) {
    TableauOptions tiny;
    tiny.max_steps = 3;
    EXPECT_THROW(prove_el(parse_formula("K{i,1.1} (p -> q) -> K{i,1.1} p -> K{i,1.1} q"), {}, tiny), ResourceLimit);
}

TEST(Tableau, AgreesWithBoundedSearch) {
    // Invalid verdicts carry a checked witness; valid ones must survive a
    // brute-force search over small models.
    fixtures::GeneratorConfig cfg;
    cfg.max_depth = 3;
    cfg.context_atoms = true;
    fixtures::FormulaGenerator gen(404, cfg);
    int valid_seen = 0;
    for (int k = 0; k < 300; ++k) {
        Formula f = gen.next();
        Verdict v = prove_cel(f);
        if (is_valid(v)) {
            ++valid_seen;
            EXPECT_FALSE(find_countermodel(f, {}, 2)) << render_formula(f);
        } else {
            const auto& bad = std::get<Invalid>(v);
            EXPECT_FALSE(satisfies(bad.model, bad.world, {}, f)) << render_formula(f);
        }
    }
    EXPECT_GT(valid_seen, 0);
}

TEST(Tableau, EquivalentToReduct) {
    fixtures::GeneratorConfig cfg;
    cfg.max_depth = 3;
    fixtures::FormulaGenerator gen(77, cfg);
    for (int k = 0; k < 100; ++k) {
        Formula f = gen.next();
        Formula r = reduce_full(f).result;
        EXPECT_TRUE(is_valid(prove_cel(Formula::iff(f, r)))) << render_formula(f);
    }
}

}  // namespace
