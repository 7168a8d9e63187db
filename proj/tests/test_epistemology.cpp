#include <gtest/gtest.h>

#include "cel/epistemology.hpp"
#include "cel/prove.hpp"
#include "support/random_formula.hpp"

namespace {

using namespace cel;

TEST(Stances, NamesRoundTrip) {
    for (Stance s : {Stance::Sceptic, Stance::AntiSceptic, Stance::Contextualist, Stance::Subjectivist})
        EXPECT_EQ(parse_stance(to_string(s)), s);
    EXPECT_EQ(parse_stance("antisceptic"), Stance::AntiSceptic);
    EXPECT_FALSE(parse_stance("relativist"));
}

TEST(Stances, VariantsPerPosition) {
    EXPECT_EQ(PositionPreset::of(Stance::Sceptic).variant, Variant::V11);
    EXPECT_EQ(PositionPreset::of(Stance::AntiSceptic).variant, Variant::V11);
    EXPECT_EQ(PositionPreset::of(Stance::Contextualist).variant, Variant::V12);
    EXPECT_EQ(PositionPreset::of(Stance::Subjectivist).variant, Variant::V22);
}

TEST(Presets, FillOnlyUntaggedOperators) {
    Preset p = apply_preset(parse_formula("K_i K{j,2.1} p"), PositionPreset::of(Stance::Contextualist));
    EXPECT_EQ(render_formula(p.formula), "K{i,1.2} K{j,2.1} p");
    EXPECT_EQ(p.env.fallback(), ContextEnv::Fallback::FreshAtom);
}

TEST(Presets, ScepticBindsEverythingToTop) {
    Preset p = apply_preset(parse_formula("(K_i p)^ci"), PositionPreset::of(Stance::Sceptic));
    EXPECT_TRUE(p.env.resolve("ci").is_top());
    EXPECT_TRUE(p.env.resolve("anything").is_top());
}

TEST(Presets, AntiScepticChecksItsContext) {
    PositionPreset a = PositionPreset::of(Stance::AntiSceptic);
    Preset p = apply_preset(parse_formula("(K_i p)^ci"), a);
    EXPECT_EQ(p.env.resolve("ci"), a.anti);

    a.anti = parse_context("~b & q");
    a.scep = parse_context("q");
    EXPECT_NO_THROW(apply_preset(parse_formula("p"), a));

    a.scep = parse_context("r");
    EXPECT_THROW(apply_preset(parse_formula("p"), a), PresetError);
    a.scep = parse_context("~b & q");
    EXPECT_THROW(apply_preset(parse_formula("p"), a), PresetError);
    a.anti = ContextFormula::top();
    a.scep = ContextFormula::top();
    EXPECT_THROW(apply_preset(parse_formula("p"), a), PresetError);
    a.anti = ContextFormula::bot();
    EXPECT_THROW(apply_preset(parse_formula("p"), a), PresetError);
}

TEST(Presets, ScepticCollapseOnRandomFormulas) {
    fixtures::GeneratorConfig cfg;
    cfg.max_depth = 3;
    cfg.context_atoms = true;
    fixtures::FormulaGenerator gen(3, cfg);
    for (int k = 0; k < 100; ++k) {
        Preset p = apply_preset(collapse_schema(gen.next()), PositionPreset::of(Stance::Sceptic));
        EXPECT_TRUE(is_valid(prove_cel(p.formula, p.env))) << render_formula(p.formula);
    }
}

TEST(Presets, CollapseFailsForRelativists) {
    Formula f = collapse_schema(parse_formula("K_i p"), "ci");
    for (Stance s : {Stance::Contextualist, Stance::Subjectivist}) {
        Preset p = apply_preset(f, PositionPreset::of(s));
        EXPECT_FALSE(is_valid(prove_cel(p.formula, p.env))) << to_string(s);
    }
}

TEST(Presets, FactivityDependsOnTheStance) {
    Formula t = parse_formula("(K_j K_k p -> K_k p)^ci");
    auto valid_under = [&](Stance s) {
        Preset p = apply_preset(t, PositionPreset::of(s));
        return is_valid(prove_cel(p.formula, p.env));
    };
    EXPECT_TRUE(valid_under(Stance::Sceptic));
    EXPECT_TRUE(valid_under(Stance::AntiSceptic));
    EXPECT_FALSE(valid_under(Stance::Contextualist));
    EXPECT_FALSE(valid_under(Stance::Subjectivist));
}

TEST(Suite, CorpusShape) {
    auto corpus = reference_corpus();
    EXPECT_EQ(corpus.size(), 41U);
    int invalid = 0;
    for (const auto& e : corpus) {
        EXPECT_NO_THROW(parse_formula(e.formula)) << e.formula;
        EXPECT_FALSE(e.anchor.empty());
        invalid += e.valid ? 0 : 1;
    }
    EXPECT_EQ(invalid, 5);
}

TEST(Suite, BothEnginesReproduceEveryRow) {
    SuiteReport r = run_paper_suite();
    EXPECT_TRUE(r.all_agree());
    EXPECT_EQ(r.mismatches(), 0);
    const std::string text = render_report(r);
    EXPECT_NE(text.find("41 rows, 0 mismatches"), std::string::npos);
    Json j = report_to_json(r);
    EXPECT_EQ(j["rows"].size(), 41U);
    EXPECT_EQ(j["mismatches"], 0);
}

TEST(Suite, TinyBudgetLeavesDialogueUnknown) {
    SuiteReport r = run_paper_suite(5);
    EXPECT_FALSE(r.all_agree());
    for (const auto& row : r.rows) EXPECT_NE(row.tableau, Outcome::Unknown);
}

}  // namespace
