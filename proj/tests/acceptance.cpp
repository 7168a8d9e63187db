// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cel/dialogue.hpp"
#include "cel/epistemology.hpp"
#include "cel/kripke.hpp"
#include "cel/prove.hpp"
#include "cel/reduce.hpp"
#include "cel/serialize.hpp"
#include "cel/syntax.hpp"

#include "support/random_formula.hpp"
#include "support/translate.hpp"

namespace {

using namespace cel;

constexpr std::uint64_t corpus_seed = 20240611;
constexpr std::uint64_t hygiene_seed = 7177;

struct Check {
    bool ok = true;
    std::ostringstream detail;
    int failures = 0;

    void fail(const std::string& what) {
        ok = false;
        if (failures++ < 3) detail << (failures > 1 ? "; " : "") << what;
    }
};

std::vector<Formula> random_corpus() {
    fixtures::GeneratorConfig cfg;
    cfg.max_depth = 3;
    cfg.context_atoms = true;
    return fixtures::FormulaGenerator(corpus_seed, cfg).batch(200);
}

void verdict_corpus(Check& c) {
    SuiteReport r = run_paper_suite();
    for (const auto& row : r.rows)
        if (!row.agrees())
            c.fail(row.anchor + ": tableau " + std::string(to_string(row.tableau)) + ", dialogue " +
                   std::string(to_string(row.dialogue)) + ", expected " + std::string(to_string(row.expected)));
    c.detail << (c.ok ? "" : "; ") << r.rows.size() << " formulas";
}

void transcript_replay(Check& c) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(CEL_PLAYS_DIR))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.size() != 11) c.fail("expected 11 play scripts, found " + std::to_string(files.size()));
    for (const auto& path : files) {
        const std::string name = path.stem().string();
        try {
            PlayScript p = play_script_from_json(load_json_file(path.string()));
            if (!p.thesis || !p.winner) {
                c.fail(name + ": script lacks thesis or winner");
                continue;
            }
            Formula f = parse_formula(*p.thesis);
            GameState s = replay(f, p.moves);
            if (winner(s) != p.winner) c.fail(name + ": replayed play does not end with the recorded winner");
            if (auto bad = check_invariants(s); !bad.empty()) c.fail(name + ": " + bad.front());
            auto r = has_winning_strategy(f);
            const bool p_wins = r.status == SearchResult::Status::ProponentWins;
            const bool o_wins = r.status == SearchResult::Status::OpponentWins;
            if ((*p.winner == Player::P && !p_wins) || (*p.winner == Player::O && !o_wins))
                c.fail(name + ": search verdict differs from the printed winner");
        } catch (const std::exception& e) {
            c.fail(name + ": " + e.what());
        }
    }
    c.detail << (c.ok ? "" : "; ") << files.size() << " plays";
}

void cross_semantics(Check& c) {
    const auto corpus = random_corpus();
    std::vector<Formula> reduced;
    for (const auto& f : corpus) reduced.push_back(reduce_full(f).result);

    // contexts bound to literals over the model's atoms, so they vary with
    // the valuation, plus the two constant bindings
    std::vector<ContextEnv> envs;
    envs.push_back(ContextEnv{}.bind("ci", parse_context("p")).bind("cj", parse_context("~q")));
    envs.push_back(ContextEnv{}.bind("ci", parse_context("p & ~q")).bind("cj", parse_context("q")));
    envs.push_back(ContextEnv::constant(ContextFormula::top()));
    envs.push_back(ContextEnv::constant(ContextFormula::bot()));

    EnumerationSpec spec{3, {"i", "j"}, {"p", "q"}};
    std::uint64_t models = 0, points = 0;
    enumerate_models(spec, [&](const KripkeModel& m) {
        ++models;
        for (const auto& env : envs) {
            Evaluator ev(m, env);
            for (std::size_t k = 0; k < corpus.size(); ++k) {
                const WorldSet a = ev.truth_set(corpus[k]), b = ev.truth_set(reduced[k]);
                points += ev.world_count();
                if (a != b) c.fail(render_formula(corpus[k]) + " differs from its reduct");
            }
        }
        return true;
    });
    c.detail << (c.ok ? "" : "; ") << models << " models x " << envs.size() << " bindings, " << points
             << " points";
}

void reduction_hygiene(Check& c) {
    fixtures::GeneratorConfig cfg;
    cfg.max_depth = 5;
    cfg.context_atoms = true;
    fixtures::FormulaGenerator gen(hygiene_seed, cfg);
    std::size_t steps = 0;
    for (int n = 0; n < 1000; ++n) {
        const Formula f = gen.next();
        try {
            ReductionTrace t = reduce_full(f);
            if (!is_el(t.result)) c.fail(render_formula(f) + ": reduct is not relativization-free");
            for (const auto& s : t.steps) {
                ++steps;
                const Formula redex = subformula_at(s.before, s.path);
                const Formula contractum = subformula_at(s.after, s.path);
                if (replace_at(s.before, s.path, contractum) != s.after)
                    c.fail(render_formula(f) + ": step " + s.axiom + " rewrote outside its path");
                const Formula local = Formula::iff(fixtures::tr(redex), fixtures::tr(contractum));
                if (!is_valid(prove_el(local)))
                    c.fail(render_formula(redex) + " <-> " + render_formula(contractum) + " is not valid");
            }
        } catch (const BudgetExceeded& e) {
            c.fail(render_formula(f) + ": " + e.what());
        }
    }
    c.detail << (c.ok ? "" : "; ") << "1000 formulas, " << steps << " steps";
}

void oracle_consistency(Check& c) {
    std::size_t valid = 0, invalid = 0;
    for (const auto& e : reference_corpus()) {
        const Formula f = parse_formula(e.formula);
        try {
            Verdict v = prove_cel(f);
            if (const auto* bad = std::get_if<Invalid>(&v)) {
                ++invalid;
                if (satisfies(bad->model, bad->world, {}, f)) c.fail(e.anchor + ": witness satisfies the formula");
            } else {
                ++valid;
                if (find_countermodel(f, {}, 3)) c.fail(e.anchor + ": valid but a counter-model exists");
            }
        } catch (const std::exception& err) {
            c.fail(e.anchor + ": " + err.what());
        }
    }
    c.detail << (c.ok ? "" : "; ") << valid << " valid with no 3-world counter-model, " << invalid
             << " invalid with checked witnesses";
}

void sceptic_collapse(Check& c) {
    int n = 0;
    for (const auto& f : random_corpus()) {
        for (const char* ctx : {"ci", "cj", "c"}) {
            Preset p = apply_preset(collapse_schema(f, ctx), PositionPreset::of(Stance::Sceptic));
            if (!is_valid(prove_cel(p.formula, p.env))) c.fail(render_formula(p.formula) + " is not valid");
            ++n;
        }
    }
    c.detail << (c.ok ? "" : "; ") << n << " instances";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
        {"1 verdict corpus (tableau and dialogue)", verdict_corpus},
        {"2 printed plays replay, search agrees with the winner", transcript_replay},
        {"3 relativized and reduced formulas agree on all models <= 3 worlds", cross_semantics},
        {"4 reduction terminates in the plain fragment, every step sound", reduction_hygiene},
        {"5 counter-model oracle consistent with the prover", oracle_consistency},
        {"6 relativization collapses under the sceptic preset", sceptic_collapse},
    };
    bool all = true;
    for (const auto& [name, run] : criteria) {
        Check c;
        auto t0 = std::chrono::steady_clock::now();
        try {
            run(c);
        } catch (const std::exception& e) {
            c.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        all = all && c.ok;
        std::printf("%s  criterion %s (%s) [%.1fs]\n", c.ok ? "PASS" : "FAIL", name.c_str(), c.detail.str().c_str(),
                    secs);
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
