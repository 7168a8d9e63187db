// cel: command-line front end.
// Exit codes: 0 valid/true/agreement, 1 invalid/false/mismatch, 2 usage or
// input error, 3 search budget exhausted.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cel/dialogue.hpp"
#include "cel/epistemology.hpp"
#include "cel/kripke.hpp"
#include "cel/prove.hpp"
#include "cel/reduce.hpp"
#include "cel/serialize.hpp"
#include "cel/syntax.hpp"

namespace {

constexpr int exit_yes = 0;
constexpr int exit_no = 1;
constexpr int exit_usage = 2;
constexpr int exit_budget = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string variant = "1.1";
    std::string preset;
    std::string env_file;
    std::string model_file;
    std::string world;
    std::string format = "text";
    std::string script;
    int max_worlds = 3;
    std::uint64_t budget = cel::default_search_budget;
    std::string formula;
};

cel::Variant default_variant(const Config& c) {
    auto v = cel::parse_variant(c.variant);
    if (!v || *v == cel::Variant::Unset) throw UsageError("unknown variant '" + c.variant + "'");
    return *v;
}

// Formula and environment after the default variant, an optional preset and
// an optional env file.
std::pair<cel::Formula, cel::ContextEnv> load_input(const Config& c) {
    cel::Formula f = cel::parse_formula(c.formula);
    cel::ContextEnv env;
    if (!c.preset.empty()) {
        auto stance = cel::parse_stance(c.preset);
        if (!stance) throw UsageError("unknown preset '" + c.preset + "'");
        cel::Preset p = cel::apply_preset(f, cel::PositionPreset::of(*stance));
        f = p.formula;
        env = p.env;
    }
    f = cel::fill_variants(f, default_variant(c));
    if (!c.env_file.empty()) {
        cel::ContextEnv loaded = cel::env_from_json(cel::load_json_file(c.env_file));
        for (const auto& [name, body] : loaded.bindings()) env.bind(name, body);
    }
    return {f, env};
}

void require_format(const Config& c, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (c.format == a) return;
    throw UsageError("format '" + c.format + "' is not available for this command");
}

int cmd_parse(const Config& c) {
    require_format(c, {"text", "json"});
    cel::Formula f = cel::parse_formula(c.formula);
    if (c.format == "json") {
        cel::Json j = cel::info_to_json(cel::formula_info(f));
        j["formula"] = cel::render_formula(f);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << cel::render_formula(f) << "\n" << cel::dump_tree(f);
    }
    return exit_yes;
}

int cmd_eval(const Config& c) {
    require_format(c, {"text", "json"});
    if (c.model_file.empty()) throw UsageError("eval needs --model");
    auto [f, env] = load_input(c);
    cel::KripkeModel m = cel::model_from_json(cel::load_json_file(c.model_file));
    std::string w = c.world.empty() ? m.worlds.front() : c.world;
    bool v = cel::satisfies(m, w, env, f);
    if (c.format == "json") std::cout << cel::Json{{"world", w}, {"value", v}}.dump() << "\n";
    else std::cout << (v ? "true" : "false") << "\n";
    return v ? exit_yes : exit_no;
}

int cmd_reduce(const Config& c) {
    require_format(c, {"text", "json"});
    auto [f, env] = load_input(c);
    cel::ReductionTrace t = cel::reduce_full(f);
    if (c.format == "json") {
        std::cout << cel::Json{{"trace", cel::trace_to_json(t)}, {"result", cel::render_formula(t.result)}}.dump(2)
                  << "\n";
        return exit_yes;
    }
    int k = 1;
    for (const auto& s : t.steps)
        std::cout << k++ << ". " << s.axiom << " at " << cel::render_path(s.path) << "\n   "
                  << cel::render_formula(s.before) << "\n   => " << cel::render_formula(s.after) << "\n";
    std::cout << "result: " << cel::render_formula(t.result) << "\n";
    return exit_yes;
}

int cmd_prove(const Config& c) {
    require_format(c, {"text", "json", "dot"});
    auto [f, env] = load_input(c);
    cel::Verdict v = cel::prove_cel(f, env);
    if (c.format == "json") {
        std::cout << cel::verdict_to_json(v).dump(2) << "\n";
    } else if (const auto* ok = std::get_if<cel::Valid>(&v)) {
        std::cout << "valid\n";
        if (c.format == "text") std::cout << cel::render_tableau(ok->proof);
    } else {
        const auto& bad = std::get<cel::Invalid>(v);
        if (c.format == "dot") {
            std::cout << cel::to_dot(bad.model, bad.world);
        } else {
            std::cout << "invalid: false at " << bad.world << " in\n"
                      << cel::model_to_json(bad.model).dump(2) << "\n";
        }
    }
    return cel::is_valid(v) ? exit_yes : exit_no;
}

int cmd_dialogue(const Config& c) {
    require_format(c, {"text", "markdown", "json"});
    auto tf = c.format == "markdown" ? cel::TranscriptFormat::Markdown : cel::TranscriptFormat::Text;

    if (!c.script.empty()) {
        cel::PlayScript script = cel::play_script_from_json(cel::load_json_file(c.script));
        Config with_thesis = c;
        if (c.formula.empty()) {
            if (!script.thesis) throw UsageError("the script has no thesis; give the formula");
            with_thesis.formula = *script.thesis;
        }
        auto [f, env] = load_input(with_thesis);
        cel::GameState s = cel::replay(f, script.moves, cel::GameOptions{env});
        auto w = cel::winner(s);
        if (c.format == "json") {
            std::cout << cel::Json{{"accepted", true},
                                   {"winner", w ? std::string(cel::to_string(*w)) : "none"},
                                   {"play", cel::moves_to_json(s.history())}}
                             .dump(2)
                      << "\n";
        } else {
            std::cout << cel::render_transcript(s, tf);
        }
        return w == cel::Player::P ? exit_yes : exit_no;
    }

    if (c.formula.empty()) throw UsageError("dialogue needs a formula");
    auto [f, env] = load_input(c);
    cel::GameOptions opts{env};
    cel::SearchResult r = cel::has_winning_strategy(f, opts, c.budget);
    if (r.status == cel::SearchResult::Status::BudgetExhausted) {
        std::cerr << "error: search budget of " << c.budget << " positions exhausted\n";
        return exit_budget;
    }
    // a representative play: P follows the strategy, O takes its first option
    cel::GameState s = cel::initial_state(f, opts);
    if (r.status == cel::SearchResult::Status::ProponentWins) {
        while (!cel::winner(s)) {
            if (s.turn() == cel::Player::P) s = cel::apply_move(s, *r.strategy->response(s));
            else s = cel::apply_move(s, cel::legal_moves(s).front());
        }
    } else {
        s = cel::replay(f, r.refuting_play, opts);
    }
    const bool p_wins = r.status == cel::SearchResult::Status::ProponentWins;
    if (c.format == "json") {
        cel::Json j{{"winner", p_wins ? "P" : "O"}, {"nodes", r.nodes}, {"play", cel::moves_to_json(s.history())}};
        if (p_wins) j["strategySize"] = r.strategy->size();
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << (p_wins ? "P has a winning strategy" : "O has a winning strategy") << " (" << r.nodes
                  << " positions)\n\n"
                  << cel::render_transcript(s, tf);
    }
    return p_wins ? exit_yes : exit_no;
}

int cmd_oracle(const Config& c) {
    require_format(c, {"text", "json", "dot"});
    if (c.max_worlds < 1) throw UsageError("--max-worlds must be positive");
    auto [f, env] = load_input(c);
    auto cm = cel::find_countermodel(f, env, c.max_worlds);
    if (c.format == "json") {
        cel::Json j{{"maxWorlds", c.max_worlds}, {"found", cm.has_value()}};
        if (cm) {
            j["world"] = cm->world;
            j["model"] = cel::model_to_json(cm->model);
        }
        std::cout << j.dump(2) << "\n";
    } else if (!cm) {
        std::cout << "no counter-model with at most " << c.max_worlds << " worlds\n";
    } else if (c.format == "dot") {
        std::cout << cel::to_dot(cm->model, cm->world);
    } else {
        std::cout << "counter-model: false at " << cm->world << " in\n" << cel::model_to_json(cm->model).dump(2) << "\n";
    }
    return cm ? exit_no : exit_yes;
}

int cmd_suite(const Config& c) {
    require_format(c, {"text", "json"});
    cel::SuiteReport r = cel::run_paper_suite(c.budget);
    if (c.format == "json") std::cout << cel::report_to_json(r).dump(2) << "\n";
    else std::cout << cel::render_report(r);
    return r.all_agree() ? exit_yes : exit_no;
}

}  // namespace

int main(int argc, char** argv) {
    Config cfg;
    if (const char* b = std::getenv("CEL_BUDGET")) {
        try {
            cfg.budget = std::stoull(b);
        } catch (const std::exception&) {
            std::cerr << "error: CEL_BUDGET must be a positive integer\n";
            return exit_usage;
        }
    }

    CLI::App app{"Contextual epistemic logic: parse, evaluate, reduce, prove and play"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    auto formula_arg = [&](CLI::App* sub) { sub->add_option("formula", cfg.formula, "formula text")->required(); };
    auto common = [&](CLI::App* sub) {
        sub->add_option("--variant", cfg.variant, "variant for untagged K/P operators");
        sub->add_option("--env", cfg.env_file, "context environment JSON file");
        sub->add_option("--preset", cfg.preset, "sceptic, anti-sceptic, contextualist or subjectivist");
    };
    auto format = [&](CLI::App* sub, const std::string& help) { sub->add_option("--format", cfg.format, help); };

    auto* parse = app.add_subcommand("parse", "print the syntax tree");
    formula_arg(parse);
    format(parse, "text or json");

    auto* eval = app.add_subcommand("eval", "truth value at a world of a model");
    formula_arg(eval);
    common(eval);
    eval->add_option("--model", cfg.model_file, "model JSON file")->required();
    eval->add_option("--world", cfg.world, "world (default: first)");
    format(eval, "text or json");

    auto* reduce = app.add_subcommand("reduce", "compile away relativization, printing each step");
    formula_arg(reduce);
    common(reduce);
    format(reduce, "text or json");

    auto* prove = app.add_subcommand("prove", "decide validity by tableau");
    formula_arg(prove);
    common(prove);
    format(prove, "text, json or dot");

    auto* dialogue = app.add_subcommand("dialogue", "search for a winning strategy, or replay a play script");
    dialogue->add_option("formula", cfg.formula, "formula text (optional with a script that names its thesis)");
    common(dialogue);
    dialogue->add_option("--budget", cfg.budget, "maximum positions to explore");
    dialogue->add_option("--script", cfg.script, "play script JSON file to replay");
    format(dialogue, "text, markdown or json");

    auto* oracle = app.add_subcommand("oracle", "bounded counter-model search");
    formula_arg(oracle);
    common(oracle);
    oracle->add_option("--max-worlds", cfg.max_worlds, "largest model size");
    format(oracle, "text, json or dot");

    auto* suite = app.add_subcommand("suite", "run the reproduction suite through both engines");
    suite->add_option("--budget", cfg.budget, "maximum positions per dialogue search");
    format(suite, "text or json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        if (*parse) return cmd_parse(cfg);
        if (*eval) return cmd_eval(cfg);
        if (*reduce) return cmd_reduce(cfg);
        if (*prove) return cmd_prove(cfg);
        if (*dialogue) return cmd_dialogue(cfg);
        if (*oracle) return cmd_oracle(cfg);
        if (*suite) return cmd_suite(cfg);
    } catch (const cel::ResourceLimit& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_budget;
    } catch (const cel::IllegalMove& e) {
        std::cerr << "error: illegal move: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
