#include "cel/epistemology.hpp"

#include <iomanip>
#include <sstream>

#include "cel/prove.hpp"

namespace cel {

std::string_view to_string(Stance s) {
    switch (s) {
    case Stance::Sceptic: return "sceptic";
    case Stance::AntiSceptic: return "anti-sceptic";
    case Stance::Contextualist: return "contextualist";
    case Stance::Subjectivist: return "subjectivist";
    }
    return "?";
}

std::optional<Stance> parse_stance(std::string_view text) {
    for (Stance s : {Stance::Sceptic, Stance::AntiSceptic, Stance::Contextualist, Stance::Subjectivist})
        if (text == to_string(s)) return s;
    if (text == "antisceptic" || text == "anti_sceptic") return Stance::AntiSceptic;
    return std::nullopt;
}

PositionPreset PositionPreset::of(Stance s) {
    switch (s) {
    case Stance::Sceptic:
    case Stance::AntiSceptic: return {s, Variant::V11};
    case Stance::Contextualist: return {s, Variant::V12};
    case Stance::Subjectivist: return {s, Variant::V22};
    }
    return {s, Variant::V11};
}

Preset apply_preset(const Formula& f, const PositionPreset& p) {
    Formula g = fill_variants(f, p.variant);
    switch (p.stance) {
    case Stance::Sceptic: return {g, ContextEnv::constant(ContextFormula::top())};
    case Stance::AntiSceptic:
        if (p.anti.is_top() || p.anti.is_bot())
            throw PresetError("the anti-sceptic context must be a nonempty consistent conjunction of literals");
        if (!p.anti.entails(p.scep))
            throw PresetError(render_context(p.anti) + " does not entail the sceptic context " +
                              render_context(p.scep));
        if (p.scep.entails(p.anti))
            throw PresetError("the sceptic context " + render_context(p.scep) + " entails " +
                              render_context(p.anti) + " as well");
        return {g, ContextEnv::constant(p.anti)};
    case Stance::Contextualist:
    case Stance::Subjectivist: return {g, ContextEnv::fresh_atoms()};
    }
    return {g, {}};
}

Formula collapse_schema(const Formula& f, const std::string& context) {
    return Formula::iff(Formula::rel(f, context), f);
}

std::string_view to_string(Outcome o) {
    switch (o) {
    case Outcome::Valid: return "valid";
    case Outcome::Invalid: return "invalid";
    case Outcome::Unknown: return "unknown";
    }
    return "?";
}

bool SuiteReport::all_agree() const { return mismatches() == 0; }

int SuiteReport::mismatches() const {
    int n = 0;
    for (const auto& r : rows) n += r.agrees() ? 0 : 1;
    return n;
}

namespace {

const char* const variant_names[] = {"1.1", "1.2", "2.1", "2.2"};

// Right-hand side of the knowledge axiom: guard context and the context the
// body is pushed into, as (current, own) choices.
std::string knowledge_axiom(const std::string& agent, const std::string& v, const std::string& ctx) {
    const std::string own = agent_context(agent);
    const std::string guard = v[0] == '1' ? ctx : own;
    const std::string inner = v[2] == '1' ? ctx : own;
    return "(K{" + agent + "," + v + "} p)^" + ctx + " <-> (@" + guard + " -> K{" + agent + "," + v +
           "} (p)^" + inner + ")";
}

}  // namespace

std::vector<SuiteEntry> reference_corpus() {
    std::vector<SuiteEntry> c = {
        {"positive introspection 1.1", "K{i,1.1} a -> K{i,1.1} K{i,1.1} a", true},
        {"nested knowledge distributes", "K{i,1.1} K{j,1.1} a -> K{i,1.1} a & K{j,1.1} a", true},
        {"introspection across contexts 1.2", "(K{i,1.2} a)^ci -> (K{i,1.2} K{i,1.2} a)^cj", false},
        {"introspection across contexts 2.2", "(K{i,2.2} a)^ci -> (K{i,2.2} K{i,2.2} a)^cj", true},
    };
    for (const char* v : variant_names) {
        const std::string k = std::string("K{j,") + v + "} ";
        c.push_back({std::string("normality ") + v,
                     "((" + k + "p & " + k + "(p -> q)) -> " + k + "q)^ci", true});
    }
    for (const char* v : {"1.1", "1.2", "2.2"}) {
        const std::string v_s = v;
        c.push_back({"factivity of nested knowledge " + v_s,
                     "(K{j," + v_s + "} K{k," + v_s + "} p -> K{k," + v_s + "} p)^ci", v_s == "1.1"});
    }
    c.push_back({"mixed agents", "(K{j,1.1} K{k,2.2} p)^ci -> (K{k,2.2} p)^ci", false});
    c.push_back({"mixed variants, one agent", "(K{j,1.1} K{j,2.2} p)^ci -> (K{j,2.2} p)^ci", false});
    c.push_back({"contextual negation, left to right", "(~p)^ci -> (@ci -> ~(p)^ci)", true});
    c.push_back({"contextual negation, right to left", "(@ci -> ~(p)^ci) -> (~p)^ci", true});

    for (const char* ctx : {"ci", "cj"}) {
        const std::string x = ctx;
        c.push_back({"atoms axiom " + x, "(p)^" + x + " <-> (@" + x + " -> p)", true});
        c.push_back({"negation axiom " + x, "(~p)^" + x + " <-> (@" + x + " -> ~(p)^" + x + ")", true});
        c.push_back({"conjunction axiom " + x, "(p & q)^" + x + " <-> (p)^" + x + " & (q)^" + x, true});
        for (const char* inner : {"ci", "cj"}) {
            const std::string y = inner;
            c.push_back({"iteration axiom " + x + "/" + y,
                         "((p)^" + y + ")^" + x + " <-> (@" + x + " -> (p)^" + y + ")", true});
        }
        for (const char* agent : {"i", "j"})
            for (const char* v : variant_names)
                c.push_back({std::string("knowledge axiom ") + v + " " + agent + " " + x,
                             knowledge_axiom(agent, v, x), true});
    }
    return c;
}

SuiteReport run_paper_suite(std::uint64_t budget) {
    SuiteReport report;
    for (const auto& e : reference_corpus()) {
        Formula f = parse_formula(e.formula);
        SuiteRow row{e.anchor, f, e.valid ? Outcome::Valid : Outcome::Invalid, Outcome::Unknown,
                     Outcome::Unknown};
        try {
            row.tableau = is_valid(prove_cel(f)) ? Outcome::Valid : Outcome::Invalid;
        } catch (const ResourceLimit&) {
        }
        auto r = has_winning_strategy(f, {}, budget);
        if (r.status == SearchResult::Status::ProponentWins) row.dialogue = Outcome::Valid;
        if (r.status == SearchResult::Status::OpponentWins) row.dialogue = Outcome::Invalid;
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string render_report(const SuiteReport& r) {
    std::size_t wa = 6, wf = 7;
    std::vector<std::string> shown;
    for (const auto& row : r.rows) {
        shown.push_back(render_formula(row.formula));
        wa = std::max(wa, row.anchor.size());
        wf = std::max(wf, shown.back().size());
    }
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(wa)) << "anchor" << "  " << std::setw(static_cast<int>(wf))
       << "formula" << "  expected  tableau   dialogue  ok\n";
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
        const auto& row = r.rows[k];
        os << std::setw(static_cast<int>(wa)) << row.anchor << "  " << std::setw(static_cast<int>(wf))
           << shown[k] << "  " << std::setw(8) << to_string(row.expected) << "  " << std::setw(8)
           << to_string(row.tableau) << "  " << std::setw(8) << to_string(row.dialogue) << "  "
           << (row.agrees() ? "yes" : "NO") << "\n";
    }
    os << r.rows.size() << " rows, " << r.mismatches() << " mismatches\n";
    return os.str();
}

Json report_to_json(const SuiteReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"anchor", row.anchor},
                        {"formula", render_formula(row.formula)},
                        {"expected", to_string(row.expected)},
                        {"tableau", to_string(row.tableau)},
                        {"dialogue", to_string(row.dialogue)},
                        {"agrees", row.agrees()}});
    return {{"rows", rows}, {"mismatches", r.mismatches()}};
}

}  // namespace cel
