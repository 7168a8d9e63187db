// Epistemological positions as operator variants plus context bindings, and
// the fixed suite of results every engine has to reproduce.

#ifndef CEL_EPISTEMOLOGY_HPP
#define CEL_EPISTEMOLOGY_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cel/dialogue.hpp"
#include "cel/kripke.hpp"
#include "cel/serialize.hpp"
#include "cel/syntax.hpp"

namespace cel {

enum class Stance : std::uint8_t { Sceptic, AntiSceptic, Contextualist, Subjectivist };

std::string_view to_string(Stance s);
std::optional<Stance> parse_stance(std::string_view text);

struct PositionPreset {
    Stance stance;
    Variant variant;
    /// Anti-sceptic bindings; the defaults are a fresh atom `_anti` and Top.
    ContextFormula anti = ContextFormula::of({{"_anti", true}});
    ContextFormula scep = ContextFormula::top();

    static PositionPreset of(Stance s);
};

class PresetError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Preset {
    Formula formula;
    ContextEnv env;
};

/// Tags every untagged operator with the preset's variant (explicit tags are
/// kept) and builds the environment: sceptics bind every context to Top,
/// anti-sceptics to `anti` after checking that it entails `scep` and not
/// conversely, relativists leave contexts to fresh atoms.
Preset apply_preset(const Formula& f, const PositionPreset& p);

/// (f)^c <-> f, valid under the sceptic binding for every f.
Formula collapse_schema(const Formula& f, const std::string& context = "c");

enum class Outcome : std::uint8_t { Valid, Invalid, Unknown };
std::string_view to_string(Outcome o);

struct SuiteRow {
    std::string anchor;
    Formula formula;
    Outcome expected;
    Outcome tableau;
    Outcome dialogue;
    bool agrees() const { return tableau == expected && dialogue == expected; }
};

struct SuiteReport {
    std::vector<SuiteRow> rows;
    bool all_agree() const;
    int mismatches() const;
};

struct SuiteEntry {
    std::string anchor;
    std::string formula;
    bool valid;
};

/// The fixed corpus: introspection and distribution examples, normality for
/// all variants, factivity, mixed agents, and every reduction axiom instance
/// over p, q, contexts ci/cj, agents i/j and all variants.
std::vector<SuiteEntry> reference_corpus();

SuiteReport run_paper_suite(std::uint64_t budget = default_search_budget);

std::string render_report(const SuiteReport& r);
Json report_to_json(const SuiteReport& r);

}  // namespace cel

#endif  // CEL_EPISTEMOLOGY_HPP
