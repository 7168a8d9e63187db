// Validity over models with equivalence relations: a labelled tableau for the
// plain epistemic fragment, and reduce-then-prove for relativized formulas.

#ifndef CEL_PROVE_HPP
#define CEL_PROVE_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cel/kripke.hpp"
#include "cel/syntax.hpp"

namespace cel {

/// One branch segment of a closed tableau. `steps` lists the rule
/// applications on this segment; a leaf carries the reason it closed.
struct TableauNode {
    std::vector<std::string> steps;
    std::string closure;
    std::vector<TableauNode> children;

    bool closed() const;
    friend bool operator==(const TableauNode&, const TableauNode&) = default;
};

struct Valid {
    TableauNode proof;
    friend bool operator==(const Valid&, const Valid&) = default;
};

struct Invalid {
    KripkeModel model;
    std::string world;
    friend bool operator==(const Invalid&, const Invalid&) = default;
};

using Verdict = std::variant<Valid, Invalid>;

inline bool is_valid(const Verdict& v) { return std::holds_alternative<Valid>(v); }

class ProofError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TableauOptions {
    /// Branch exploration stops with ResourceLimit past this many rule applications.
    std::size_t max_steps = 2'000'000;
};

/// Multi-agent S5 validity of a Rel-free formula. Context references are read
/// through `env`. Invalid verdicts are re-checked with the model evaluator.
Verdict prove_el(const Formula& f, const ContextEnv& env = {}, TableauOptions opts = {});

/// Reduces `f`, proves the result, and re-checks any counter-model against
/// the original formula.
Verdict prove_cel(const Formula& f, const ContextEnv& env = {}, TableauOptions opts = {});

std::string render_tableau(const TableauNode& t);

}  // namespace cel

#endif  // CEL_PROVE_HPP
