// Compilation of relativized formulas into the plain epistemic fragment by
// repeated application of the reduction axioms.

#ifndef CEL_REDUCE_HPP
#define CEL_REDUCE_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cel/syntax.hpp"

namespace cel {

/// Child indices from the root; 0 is the (left) operand, 1 the right one.
using Path = std::vector<int>;

struct Rewrite {
    Formula result;
    std::string axiom;
};

/// Rewrites a single Rel node at its root by the axiom matching its body.
/// Precondition: redex.kind() == Kind::Rel.
Rewrite rewrite_redex(const Formula& redex);

struct ReductionStep {
    Formula before;
    std::string axiom;
    Path path;
    Formula after;
};

/// Rewrites the leftmost-outermost Rel node; none iff f has no Rel node.
std::optional<ReductionStep> reduce_once(const Formula& f);

struct ReductionTrace {
    std::vector<ReductionStep> steps;
    Formula result;
};

class BudgetExceeded : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 4 * |f|^2.
std::size_t default_step_budget(const Formula& f);

ReductionTrace reduce_full(const Formula& f, std::optional<std::size_t> budget = {});

const Formula& subformula_at(const Formula& f, const Path& path);
Formula replace_at(const Formula& f, const Path& path, const Formula& replacement);

std::string render_path(const Path& p);

}  // namespace cel

#endif  // CEL_REDUCE_HPP
