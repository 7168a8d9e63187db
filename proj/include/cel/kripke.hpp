// Kripke models with per-agent equivalence relations, the direct satisfaction
// relation for relativized formulas, and bounded model enumeration.

#ifndef CEL_KRIPKE_HPP
#define CEL_KRIPKE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cel/syntax.hpp"

namespace cel {

/// Agent relations are stored as partitions of the world set, so every
/// relation is an equivalence by construction.
struct KripkeModel {
    std::vector<std::string> worlds;
    std::map<std::string, std::vector<std::vector<std::string>>> relations;
    std::map<std::string, std::vector<std::string>> valuation;

    friend bool operator==(const KripkeModel&, const KripkeModel&) = default;
};

/// Empty iff the model is well formed.
std::vector<std::string> check_model(const KripkeModel& m);

/// Prefix of the reserved atoms that stand for unbound contexts.
inline constexpr std::string_view fresh_context_prefix = "_ctx_";

/// Binding of context names to context formulas. Names without an explicit
/// binding fall back to the policy: a reserved atom `_ctx_<name>` (default),
/// a fixed context formula, or an error.
class ContextEnv {
public:
    enum class Fallback { FreshAtom, Constant, Error };

    ContextEnv() = default;
    static ContextEnv fresh_atoms() { return {}; }
    static ContextEnv constant(ContextFormula c);
    static ContextEnv strict();

    ContextEnv& bind(std::string name, ContextFormula body);
    bool is_bound(const std::string& name) const { return bindings_.count(name) != 0; }
    ContextFormula resolve(const std::string& name) const;

    const std::map<std::string, ContextFormula>& bindings() const { return bindings_; }
    Fallback fallback() const { return fallback_; }
    const ContextFormula& fallback_body() const { return fallback_body_; }

    friend bool operator==(const ContextEnv&, const ContextEnv&) = default;

private:
    std::map<std::string, ContextFormula> bindings_;
    Fallback fallback_ = Fallback::FreshAtom;
    ContextFormula fallback_body_;
};

class ModelError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unresolvable context, unknown agent or world, untagged operator.
class EvalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ResourceLimit : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Worlds are indexed 0..n-1 in model order; sets are bit masks (n <= 64).
using WorldSet = std::uint64_t;
inline constexpr int max_model_worlds = 64;

/// Precomputed view of a model for repeated evaluation.
class Evaluator {
public:
    Evaluator(const KripkeModel& m, ContextEnv env);

    int world_count() const { return n_; }
    int world_index(const std::string& name) const;
    WorldSet all() const { return all_; }

    WorldSet truth_set(const Formula& f) const;
    WorldSet context_set(const std::string& context) const;
    bool holds(int world, const Formula& f) const { return (truth_set(f) >> world) & 1U; }

private:
    WorldSet atom_set(const std::string& atom) const;
    WorldSet literal_set(const ContextFormula& c) const;
    WorldSet relativized(const Formula& body, const std::string& ctx) const;
    WorldSet box(const std::string& agent, WorldSet s) const;
    WorldSet diamond(const std::string& agent, WorldSet s) const;

    int n_ = 0;
    WorldSet all_ = 0;
    std::map<std::string, int> index_;
    std::map<std::string, std::vector<WorldSet>> classes_;
    std::map<std::string, WorldSet> valuation_;
    ContextEnv env_;
};

bool eval_context(const KripkeModel& m, const std::string& world, const ContextEnv& env,
                  const std::string& context);
bool satisfies(const KripkeModel& m, const std::string& world, const ContextEnv& env,
               const Formula& f);

/// Restricted growth strings of length n, in lexicographic order.
std::vector<std::vector<int>> set_partitions(int n);
std::uint64_t bell_number(int n);

struct EnumerationSpec {
    int max_worlds = 1;
    std::vector<std::string> agents;
    std::vector<std::string> atoms;
    std::uint64_t ceiling = 20'000'000;
};

/// Number of models enumerate_models visits:
/// sum over n of Bell(n)^|agents| * 2^(n*|atoms|).
std::uint64_t model_count(const EnumerationSpec& spec);

/// Visits every model up to spec.max_worlds worlds: worlds w1..wn, every
/// per-agent partition, every valuation. Order: world count, then agent
/// partitions (agents sorted, restricted growth strings ascending), then
/// valuation (atoms sorted, bit pattern ascending). The visitor returns false
/// to stop. Throws ResourceLimit when model_count exceeds the ceiling.
void enumerate_models(const EnumerationSpec& spec,
                      const std::function<bool(const KripkeModel&)>& visit);

struct Countermodel {
    KripkeModel model;
    std::string world;
};

/// Atoms a brute-force search must vary for `f` under `env`: atoms of f,
/// atoms of bound context bodies, and fresh context atoms (including the
/// agents' own contexts reachable through variants).
std::vector<std::string> relevant_atoms(const Formula& f, const ContextEnv& env);

/// First falsifying point in enumeration order. None does not certify
/// validity: the search is bounded.
std::optional<Countermodel> find_countermodel(const Formula& f, const ContextEnv& env,
                                              int max_worlds,
                                              std::uint64_t ceiling = 20'000'000);

std::string to_dot(const KripkeModel& m, const std::string& highlight = {});

}  // namespace cel

#endif  // CEL_KRIPKE_HPP
