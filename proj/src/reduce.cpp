#include "cel/reduce.hpp"

namespace cel {

namespace {

// (c_x, c_y) for (K{j,u.v} phi)^c: 1 picks the current context, 2 the
// subject's own.
std::pair<std::string, std::string> knowledge_contexts(const Formula& k, const std::string& c) {
    std::string own = agent_context(k.name());
    switch (k.variant()) {
    case Variant::V11: return {c, c};
    case Variant::V12: return {c, own};
    case Variant::V21: return {own, c};
    case Variant::V22: return {own, own};
    case Variant::Unset: break;
    }
    throw std::invalid_argument("knowledge operator without variant: " + render_formula(k));
}

std::string knowledge_axiom(Variant v) {
    return std::string(to_string(v)) + "-Contextual Knowledge";
}

bool find_redex(const Formula& f, Path& path) {
    if (f.kind() == Kind::Rel) return true;
    if (f.is_atomic()) return false;
    path.push_back(0);
    if (find_redex(f.left(), path)) return true;
    path.pop_back();
    if (f.is_binary()) {
        path.push_back(1);
        if (find_redex(f.right(), path)) return true;
        path.pop_back();
    }
    return false;
}

}  // namespace

Rewrite rewrite_redex(const Formula& redex) {
    if (redex.kind() != Kind::Rel) throw std::invalid_argument("not a relativized formula");
    const Formula& g = redex.body();
    const std::string& c = redex.name();
    Formula ctx = Formula::context(c);
    switch (g.kind()) {
    case Kind::Atom:
    case Kind::Ctx: return {Formula::imp(ctx, g), "Atoms"};
    case Kind::Rel: return {Formula::imp(ctx, g), "Context iteration"};
    case Kind::Not:
        return {Formula::imp(ctx, Formula::negation(Formula::rel(g.body(), c))),
                "Contextual negation"};
    case Kind::And:
        return {Formula::conj(Formula::rel(g.left(), c), Formula::rel(g.right(), c)),
                "Contextual conjunction"};
    case Kind::Know: {
        auto [x, y] = knowledge_contexts(g, c);
        return {Formula::imp(Formula::context(x),
                             Formula::know(g.name(), g.variant(), Formula::rel(g.body(), y))),
                knowledge_axiom(g.variant())};
    }
    case Kind::Or:
        return {Formula::imp(ctx, Formula::disj(Formula::rel(g.left(), c),
                                                Formula::rel(g.right(), c))),
                "derived-∨"};
    case Kind::Imp:
        return {Formula::imp(ctx, Formula::imp(Formula::rel(g.left(), c),
                                               Formula::rel(g.right(), c))),
                "derived-→"};
    case Kind::Iff:
        return {Formula::rel(Formula::conj(Formula::imp(g.left(), g.right()),
                                           Formula::imp(g.right(), g.left())),
                             c),
                "derived-↔"};
    case Kind::Poss:
        if (g.variant() == Variant::Unset)
            throw std::invalid_argument("possibility operator without variant: " +
                                        render_formula(g));
        return {Formula::rel(Formula::negation(Formula::know(
                                 g.name(), g.variant(), Formula::negation(g.body()))),
                             c),
                "derived-P"};
    }
    throw std::logic_error("unreachable");
}

const Formula& subformula_at(const Formula& f, const Path& path) {
    const Formula* cur = &f;
    for (int step : path) cur = step == 0 ? &cur->left() : &cur->right();
    return *cur;
}

namespace {

Formula rebuild(const Formula& f, const Path& path, std::size_t at, const Formula& repl) {
    if (at == path.size()) return repl;
    const bool left = path[at] == 0;
    switch (f.kind()) {
    case Kind::Not: return Formula::negation(rebuild(f.body(), path, at + 1, repl));
    case Kind::Rel: return Formula::rel(rebuild(f.body(), path, at + 1, repl), f.name());
    case Kind::Know:
        return Formula::know(f.name(), f.variant(), rebuild(f.body(), path, at + 1, repl));
    case Kind::Poss:
        return Formula::poss(f.name(), f.variant(), rebuild(f.body(), path, at + 1, repl));
    case Kind::And:
    case Kind::Or:
    case Kind::Imp:
    case Kind::Iff: {
        Formula l = left ? rebuild(f.left(), path, at + 1, repl) : f.left();
        Formula r = left ? f.right() : rebuild(f.right(), path, at + 1, repl);
        if (f.kind() == Kind::And) return Formula::conj(l, r);
        if (f.kind() == Kind::Or) return Formula::disj(l, r);
        if (f.kind() == Kind::Imp) return Formula::imp(l, r);
        return Formula::iff(l, r);
    }
    default: throw std::invalid_argument("path leads through an atomic formula");
    }
}

}  // namespace

Formula replace_at(const Formula& f, const Path& path, const Formula& replacement) {
    return rebuild(f, path, 0, replacement);
}

std::optional<ReductionStep> reduce_once(const Formula& f) {
    Path path;
    if (!find_redex(f, path)) return std::nullopt;
    Rewrite rw = rewrite_redex(subformula_at(f, path));
    return ReductionStep{f, std::move(rw.axiom), path, replace_at(f, path, rw.result)};
}

std::size_t default_step_budget(const Formula& f) { return 4 * f.size() * f.size(); }

ReductionTrace reduce_full(const Formula& f, std::optional<std::size_t> budget) {
    const std::size_t limit = budget.value_or(default_step_budget(f));
    ReductionTrace trace{{}, f};
    while (auto step = reduce_once(trace.result)) {
        if (trace.steps.size() == limit)
            throw BudgetExceeded("reduction exceeded " + std::to_string(limit) + " steps");
        trace.result = step->after;
        trace.steps.push_back(std::move(*step));
    }
    return trace;
}

std::string render_path(const Path& p) {
    if (p.empty()) return "ε";
    std::string out;
    for (int s : p) {
        if (!out.empty()) out += '.';
        out += std::to_string(s);
    }
    return out;
}

}  // namespace cel
