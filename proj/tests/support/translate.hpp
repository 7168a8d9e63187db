// Direct translation of relativized formulas into the plain fragment, read
// off the satisfaction clauses. Independent of the reducer, so it can serve
// as an oracle for it.

#ifndef CEL_TESTS_TRANSLATE_HPP
#define CEL_TESTS_TRANSLATE_HPP

#include <stdexcept>
#include <string>

#include "cel/syntax.hpp"

namespace cel::fixtures {

inline Formula tr(const Formula& f);

// Derived connectives in terms of ~, & and K.
inline Formula primitive(const Formula& f) {
    switch (f.kind()) {
    case Kind::Or: return Formula::negation(Formula::conj(Formula::negation(f.left()), Formula::negation(f.right())));
    case Kind::Imp: return Formula::negation(Formula::conj(f.left(), Formula::negation(f.right())));
    case Kind::Iff:
        return Formula::conj(primitive(Formula::imp(f.left(), f.right())),
                             primitive(Formula::imp(f.right(), f.left())));
    case Kind::Poss: return Formula::negation(Formula::know(f.name(), f.variant(), Formula::negation(f.body())));
    default: return f;
    }
}

// c -> x, spelled with the primitive connectives.
inline Formula guarded(const std::string& c, const Formula& x) {
    return Formula::negation(Formula::conj(Formula::context(c), Formula::negation(x)));
}

inline Formula tr_rel(const Formula& body, const std::string& c) {
    const Formula g = primitive(body);
    switch (g.kind()) {
    case Kind::Atom:
    case Kind::Ctx: return guarded(c, g);
    case Kind::Rel: return guarded(c, tr(g));
    case Kind::Not: return guarded(c, Formula::negation(tr_rel(g.body(), c)));
    case Kind::And: return Formula::conj(tr_rel(g.left(), c), tr_rel(g.right(), c));
    case Kind::Know: {
        const Variant v = g.variant();
        if (v == Variant::Unset) throw std::invalid_argument("untagged knowledge operator");
        const std::string own = agent_context(g.name());
        const std::string cx = (v == Variant::V11 || v == Variant::V12) ? c : own;
        const std::string cy = (v == Variant::V11 || v == Variant::V21) ? c : own;
        return guarded(cx, Formula::know(g.name(), v, tr_rel(g.body(), cy)));
    }
    default: throw std::logic_error("primitive() left a derived connective");
    }
}

inline Formula tr(const Formula& f) {
    const Formula g = primitive(f);
    switch (g.kind()) {
    case Kind::Atom:
    case Kind::Ctx: return g;
    case Kind::Not: return Formula::negation(tr(g.body()));
    case Kind::And: return Formula::conj(tr(g.left()), tr(g.right()));
    case Kind::Know: return Formula::know(g.name(), g.variant(), tr(g.body()));
    case Kind::Rel: return tr_rel(g.body(), g.name());
    default: throw std::logic_error("primitive() left a derived connective");
    }
}

}  // namespace cel::fixtures

#endif  // CEL_TESTS_TRANSLATE_HPP
