// Formulas of contextual epistemic logic: AST, parser, printer.
//
// Concrete syntax (ASCII; ¬ ∧ ∨ → ↔ are accepted too, and ⊤ ⊥ in context
// formulas, which also take true and false):
//
//   formula := iff ;  iff := imp { "<->" imp } ;  imp := disj [ "->" imp ] ;
//   disj := conj { "|" conj } ;  conj := unary { "&" unary } ;
//   unary := "~" unary | "K" "{" ident [ "," variant ] "}" unary
//          | "P" "{" ident [ "," variant ] "}" unary | "K_" ident unary
//          | "P_" ident unary | primary ;
//   primary := ( atom | "@" ident | "(" formula ")" ) { "^" ident } ;
//
// `@ci` is a reference to the context formula named ci (used by the reduced
// forms, e.g. `(p)^ci` becomes `@ci -> p`).

#ifndef CEL_SYNTAX_HPP
#define CEL_SYNTAX_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cel {

/// Interaction mode between a knowledge operator and contexts. The first
/// digit selects the condition context, the second the continuation context
/// (1 = the current context, 2 = the subject agent's own context).
enum class Variant : std::uint8_t { Unset, V11, V12, V21, V22 };

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view text);
inline constexpr Variant all_variants[] = {Variant::V11, Variant::V12, Variant::V21,
                                           Variant::V22};

/// Name of the context that belongs to an agent: agent `j` owns context `cj`.
std::string agent_context(std::string_view agent);

enum class Kind : std::uint8_t { Atom, Ctx, Not, And, Or, Imp, Iff, Know, Poss, Rel };

/// Immutable formula tree with shared subterms. Copies are cheap.
class Formula {
public:
    static Formula atom(std::string name);
    static Formula context(std::string name);
    static Formula negation(Formula f);
    static Formula conj(Formula a, Formula b);
    static Formula disj(Formula a, Formula b);
    static Formula imp(Formula a, Formula b);
    static Formula iff(Formula a, Formula b);
    static Formula know(std::string agent, Variant v, Formula body);
    static Formula poss(std::string agent, Variant v, Formula body);
    static Formula rel(Formula body, std::string context);

    Kind kind() const;
    /// Atom name, context name (Ctx, Rel) or agent (Know, Poss).
    const std::string& name() const;
    Variant variant() const;
    /// Sole operand of Not/Know/Poss/Rel, left operand of binary nodes.
    const Formula& left() const;
    const Formula& right() const;
    const Formula& body() const;

    bool is_binary() const;
    bool is_unary() const;
    bool is_modal() const { return kind() == Kind::Know || kind() == Kind::Poss; }
    bool is_atomic() const { return kind() == Kind::Atom || kind() == Kind::Ctx; }

    std::size_t size() const;
    std::size_t hash() const;

    /// Same operator, new variant (Know/Poss only).
    Formula with_variant(Variant v) const;

    friend bool operator==(const Formula& a, const Formula& b);
    friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
    /// Total order; structural, independent of sharing.
    friend bool operator<(const Formula& a, const Formula& b);

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Formula make(Kind k, Variant v, std::string name, const Formula* a,
                        const Formula* b);

    std::shared_ptr<const Node> node_;
};

struct FormulaHash {
    std::size_t operator()(const Formula& f) const { return f.hash(); }
};

struct Literal {
    std::string atom;
    bool positive = true;

    friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// Conjunction of literals, or one of the constants. Always canonical:
/// literals sorted and unique, complementary pairs collapse to Bot.
class ContextFormula {
public:
    enum class Shape : std::uint8_t { Top, Bot, Literals };

    static ContextFormula top();
    static ContextFormula bot();
    static ContextFormula of(std::vector<Literal> lits);

    Shape shape() const { return shape_; }
    bool is_top() const { return shape_ == Shape::Top; }
    bool is_bot() const { return shape_ == Shape::Bot; }
    const std::vector<Literal>& literals() const { return lits_; }

    /// Does every valuation satisfying *this also satisfy `other`?
    bool entails(const ContextFormula& other) const;

    friend bool operator==(const ContextFormula&, const ContextFormula&) = default;

private:
    Shape shape_ = Shape::Top;
    std::vector<Literal> lits_;
};

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& what, std::size_t position);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// `default_variant` fills operators written without a tag; when absent they
/// stay Variant::Unset (presets or the CLI fill them in later).
Formula parse_formula(std::string_view text, std::optional<Variant> default_variant = {});
ContextFormula parse_context(std::string_view text);

std::string render_formula(const Formula& f);
std::string render_context(const ContextFormula& c);

struct FormulaInfo {
    std::set<std::string> atoms;
    std::set<std::string> agents;
    std::set<std::string> contexts;
    int modal_depth = 0;
    bool is_el = true;
    bool is_absolute = true;
};

FormulaInfo formula_info(const Formula& f);
int modal_depth(const Formula& f);
bool is_el(const Formula& f);
/// True when some Know/Poss occurrence has no variant.
bool has_unset_variant(const Formula& f);
/// Replace untagged operators by `v`; tagged ones are kept.
Formula fill_variants(const Formula& f, Variant v);

/// Indented tree dump used by `cel parse`.
std::string dump_tree(const Formula& f);

}  // namespace cel

#endif  // CEL_SYNTAX_HPP
