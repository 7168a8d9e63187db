#include "cel/syntax.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace cel {

struct Formula::Node {
    Kind kind;
    Variant variant;
    std::string name;
    std::optional<Formula> left;
    std::optional<Formula> right;
    std::size_t size = 1;
    std::size_t hash = 0;
};

Kind Formula::kind() const { return node_->kind; }
const std::string& Formula::name() const { return node_->name; }
Variant Formula::variant() const { return node_->variant; }
const Formula& Formula::left() const { return *node_->left; }
const Formula& Formula::right() const { return *node_->right; }
const Formula& Formula::body() const { return *node_->left; }
std::size_t Formula::size() const { return node_->size; }
std::size_t Formula::hash() const { return node_->hash; }

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::V11: return "1.1";
    case Variant::V12: return "1.2";
    case Variant::V21: return "2.1";
    case Variant::V22: return "2.2";
    case Variant::Unset: break;
    }
    return "";
}

std::optional<Variant> parse_variant(std::string_view text) {
    if (text == "1.1") return Variant::V11;
    if (text == "1.2") return Variant::V12;
    if (text == "2.1") return Variant::V21;
    if (text == "2.2") return Variant::V22;
    return std::nullopt;
}

std::string agent_context(std::string_view agent) { return "c" + std::string(agent); }

Formula Formula::make(Kind k, Variant v, std::string name, const Formula* a, const Formula* b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->variant = v;
    n->name = std::move(name);
    std::size_t h = mix(static_cast<std::size_t>(k) * 31 + static_cast<std::size_t>(v),
                        std::hash<std::string>{}(n->name));
    if (a) {
        n->left = *a;
        n->size += a->size();
        h = mix(h, a->hash());
    }
    if (b) {
        n->right = *b;
        n->size += b->size();
        h = mix(h, b->hash());
    }
    n->hash = h;
    return Formula(std::move(n));
}

Formula Formula::atom(std::string name) {
    return make(Kind::Atom, Variant::Unset, std::move(name), nullptr, nullptr);
}
Formula Formula::context(std::string name) {
    return make(Kind::Ctx, Variant::Unset, std::move(name), nullptr, nullptr);
}
Formula Formula::negation(Formula f) { return make(Kind::Not, Variant::Unset, {}, &f, nullptr); }
Formula Formula::conj(Formula a, Formula b) { return make(Kind::And, Variant::Unset, {}, &a, &b); }
Formula Formula::disj(Formula a, Formula b) { return make(Kind::Or, Variant::Unset, {}, &a, &b); }
Formula Formula::imp(Formula a, Formula b) { return make(Kind::Imp, Variant::Unset, {}, &a, &b); }
Formula Formula::iff(Formula a, Formula b) { return make(Kind::Iff, Variant::Unset, {}, &a, &b); }
Formula Formula::know(std::string agent, Variant v, Formula body) {
    return make(Kind::Know, v, std::move(agent), &body, nullptr);
}
Formula Formula::poss(std::string agent, Variant v, Formula body) {
    return make(Kind::Poss, v, std::move(agent), &body, nullptr);
}
Formula Formula::rel(Formula body, std::string context) {
    return make(Kind::Rel, Variant::Unset, std::move(context), &body, nullptr);
}

bool Formula::is_binary() const {
    switch (kind()) {
    case Kind::And:
    case Kind::Or:
    case Kind::Imp:
    case Kind::Iff: return true;
    default: return false;
    }
}

bool Formula::is_unary() const {
    switch (kind()) {
    case Kind::Not:
    case Kind::Know:
    case Kind::Poss:
    case Kind::Rel: return true;
    default: return false;
    }
}

Formula Formula::with_variant(Variant v) const {
    if (!is_modal()) throw std::logic_error("with_variant on a non-modal formula");
    return make(kind(), v, name(), &body(), nullptr);
}

bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.size() != b.size()) return false;
    if (a.kind() != b.kind() || a.variant() != b.variant() || a.name() != b.name()) return false;
    if (a.node_->left && !(*a.node_->left == *b.node_->left)) return false;
    if (a.node_->right && !(*a.node_->right == *b.node_->right)) return false;
    return true;
}

bool operator<(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return false;
    if (a.kind() != b.kind()) return a.kind() < b.kind();
    if (a.variant() != b.variant()) return a.variant() < b.variant();
    if (a.name() != b.name()) return a.name() < b.name();
    if (a.node_->left) {
        if (*a.node_->left < *b.node_->left) return true;
        if (*b.node_->left < *a.node_->left) return false;
    }
    if (a.node_->right) return *a.node_->right < *b.node_->right;
    return false;
}

// ---------------------------------------------------------------- contexts

ContextFormula ContextFormula::top() { return ContextFormula(); }

ContextFormula ContextFormula::bot() {
    ContextFormula c;
    c.shape_ = Shape::Bot;
    return c;
}

ContextFormula ContextFormula::of(std::vector<Literal> lits) {
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t k = 1; k < lits.size(); ++k)
        if (lits[k].atom == lits[k - 1].atom) return bot();
    if (lits.empty()) return top();
    ContextFormula c;
    c.shape_ = Shape::Literals;
    c.lits_ = std::move(lits);
    return c;
}

bool ContextFormula::entails(const ContextFormula& other) const {
    if (is_bot() || other.is_top()) return true;
    if (other.is_bot()) return false;  // *this is satisfiable here
    if (is_top()) return false;        // other has at least one literal
    return std::includes(lits_.begin(), lits_.end(), other.lits_.begin(), other.lits_.end());
}

// ---------------------------------------------------------------- lexer

SyntaxError::SyntaxError(const std::string& what, std::size_t position)
    : std::runtime_error(what + " at position " + std::to_string(position)),
      position_(position) {}

namespace {

enum class Tok {
    End, Ident, Number, LParen, RParen, LBrace, RBrace, Comma, Caret, At,
    Not, And, Or, Imp, Iff, Know, Poss, Top, Bot
};

struct Token {
    Tok tok;
    std::string text;
    std::size_t pos;
};

bool ident_start(char c) { return c >= 'a' && c <= 'z'; }
bool ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::vector<Token> lex(std::string_view s) {
    static const std::pair<std::string_view, Tok> symbols[] = {
        {"<->", Tok::Iff}, {"->", Tok::Imp},  {"~", Tok::Not},   {"&", Tok::And},
        {"|", Tok::Or},    {"(", Tok::LParen}, {")", Tok::RParen}, {"{", Tok::LBrace},
        {"}", Tok::RBrace}, {",", Tok::Comma}, {"^", Tok::Caret}, {"@", Tok::At},
        {"¬", Tok::Not}, {"∧", Tok::And}, {"∨", Tok::Or},
        {"→", Tok::Imp}, {"↔", Tok::Iff}, {"⊤", Tok::Top},
        {"⊥", Tok::Bot},
    };
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        bool matched = false;
        for (auto& [sym, tok] : symbols) {
            if (s.substr(i, sym.size()) == sym) {
                out.push_back({tok, std::string(sym), i});
                i += sym.size();
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (c == 'K' || c == 'P') {
            out.push_back({c == 'K' ? Tok::Know : Tok::Poss, std::string(1, c), i});
            ++i;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j])) ++j;
            out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), i});
            i = j;
            continue;
        }
        if (c >= '0' && c <= '9') {
            std::size_t j = i;
            while (j < s.size() && ((s[j] >= '0' && s[j] <= '9') || s[j] == '.')) ++j;
            out.push_back({Tok::Number, std::string(s.substr(i, j - i)), i});
            i = j;
            continue;
        }
        if (c == '_') {
            // only legal right after K/P: "K_i"
            out.push_back({Tok::Ident, "_", i});
            ++i;
            continue;
        }
        throw SyntaxError("unexpected character '" + std::string(1, c) + "'", i);
    }
    out.push_back({Tok::End, "", s.size()});
    return out;
}

class Parser {
public:
    Parser(std::string_view text, std::optional<Variant> dv) : toks_(lex(text)), default_(dv) {}

    Formula parse() {
        if (peek().tok == Tok::End) throw SyntaxError("empty formula", 0);
        Formula f = parse_iff();
        if (peek().tok != Tok::End)
            throw SyntaxError("unexpected '" + peek().text + "'", peek().pos);
        return f;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }
    bool accept(Tok t) {
        if (peek().tok != t) return false;
        ++pos_;
        return true;
    }
    const Token& expect(Tok t, const char* what) {
        if (peek().tok != t) {
            std::string got = peek().tok == Tok::End ? "end of input" : "'" + peek().text + "'";
            throw SyntaxError(std::string("expected ") + what + ", got " + got, peek().pos);
        }
        return next();
    }

    Formula parse_iff() {
        Formula f = parse_imp();
        while (accept(Tok::Iff)) f = Formula::iff(f, parse_imp());
        return f;
    }
    Formula parse_imp() {
        Formula f = parse_disj();
        if (accept(Tok::Imp)) return Formula::imp(f, parse_imp());
        return f;
    }
    Formula parse_disj() {
        Formula f = parse_conj();
        while (accept(Tok::Or)) f = Formula::disj(f, parse_conj());
        return f;
    }
    Formula parse_conj() {
        Formula f = parse_unary();
        while (accept(Tok::And)) f = Formula::conj(f, parse_unary());
        return f;
    }

    Formula parse_unary() {
        const Token& t = peek();
        if (accept(Tok::Not)) return Formula::negation(parse_unary());
        if (t.tok == Tok::Know || t.tok == Tok::Poss) {
            bool know = t.tok == Tok::Know;
            next();
            std::string agent;
            Variant v = Variant::Unset;
            if (accept(Tok::LBrace)) {
                agent = expect(Tok::Ident, "agent name").text;
                if (accept(Tok::Comma)) {
                    const Token& num = expect(Tok::Number, "variant tag");
                    auto pv = parse_variant(num.text);
                    if (!pv) throw SyntaxError("unknown variant tag '" + num.text + "'", num.pos);
                    v = *pv;
                }
                expect(Tok::RBrace, "'}'");
            } else if (peek().tok == Tok::Ident && peek().text == "_") {
                next();
                agent = expect(Tok::Ident, "agent name").text;
            } else {
                throw SyntaxError("expected '{' or '_' after operator", peek().pos);
            }
            if (agent == "_") throw SyntaxError("bad agent name", t.pos);
            if (v == Variant::Unset && default_) v = *default_;
            Formula body = parse_unary();
            return know ? Formula::know(agent, v, body) : Formula::poss(agent, v, body);
        }
        return parse_primary();
    }

    Formula parse_primary() {
        const Token& t = peek();
        std::optional<Formula> f;
        if (t.tok == Tok::Ident && t.text != "_") {
            next();
            f = Formula::atom(t.text);
        } else if (accept(Tok::At)) {
            f = Formula::context(expect(Tok::Ident, "context name").text);
        } else if (accept(Tok::LParen)) {
            f = parse_iff();
            expect(Tok::RParen, "')'");
        } else if (t.tok == Tok::Caret) {
            throw SyntaxError("relativization applied to nothing", t.pos);
        } else if (t.tok == Tok::End) {
            throw SyntaxError("unexpected end of input", t.pos);
        } else {
            throw SyntaxError("unexpected '" + t.text + "'", t.pos);
        }
        while (accept(Tok::Caret)) {
            const Token& c = expect(Tok::Ident, "context name");
            if (c.text == "_") throw SyntaxError("bad context name", c.pos);
            f = Formula::rel(*f, c.text);
        }
        return *f;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::optional<Variant> default_;
};

}  // namespace

Formula parse_formula(std::string_view text, std::optional<Variant> default_variant) {
    return Parser(text, default_variant).parse();
}

ContextFormula parse_context(std::string_view text) {
    auto toks = lex(text);
    std::size_t i = 0;
    if (toks[0].tok == Tok::End) throw SyntaxError("empty context", 0);
    std::vector<Literal> lits;
    bool bottom = false;
    for (;;) {
        const Token& t = toks[i];
        if (t.tok == Tok::Top || (t.tok == Tok::Ident && t.text == "true")) {
            ++i;
        } else if (t.tok == Tok::Bot || (t.tok == Tok::Ident && t.text == "false")) {
            bottom = true;
            ++i;
        } else if (t.tok == Tok::Not) {
            const Token& a = toks[i + 1];
            if (a.tok != Tok::Ident || a.text == "_" || a.text == "true" || a.text == "false")
                throw SyntaxError("context literal must negate an atom", a.pos);
            lits.push_back({a.text, false});
            i += 2;
        } else if (t.tok == Tok::Ident && t.text != "_") {
            lits.push_back({t.text, true});
            ++i;
        } else {
            throw SyntaxError("context formulas are conjunctions of literals", t.pos);
        }
        if (toks[i].tok == Tok::End) break;
        if (toks[i].tok != Tok::And)
            throw SyntaxError("context formulas are conjunctions of literals", toks[i].pos);
        ++i;
    }
    if (bottom) return ContextFormula::bot();
    return ContextFormula::of(std::move(lits));
}

// ---------------------------------------------------------------- printer

namespace {

int precedence(const Formula& f) {
    switch (f.kind()) {
    case Kind::Iff: return 1;
    case Kind::Imp: return 2;
    case Kind::Or: return 3;
    case Kind::And: return 4;
    case Kind::Not:
    case Kind::Know:
    case Kind::Poss: return 5;
    default: return 6;
    }
}

void render(const Formula& f, std::string& out);

void render_at(const Formula& f, int min_prec, std::string& out) {
    if (precedence(f) < min_prec) {
        out += '(';
        render(f, out);
        out += ')';
    } else {
        render(f, out);
    }
}

void render(const Formula& f, std::string& out) {
    switch (f.kind()) {
    case Kind::Atom: out += f.name(); return;
    case Kind::Ctx: out += '@' + f.name(); return;
    case Kind::Not:
        out += '~';
        render_at(f.body(), 5, out);
        return;
    case Kind::Know:
    case Kind::Poss:
        out += f.kind() == Kind::Know ? "K{" : "P{";
        out += f.name();
        if (f.variant() != Variant::Unset) {
            out += ',';
            out += to_string(f.variant());
        }
        out += "} ";
        render_at(f.body(), 5, out);
        return;
    case Kind::Rel:
        if (f.body().kind() == Kind::Rel) {
            render(f.body(), out);
        } else {
            out += '(';
            render(f.body(), out);
            out += ')';
        }
        out += '^' + f.name();
        return;
    case Kind::And:
    case Kind::Or:
    case Kind::Iff: {
        int p = precedence(f);
        render_at(f.left(), p, out);
        out += f.kind() == Kind::And ? " & " : f.kind() == Kind::Or ? " | " : " <-> ";
        render_at(f.right(), p + 1, out);
        return;
    }
    case Kind::Imp:
        render_at(f.left(), 3, out);
        out += " -> ";
        render_at(f.right(), 2, out);
        return;
    }
}

}  // namespace

std::string render_formula(const Formula& f) {
    std::string out;
    render(f, out);
    return out;
}

std::string render_context(const ContextFormula& c) {
    if (c.is_top()) return "true";
    if (c.is_bot()) return "false";
    std::string out;
    for (const auto& l : c.literals()) {
        if (!out.empty()) out += " & ";
        if (!l.positive) out += '~';
        out += l.atom;
    }
    return out;
}

// ---------------------------------------------------------------- queries

namespace {

void collect(const Formula& f, int depth, FormulaInfo& info) {
    switch (f.kind()) {
    case Kind::Atom: info.atoms.insert(f.name()); return;
    case Kind::Ctx: info.contexts.insert(f.name()); return;
    case Kind::Know:
    case Kind::Poss:
        info.agents.insert(f.name());
        info.modal_depth = std::max(info.modal_depth, depth + 1);
        collect(f.body(), depth + 1, info);
        return;
    case Kind::Rel:
        info.contexts.insert(f.name());
        info.is_el = false;
        info.is_absolute = false;
        collect(f.body(), depth, info);
        return;
    case Kind::Not: collect(f.body(), depth, info); return;
    default:
        collect(f.left(), depth, info);
        collect(f.right(), depth, info);
        return;
    }
}

}  // namespace

FormulaInfo formula_info(const Formula& f) {
    FormulaInfo info;
    collect(f, 0, info);
    return info;
}

int modal_depth(const Formula& f) {
    if (f.is_atomic()) return 0;
    if (f.is_modal()) return 1 + modal_depth(f.body());
    if (f.is_unary()) return modal_depth(f.body());
    return std::max(modal_depth(f.left()), modal_depth(f.right()));
}

bool is_el(const Formula& f) {
    if (f.kind() == Kind::Rel) return false;
    if (f.is_atomic()) return true;
    if (f.is_unary()) return is_el(f.body());
    return is_el(f.left()) && is_el(f.right());
}

bool has_unset_variant(const Formula& f) {
    if (f.is_atomic()) return false;
    if (f.is_modal() && f.variant() == Variant::Unset) return true;
    if (f.is_unary()) return has_unset_variant(f.body());
    return has_unset_variant(f.left()) || has_unset_variant(f.right());
}

Formula fill_variants(const Formula& f, Variant v) {
    switch (f.kind()) {
    case Kind::Atom:
    case Kind::Ctx: return f;
    case Kind::Not: return Formula::negation(fill_variants(f.body(), v));
    case Kind::Rel: return Formula::rel(fill_variants(f.body(), v), f.name());
    case Kind::Know:
    case Kind::Poss: {
        Variant nv = f.variant() == Variant::Unset ? v : f.variant();
        Formula b = fill_variants(f.body(), v);
        return f.kind() == Kind::Know ? Formula::know(f.name(), nv, b)
                                      : Formula::poss(f.name(), nv, b);
    }
    case Kind::And: return Formula::conj(fill_variants(f.left(), v), fill_variants(f.right(), v));
    case Kind::Or: return Formula::disj(fill_variants(f.left(), v), fill_variants(f.right(), v));
    case Kind::Imp: return Formula::imp(fill_variants(f.left(), v), fill_variants(f.right(), v));
    case Kind::Iff: return Formula::iff(fill_variants(f.left(), v), fill_variants(f.right(), v));
    }
    return f;
}

namespace {

void dump(const Formula& f, int indent, std::ostringstream& os) {
    os << std::string(static_cast<std::size_t>(indent) * 2, ' ');
    switch (f.kind()) {
    case Kind::Atom: os << "Atom " << f.name() << '\n'; return;
    case Kind::Ctx: os << "Ctx " << f.name() << '\n'; return;
    case Kind::Not: os << "Not\n"; break;
    case Kind::And: os << "And\n"; break;
    case Kind::Or: os << "Or\n"; break;
    case Kind::Imp: os << "Imp\n"; break;
    case Kind::Iff: os << "Iff\n"; break;
    case Kind::Know:
    case Kind::Poss:
        os << (f.kind() == Kind::Know ? "Know " : "Poss ") << f.name();
        if (f.variant() != Variant::Unset) os << ' ' << to_string(f.variant());
        os << '\n';
        break;
    case Kind::Rel: os << "Rel " << f.name() << '\n'; break;
    }
    if (f.is_unary()) {
        dump(f.body(), indent + 1, os);
    } else {
        dump(f.left(), indent + 1, os);
        dump(f.right(), indent + 1, os);
    }
}

}  // namespace

std::string dump_tree(const Formula& f) {
    std::ostringstream os;
    dump(f, 0, os);
    return os.str();
}

}  // namespace cel
