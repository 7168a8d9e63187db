#include "cel/dialogue.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cel/reduce.hpp"

namespace cel {

std::string_view to_string(Player p) { return p == Player::P ? "P" : "O"; }

// ---------------------------------------------------------------- labels

WorldLabel WorldLabel::parse(std::string_view text) {
    if (text.empty() || text.front() != '1')
        throw std::invalid_argument("world label must start with 1: '" + std::string(text) + "'");
    WorldLabel out;
    std::size_t i = 1;
    while (i < text.size()) {
        std::size_t a = i;
        while (i < text.size() && (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '_'))
            ++i;
        std::size_t d = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (a == d || d == i)
            throw std::invalid_argument("malformed world label '" + std::string(text) + "'");
        out.steps_.emplace_back(std::string(text.substr(a, d - a)),
                                std::stoi(std::string(text.substr(d, i - d))));
    }
    return out;
}

WorldLabel WorldLabel::child(std::string agent, int index) const {
    WorldLabel out = *this;
    out.steps_.emplace_back(std::move(agent), index);
    return out;
}

WorldLabel WorldLabel::parent() const {
    if (steps_.empty()) throw std::logic_error("root label has no parent");
    WorldLabel out = *this;
    out.steps_.pop_back();
    return out;
}

int WorldLabel::rank() const {
    int r = 0;
    for (std::size_t k = 0; k < steps_.size(); ++k)
        if (k == 0 || steps_[k].first != steps_[k - 1].first) ++r;
    return r;
}

WorldLabel WorldLabel::cluster_root(const std::string& agent) const {
    WorldLabel out = *this;
    while (!out.steps_.empty() && out.steps_.back().first == agent) out.steps_.pop_back();
    return out;
}

std::string WorldLabel::str() const {
    std::string s = "1";
    for (const auto& [agent, idx] : steps_) s += agent + std::to_string(idx);
    return s;
}

// --------------------------------------------------------------- payloads

std::string render_payload(const Payload& p) {
    if (const auto* a = std::get_if<Assertion>(&p))
        return a->label.str() + ": " + render_formula(a->formula);
    const auto& r = std::get<Request>(p);
    std::string head = r.label.str() + ": ";
    switch (r.kind) {
    case Request::Kind::Which: return head + "?";
    case Request::Kind::Left: return head + "?L";
    case Request::Kind::Right: return head + "?R";
    case Request::Kind::Know: return head + "?K{" + r.agent + "}/" + r.chosen.str();
    case Request::Kind::Poss: return head + "?P{" + r.agent + "}";
    }
    return head;
}

Payload parse_payload(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw std::invalid_argument("payload needs 'label: ...': '" + std::string(text) + "'");
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    WorldLabel label = WorldLabel::parse(trim(text.substr(0, colon)));
    std::string_view rest = trim(text.substr(colon + 1));
    if (rest.empty()) throw std::invalid_argument("empty payload");
    if (rest.front() != '?') return Assertion{label, parse_formula(rest)};
    Request r{Request::Kind::Which, label, {}, {}};
    if (rest == "?") return r;
    if (rest == "?L") return Request{Request::Kind::Left, label, {}, {}};
    if (rest == "?R") return Request{Request::Kind::Right, label, {}, {}};
    auto agent_in_braces = [&](std::string_view s) -> std::pair<std::string, std::string_view> {
        if (s.size() < 2 || s[0] != '{')
            throw std::invalid_argument("expected {agent} in '" + std::string(rest) + "'");
        auto close = s.find('}');
        if (close == std::string_view::npos)
            throw std::invalid_argument("unclosed brace in '" + std::string(rest) + "'");
        return {std::string(trim(s.substr(1, close - 1))), s.substr(close + 1)};
    };
    if (rest.substr(0, 2) == "?K") {
        auto [agent, tail] = agent_in_braces(rest.substr(2));
        tail = trim(tail);
        if (tail.empty() || tail.front() != '/')
            throw std::invalid_argument("expected /world in '" + std::string(rest) + "'");
        return Request{Request::Kind::Know, label, agent, WorldLabel::parse(trim(tail.substr(1)))};
    }
    if (rest.substr(0, 2) == "?P") {
        auto [agent, tail] = agent_in_braces(rest.substr(2));
        if (!trim(tail).empty())
            throw std::invalid_argument("trailing text in '" + std::string(rest) + "'");
        return Request{Request::Kind::Poss, label, agent, {}};
    }
    throw std::invalid_argument("unknown request '" + std::string(rest) + "'");
}

// ------------------------------------------------------------ game arena

namespace detail {

enum class PKind : std::uint8_t { Assert, Which, Left, Right, Know, Poss };

struct PayloadRec {
    PKind kind;
    int label;
    int formula = -1;  // Assert
    std::string agent;
    int chosen = -1;   // Know
    friend auto operator<=>(const PayloadRec&, const PayloadRec&) = default;
};

enum class FType : std::uint8_t { Start, Attack, Defence };

// Canonical content of a move: who attacked which assertion with what, or
// who answered which attack with what. Move indices are not part of it.
struct Fact {
    FType type;
    Player actor;
    int target;   // assertion payload attacked (Attack) or attacked in the answered attack
    int attack;   // payload of the answered attack (Defence)
    int payload;
    friend auto operator<=>(const Fact&, const Fact&) = default;
};

struct Position {
    std::vector<Fact> facts;  // sorted
    Player turn = Player::O;
    std::size_t hash = 0;

    friend bool operator==(const Position& a, const Position& b) {
        return a.turn == b.turn && a.facts == b.facts;
    }
};

struct PositionHash {
    std::size_t operator()(const Position& p) const { return p.hash; }
};

std::size_t fact_hash(const Fact& f) {
    std::uint64_t h = static_cast<std::uint64_t>(f.type) * 0x9E3779B97F4A7C15ULL;
    for (std::uint64_t v : {static_cast<std::uint64_t>(f.actor), static_cast<std::uint64_t>(f.target + 1),
                            static_cast<std::uint64_t>(f.attack + 1), static_cast<std::uint64_t>(f.payload + 1)}) {
        h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        h *= 0xBF58476D1CE4E5B9ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 31));
}

void rehash(Position& p) {
    std::size_t h = p.turn == Player::P ? 0x51ED27 : 0;
    for (const auto& f : p.facts) h += fact_hash(f);  // order independent, facts are sorted anyway
    p.hash = h;
}

struct AttackForm {
    PKind kind;
    std::optional<Formula> asserted;
    std::string agent;
};

struct Rules {
    std::vector<AttackForm> attacks;
    // answers per attack kind; Assert-kind attacks share one entry
    std::map<PKind, std::vector<Formula>> defences;
};

Rules particle_rules(const Formula& f) {
    Rules r;
    auto both = [&](PKind k, std::vector<Formula> d) { r.defences[k] = std::move(d); };
    switch (f.kind()) {
    case Kind::Atom:
    case Kind::Ctx: break;
    case Kind::Not: r.attacks.push_back({PKind::Assert, f.body(), {}}); break;
    case Kind::Imp:
        r.attacks.push_back({PKind::Assert, f.left(), {}});
        both(PKind::Assert, {f.right()});
        break;
    case Kind::Or:
        r.attacks.push_back({PKind::Which, {}, {}});
        both(PKind::Which, {f.left(), f.right()});
        break;
    case Kind::And:
        r.attacks.push_back({PKind::Left, {}, {}});
        r.attacks.push_back({PKind::Right, {}, {}});
        both(PKind::Left, {f.left()});
        both(PKind::Right, {f.right()});
        break;
    case Kind::Iff:
        r.attacks.push_back({PKind::Left, {}, {}});
        r.attacks.push_back({PKind::Right, {}, {}});
        both(PKind::Left, {Formula::imp(f.left(), f.right())});
        both(PKind::Right, {Formula::imp(f.right(), f.left())});
        break;
    case Kind::Know:
        r.attacks.push_back({PKind::Know, {}, f.name()});
        both(PKind::Know, {f.body()});
        break;
    case Kind::Poss:
        r.attacks.push_back({PKind::Poss, {}, f.name()});
        both(PKind::Poss, {f.body()});
        break;
    case Kind::Rel: {
        const Formula& g = f.body();
        const std::string& c = f.name();
        if (g.kind() == Kind::And || g.kind() == Kind::Iff) {
            Formula a = g.kind() == Kind::And ? g.left() : Formula::imp(g.left(), g.right());
            Formula b = g.kind() == Kind::And ? g.right() : Formula::imp(g.right(), g.left());
            r.attacks.push_back({PKind::Left, {}, {}});
            r.attacks.push_back({PKind::Right, {}, {}});
            both(PKind::Left, {Formula::rel(a, c)});
            both(PKind::Right, {Formula::rel(b, c)});
        } else if (g.kind() == Kind::Poss) {
            r.attacks.push_back({PKind::Assert, Formula::context(c), {}});
            both(PKind::Assert,
                 {Formula::negation(Formula::rel(
                     Formula::know(g.name(), g.variant(), Formula::negation(g.body())), c))});
        } else {
            // every remaining axiom has the shape c_x -> D
            Rewrite rw = rewrite_redex(f);
            r.attacks.push_back({PKind::Assert, rw.result.left(), {}});
            both(PKind::Assert, {rw.result.right()});
            // once c is granted, ~(g)^c and ~g agree on knowledge-free g
            if (g.kind() == Kind::Not && modal_depth(g.body()) == 0)
                r.defences[PKind::Assert].push_back(g);
        }
        break;
    }
    }
    return r;
}

struct Arena {
    Formula thesis;
    GameOptions opts;
    int rank_cap = 0;

    std::vector<WorldLabel> labels;
    std::map<WorldLabel, int> label_ids;
    std::vector<Formula> formulas;
    std::unordered_map<Formula, int, FormulaHash> formula_ids;
    std::vector<PayloadRec> payloads;
    std::map<PayloadRec, int> payload_ids;
    std::unordered_map<int, Rules> rules_cache;
    std::map<std::string, ContextFormula> ctx_cache;

    Arena(Formula t, GameOptions o) : thesis(std::move(t)), opts(std::move(o)) {
        rank_cap = modal_depth(thesis) + opts.rank_slack;
    }

    int label(const WorldLabel& w) {
        auto [it, fresh] = label_ids.try_emplace(w, static_cast<int>(labels.size()));
        if (fresh) labels.push_back(w);
        return it->second;
    }
    int formula(const Formula& f) {
        auto [it, fresh] = formula_ids.try_emplace(f, static_cast<int>(formulas.size()));
        if (fresh) formulas.push_back(f);
        return it->second;
    }
    int payload(const PayloadRec& p) {
        auto [it, fresh] = payload_ids.try_emplace(p, static_cast<int>(payloads.size()));
        if (fresh) payloads.push_back(p);
        return it->second;
    }
    int assertion(int label_id, const Formula& f) {
        return payload({PKind::Assert, label_id, formula(f), {}, -1});
    }
    const Rules& rules(int formula_id) {
        auto it = rules_cache.find(formula_id);
        if (it == rules_cache.end())
            it = rules_cache.emplace(formula_id, particle_rules(formulas[formula_id])).first;
        return it->second;
    }
    const ContextFormula& context(const std::string& name) {
        auto it = ctx_cache.find(name);
        if (it == ctx_cache.end()) it = ctx_cache.emplace(name, opts.env.resolve(name)).first;
        return it->second;
    }

    Payload to_payload(int id) const {
        const PayloadRec& p = payloads[id];
        const WorldLabel& w = labels[p.label];
        switch (p.kind) {
        case PKind::Assert: return Assertion{w, formulas[p.formula]};
        case PKind::Which: return Request{Request::Kind::Which, w, {}, {}};
        case PKind::Left: return Request{Request::Kind::Left, w, {}, {}};
        case PKind::Right: return Request{Request::Kind::Right, w, {}, {}};
        case PKind::Know: return Request{Request::Kind::Know, w, p.agent, labels[p.chosen]};
        case PKind::Poss: return Request{Request::Kind::Poss, w, p.agent, {}};
        }
        throw std::logic_error("unreachable");
    }

    int from_payload(const Payload& pl) {
        if (const auto* a = std::get_if<Assertion>(&pl)) return assertion(label(a->label), a->formula);
        const auto& r = std::get<Request>(pl);
        PayloadRec rec{PKind::Which, label(r.label), -1, {}, -1};
        switch (r.kind) {
        case Request::Kind::Which: rec.kind = PKind::Which; break;
        case Request::Kind::Left: rec.kind = PKind::Left; break;
        case Request::Kind::Right: rec.kind = PKind::Right; break;
        case Request::Kind::Know:
            rec.kind = PKind::Know;
            rec.agent = r.agent;
            rec.chosen = label(r.chosen);
            break;
        case Request::Kind::Poss:
            rec.kind = PKind::Poss;
            rec.agent = r.agent;
            break;
        }
        return payload(rec);
    }
};

// Everything move generation needs, derived from a position.
struct View {
    std::set<int> asserted[2];  // by player index
    std::set<int> o_attacked;
    std::set<std::pair<int, int>> o_defended;
    // (cluster root, formula) -> the world O used against a knowledge claim
    // or for a possibility claim; later instances in the cluster reuse it
    std::map<std::pair<int, int>, int> o_witness;
    std::vector<const Fact*> attacks;
    std::vector<int> introduced;                // label ids in first-mention order
    std::map<int, std::set<std::string>> o_pos;  // atoms O holds true at a label
    std::map<int, std::set<std::string>> o_neg;  // atoms O holds false at a label
    bool o_inconsistent = false;
};

int pidx(Player p) { return p == Player::P ? 0 : 1; }

// Identifies a modal claim up to its position inside the agent's cluster.
std::pair<int, int> modal_key(Arena& arena, int assertion) {
    const PayloadRec a = arena.payloads[assertion];
    const std::string agent = arena.formulas[a.formula].name();
    WorldLabel root = arena.labels[a.label].cluster_root(agent);
    return {arena.label(root), a.formula};
}

View make_view(Arena& arena, const Position& pos) {
    View v;
    std::set<int> seen;
    auto introduce = [&](int l) {
        if (seen.insert(l).second) v.introduced.push_back(l);
    };
    introduce(arena.label(WorldLabel::root()));
    std::map<int, std::set<std::string>> ctx_neg;
    for (const auto& f : pos.facts) {
        const PayloadRec& p = arena.payloads[f.payload];
        introduce(p.label);
        if (p.kind == PKind::Know) introduce(p.chosen);
        if (f.type == FType::Attack) {
            v.attacks.push_back(&f);
            if (f.actor == Player::O) {
                v.o_attacked.insert(f.target);
                if (p.kind == PKind::Know) v.o_witness.emplace(modal_key(arena, f.target), p.chosen);
            }
        }
        if (f.type == FType::Defence && f.actor == Player::O) {
            v.o_defended.insert({f.target, f.attack});
            if (arena.payloads[f.attack].kind == PKind::Poss)
                v.o_witness.emplace(modal_key(arena, f.target), p.label);
        }
        if (p.kind != PKind::Assert) continue;
        v.asserted[pidx(f.actor)].insert(f.payload);
        if (f.actor != Player::O) continue;
        const Formula& g = arena.formulas[p.formula];
        if (g.kind() == Kind::Atom) {
            v.o_pos[p.label].insert(g.name());
        } else if (g.kind() == Kind::Not && g.body().kind() == Kind::Atom) {
            v.o_neg[p.label].insert(g.body().name());
        } else if (g.kind() == Kind::Ctx) {
            const ContextFormula& c = arena.context(g.name());
            if (c.is_bot()) v.o_inconsistent = true;
            for (const auto& l : c.literals()) {
                if (l.positive) {
                    v.o_pos[p.label].insert(l.atom);
                } else {
                    v.o_neg[p.label].insert(l.atom);
                    ctx_neg[p.label].insert(l.atom);
                }
            }
        }
    }
    // a context literal clash cannot be exposed by attacks, so it ends the play
    for (const auto& [l, atoms] : ctx_neg)
        for (const auto& a : atoms)
            if (v.o_pos[l].count(a)) v.o_inconsistent = true;
    return v;
}

// PL-3 and ML-frc: may P assert the atomic formula g at label l?
bool granted(Arena& arena, const View& v, int l, const Formula& g) {
    auto has = [&](const std::map<int, std::set<std::string>>& m, const std::string& a) {
        auto it = m.find(l);
        return it != m.end() && it->second.count(a);
    };
    if (g.kind() == Kind::Atom) return has(v.o_pos, g.name());
    if (g.kind() == Kind::Ctx) {
        const ContextFormula& c = arena.context(g.name());
        if (c.is_bot()) return false;
        for (const auto& lit : c.literals())
            if (!has(lit.positive ? v.o_pos : v.o_neg, lit.atom)) return false;
    }
    return true;
}

int next_child_index(const Arena& arena, const View& v, int l, const std::string& agent) {
    int idx = 0;
    const WorldLabel& w = arena.labels[l];
    for (int u : v.introduced) {
        const WorldLabel& x = arena.labels[u];
        if (x.steps().size() == w.steps().size() + 1 && x.steps().back().first == agent &&
            x.parent() == w)
            idx = std::max(idx, x.steps().back().second);
    }
    return idx + 1;
}

// Labels P may pick in the agent's cluster of l. O opens the next fresh
// world, unless the same claim already has an O world in this cluster.
std::vector<int> world_choices(Arena& arena, const View& v, Player actor, int l,
                               const std::string& agent, int claim) {
    std::vector<int> out;
    const WorldLabel& w = arena.labels[l];
    if (actor == Player::O) {
        auto it = v.o_witness.find(modal_key(arena, claim));
        if (it != v.o_witness.end()) return {it->second};
    }
    if (actor == Player::P) {
        WorldLabel root = w.cluster_root(agent);
        for (int u : v.introduced)
            if (arena.labels[u].cluster_root(agent) == root) out.push_back(u);
    } else {
        WorldLabel fresh = w.child(agent, next_child_index(arena, v, l, agent));
        if (fresh.rank() <= arena.rank_cap) out.push_back(arena.label(fresh));
    }
    return out;
}

bool contains(const Position& pos, const Fact& f) {
    return std::binary_search(pos.facts.begin(), pos.facts.end(), f);
}

// P restating an assertion O has already attacked achieves nothing: O would
// answer with the same attack. Interned facts cannot express that answer, so
// the restatement is ruled out instead.
bool restates(Arena& arena, const View& v, const Fact& f) {
    return arena.payloads[f.payload].kind == PKind::Assert && v.asserted[0].count(f.payload) &&
           v.o_attacked.count(f.payload);
}

// A P move O has not answered in any way. Repeating it leaves O's options as
// they are and hands the turn to O.
bool unanswered(const Position& pos, const Fact& f) {
    if (f.actor != Player::P || f.type == FType::Start) return false;
    for (const Fact& g : pos.facts) {
        if (g.actor != Player::O) continue;
        if (g.type == FType::Attack && g.target == f.payload) return false;
        if (f.type == FType::Attack && g.type == FType::Defence && g.target == f.target &&
            g.attack == f.payload)
            return false;
    }
    return true;
}

std::vector<Fact> candidates(Arena& arena, const Position& pos) {
    std::vector<Fact> out;
    View v = make_view(arena, pos);
    if (v.o_inconsistent) return out;
    const Player x = pos.turn;
    const Player y = other(x);
    auto push = [&](const Fact& f) {
        if (x == Player::P && contains(pos, f)) return;  // PL-2
        if (x == Player::P && restates(arena, v, f)) return;
        out.push_back(f);
    };

    // defences first: they answer open obligations
    for (const Fact* att : v.attacks) {
        if (att->actor != y) continue;
        if (x == Player::O && v.o_defended.count({att->target, att->payload})) continue;
        const PayloadRec target = arena.payloads[att->target];
        const PayloadRec ap = arena.payloads[att->payload];
        const Rules& rules = arena.rules(target.formula);
        auto it = rules.defences.find(ap.kind);
        if (it == rules.defences.end()) continue;
        std::vector<int> labels;
        if (ap.kind == PKind::Know) labels = {ap.chosen};
        else if (ap.kind == PKind::Poss)
            labels = world_choices(arena, v, x, target.label, ap.agent, att->target);
        else labels = {target.label};
        for (const Formula& g : it->second)
            for (int l : labels) {
                if (x == Player::P && g.is_atomic() && !granted(arena, v, l, g)) continue;
                push({FType::Defence, x, att->target, att->payload, arena.assertion(l, g)});
            }
    }

    for (int a : v.asserted[pidx(y)]) {
        if (x == Player::O && v.o_attacked.count(a)) continue;
        const PayloadRec target = arena.payloads[a];
        const Rules rules = arena.rules(target.formula);
        for (const auto& form : rules.attacks) {
            switch (form.kind) {
            case PKind::Assert: {
                const Formula& g = *form.asserted;
                if (x == Player::P && g.is_atomic() && !granted(arena, v, target.label, g)) break;
                push({FType::Attack, x, a, -1, arena.assertion(target.label, g)});
                break;
            }
            case PKind::Know:
                for (int u : world_choices(arena, v, x, target.label, form.agent, a))
                    push({FType::Attack, x, a, -1,
                          arena.payload({PKind::Know, target.label, -1, form.agent, u})});
                break;
            default:
                push({FType::Attack, x, a, -1,
                      arena.payload({form.kind, target.label, -1, form.agent, -1})});
            }
        }
    }
    if (x == Player::P)
        for (const Fact& f : pos.facts)
            if (unanswered(pos, f)) out.push_back(f);
    return out;
}

Position advance(const Position& pos, const Fact& f) {
    if (contains(pos, f)) {
        Position next = pos;
        next.turn = other(pos.turn);
        rehash(next);
        return next;
    }
    Position next;
    next.facts.reserve(pos.facts.size() + 1);
    auto at = std::lower_bound(pos.facts.begin(), pos.facts.end(), f);
    next.facts.insert(next.facts.end(), pos.facts.begin(), at);
    next.facts.push_back(f);
    next.facts.insert(next.facts.end(), at, pos.facts.end());
    next.turn = other(pos.turn);
    rehash(next);
    return next;
}

}  // namespace detail

using detail::Arena;
using detail::Fact;
using detail::FType;
using detail::PKind;
using detail::Position;

// Bridges between the canonical facts used by search and indexed moves.
struct SearchAccess {
    static std::vector<Fact> history_facts(Arena& arena, const GameState& s) {
        std::vector<Fact> out;
        for (const Move& m : s.history_) out.push_back(to_fact(arena, s, out, m));
        return out;
    }

    static Fact to_fact(Arena& arena, const GameState& s, const std::vector<Fact>& prior,
                        const Move& m) {
        const int payload = arena.from_payload(m.payload);
        if (m.kind == MoveKind::Start) return {FType::Start, m.actor, -1, -1, payload};
        if (m.target < 0 || m.target >= static_cast<int>(prior.size()))
            throw IllegalMove("PL-0", "move " + std::to_string(m.target) + " does not exist");
        const Fact& t = prior[static_cast<std::size_t>(m.target)];
        const Move& tm = s.history_[static_cast<std::size_t>(m.target)];
        if (tm.actor == m.actor)
            throw IllegalMove("PL-4c", "a player cannot attack or answer their own move " +
                                           std::to_string(m.target));
        if (m.kind == MoveKind::Attack) {
            if (!std::holds_alternative<Assertion>(tm.payload))
                throw IllegalMove("particle", "move " + std::to_string(m.target) +
                                                  " asserts nothing and cannot be attacked");
            return {FType::Attack, m.actor, t.payload, -1, payload};
        }
        if (tm.kind != MoveKind::Attack)
            throw IllegalMove("particle", "move " + std::to_string(m.target) + " is not an attack");
        return {FType::Defence, m.actor, t.target, t.payload, payload};
    }

    static Move to_move(Arena& arena, const GameState& s, const std::vector<Fact>& prior,
                        const Fact& f) {
        Move m{f.actor, MoveKind::Attack, -1, arena.to_payload(f.payload)};
        if (f.type == FType::Attack) {
            m.kind = MoveKind::Attack;
            for (std::size_t k = 0; k < prior.size(); ++k)
                if (s.history_[k].actor != f.actor && prior[k].payload == f.target) {
                    m.target = static_cast<int>(k);
                    break;
                }
        } else {
            m.kind = MoveKind::Defend;
            for (std::size_t k = 0; k < prior.size(); ++k)
                if (prior[k].type == FType::Attack && prior[k].actor != f.actor &&
                    prior[k].target == f.target && prior[k].payload == f.attack) {
                    m.target = static_cast<int>(k);
                    break;
                }
        }
        if (m.target < 0) throw std::logic_error("fact without a matching move");
        return m;
    }

    static GameState with(const GameState& s, Position pos, Move m) {
        GameState out = s;
        out.pos_ = std::make_shared<const Position>(std::move(pos));
        out.history_.push_back(std::move(m));
        return out;
    }

    static Arena& arena(const GameState& s) { return *s.arena_; }
    static std::shared_ptr<Arena> arena_ptr(const GameState& s) { return s.arena_; }
    static const Position& position(const GameState& s) { return *s.pos_; }

    static Strategy make_strategy(std::shared_ptr<const Strategy::Impl> impl) {
        Strategy st;
        st.impl_ = std::move(impl);
        return st;
    }
};

struct Strategy::Impl {
    std::shared_ptr<Arena> arena;
    GameState root;
    std::unordered_map<Position, Fact, detail::PositionHash> choice;
};

const Formula& GameState::thesis() const { return arena_->thesis; }
const GameOptions& GameState::options() const { return arena_->opts; }
Player GameState::turn() const { return pos_->turn; }

std::vector<WorldLabel> GameState::introduced_labels() const {
    detail::View v = detail::make_view(*arena_, *pos_);
    std::vector<WorldLabel> out;
    for (int l : v.introduced) out.push_back(arena_->labels[l]);
    return out;
}

GameState initial_state(const Formula& thesis, GameOptions opts) {
    if (has_unset_variant(thesis))
        throw std::invalid_argument("knowledge operator without variant tag in thesis");
    GameState s;
    s.arena_ = std::make_shared<Arena>(thesis, std::move(opts));
    Position pos;
    const int root = s.arena_->label(WorldLabel::root());
    pos.facts.push_back({FType::Start, Player::P, -1, -1, s.arena_->assertion(root, thesis)});
    pos.turn = Player::O;
    detail::rehash(pos);
    s.pos_ = std::make_shared<const Position>(std::move(pos));
    s.history_.push_back({Player::P, MoveKind::Start, -1, Assertion{WorldLabel::root(), thesis}});
    return s;
}

std::vector<Move> legal_moves(const GameState& s) {
    Arena& arena = *s.arena_;
    auto prior = SearchAccess::history_facts(arena, s);
    std::vector<Move> out;
    for (const Fact& f : detail::candidates(arena, *s.pos_))
        out.push_back(SearchAccess::to_move(arena, s, prior, f));
    return out;
}

namespace {

// Names the first rule `f` breaks; only called for facts that are not legal.
IllegalMove diagnose(Arena& arena, const Position& pos, const Fact& f) {
    detail::View v = detail::make_view(arena, pos);
    if (v.o_inconsistent)
        return {"PL-1", "the play is over: O is committed to inconsistent literals"};
    const detail::PayloadRec target = arena.payloads[f.target];
    const detail::PayloadRec pl = arena.payloads[f.payload];
    const Formula& tf = arena.formulas[target.formula];
    const detail::Rules& rules = arena.rules(target.formula);
    const bool by_p = f.actor == Player::P;
    std::set<int> known(v.introduced.begin(), v.introduced.end());
    const std::string what = render_payload(arena.to_payload(f.payload));

    if (f.type == FType::Attack) {
        bool shape = false;
        for (const auto& form : rules.attacks) {
            if (form.kind != pl.kind || pl.label != target.label) continue;
            if (form.kind == PKind::Assert && arena.formulas[pl.formula] != *form.asserted) continue;
            if (form.kind == PKind::Know || form.kind == PKind::Poss)
                if (form.agent != pl.agent) continue;
            shape = true;
        }
        if (!shape)
            return {"particle", what + " is not an attack on " + render_formula(tf)};
        if (pl.kind == PKind::Know) {
            const WorldLabel& w = arena.labels[target.label];
            const WorldLabel& u = arena.labels[pl.chosen];
            if (!w.same_cluster(u, pl.agent))
                return {"ML-S5", u.str() + " is not in " + pl.agent + "'s cluster of " + w.str()};
            if (by_p && !known.count(pl.chosen))
                return {"ML-frw", "P cannot introduce world " + u.str()};
            if (!by_p) {
                auto reuse = v.o_witness.find(detail::modal_key(arena, f.target));
                if (reuse != v.o_witness.end() ? reuse->second != pl.chosen : known.count(pl.chosen) > 0)
                    return {"fresh-world", reuse != v.o_witness.end()
                                               ? "O reuses " + arena.labels[reuse->second].str() +
                                                     " against this claim"
                                               : "O opens a new world when attacking a knowledge claim"};
            }
            if (!by_p && u.rank() > arena.rank_cap) return {"rank", u.str() + " exceeds the rank bound"};
        }
        if (by_p && pl.kind == PKind::Assert) {
            const Formula& g = arena.formulas[pl.formula];
            if (g.is_atomic() && !detail::granted(arena, v, pl.label, g))
                return {g.kind() == Kind::Atom ? "PL-3" : "ML-frc",
                        render_formula(g) + " has not been stated by O at " +
                            arena.labels[pl.label].str()};
        }
        if (!by_p && v.o_attacked.count(f.target))
            return {"repetition", "O attacks each assertion once"};

        if (detail::contains(pos, f)) return {"PL-2", what + " does not change the situation"};
        if (by_p && detail::restates(arena, v, f))
            return {"PL-2", "P has already stated " + what + " and O has attacked it"};
        return {"particle", what + " is not available"};
    }

    const detail::PayloadRec ap = arena.payloads[f.attack];
    auto it = rules.defences.find(ap.kind);
    bool shape = false;
    if (it != rules.defences.end() && pl.kind == PKind::Assert)
        for (const Formula& g : it->second) shape = shape || g == arena.formulas[pl.formula];
    if (!shape) {
        if (tf.kind() == Kind::Not) return {"particle", "a negation has no defence"};
        return {"particle", what + " does not answer " + render_payload(arena.to_payload(f.attack))};
    }
    const WorldLabel& w = arena.labels[target.label];
    const WorldLabel& u = arena.labels[pl.label];
    if (ap.kind == PKind::Know && pl.label != ap.chosen)
        return {"particle", "the answer must be given at " + arena.labels[ap.chosen].str()};
    if (ap.kind == PKind::Poss) {
        if (!w.same_cluster(u, ap.agent))
            return {"ML-S5", u.str() + " is not in " + ap.agent + "'s cluster of " + w.str()};
        if (by_p && !known.count(pl.label)) return {"ML-frw", "P cannot introduce world " + u.str()};
        if (!by_p) {
            auto reuse = v.o_witness.find(detail::modal_key(arena, f.target));
            if (reuse != v.o_witness.end()) {
                if (reuse->second != pl.label)
                    return {"fresh-world", "O reuses " + arena.labels[reuse->second].str() +
                                               " for this possibility"};
            } else if (known.count(pl.label) ||
                       u != w.child(ap.agent, detail::next_child_index(arena, v, target.label, ap.agent)))
                return {"fresh-world", "O opens the next new world when defending a possibility"};
            if (u.rank() > arena.rank_cap) return {"rank", u.str() + " exceeds the rank bound"};
        }
    } else if (ap.kind != PKind::Know && pl.label != target.label) {
        return {"particle", "the answer must be given at " + w.str()};
    }
    if (by_p) {
        const Formula& g = arena.formulas[pl.formula];
        if (g.is_atomic() && !detail::granted(arena, v, pl.label, g))
            return {g.kind() == Kind::Atom ? "PL-3" : "ML-frc",
                    render_formula(g) + " has not been stated by O at " + u.str()};
    }
    if (!by_p && v.o_defended.count({f.target, f.attack}))
        return {"repetition", "O answers each attack once"};

    if (detail::contains(pos, f)) return {"PL-2", what + " does not change the situation"};
    if (by_p && detail::restates(arena, v, f))
        return {"PL-2", "P has already stated " + what + " and O has attacked it"};
    return {"particle", what + " is not available"};
}

}  // namespace

GameState apply_move(const GameState& s, const Move& m) {
    Arena& arena = *s.arena_;
    const Position& pos = *s.pos_;
    if (m.kind == MoveKind::Start) throw IllegalMove("PL-0", "the thesis is stated only once");
    if (m.actor != pos.turn)
        throw IllegalMove("PL-0", std::string("it is ") + std::string(to_string(pos.turn)) +
                                      "'s turn");
    auto prior = SearchAccess::history_facts(arena, s);
    Fact f = SearchAccess::to_fact(arena, s, prior, m);
    auto legal = detail::candidates(arena, pos);
    if (std::find(legal.begin(), legal.end(), f) == legal.end()) throw diagnose(arena, pos, f);
    return SearchAccess::with(s, detail::advance(pos, f), m);
}

std::optional<Player> winner(const GameState& s) {
    detail::View v = detail::make_view(*s.arena_, *s.pos_);
    if (v.o_inconsistent) return Player::P;
    if (detail::candidates(*s.arena_, *s.pos_).empty()) return other(s.turn());
    return std::nullopt;
}

GameState replay(const Formula& thesis, const std::vector<Move>& moves, GameOptions opts) {
    GameState s = initial_state(thesis, std::move(opts));
    std::size_t k = 0;
    if (!moves.empty() && moves.front().kind == MoveKind::Start) {
        const auto* a = std::get_if<Assertion>(&moves.front().payload);
        if (moves.front().actor != Player::P || !a || !a->label.is_root() || a->formula != thesis)
            throw IllegalMove("PL-0", "move 0: P states the thesis at world 1");
        k = 1;
    }
    for (; k < moves.size(); ++k) {
        try {
            s = apply_move(s, moves[k]);
        } catch (const IllegalMove& e) {
            throw IllegalMove(e.rule(), "move " + std::to_string(k) + ": " +
                                            std::string(e.what()).substr(e.rule().size() + 2));
        }
    }
    return s;
}

std::vector<std::string> check_invariants(const GameState& s) {
    std::vector<std::string> out;
    const auto& h = s.history();
    if (h.empty() || h[0].kind != MoveKind::Start || h[0].actor != Player::P) {
        out.push_back("PL-0: move 0 must be P stating the thesis");
        return out;
    }
    std::set<WorldLabel> introduced{WorldLabel::root()};
    std::map<WorldLabel, std::set<std::string>> o_pos, o_neg;
    std::set<std::string> seen_facts;
    std::set<std::string> o_attacked, o_defended;  // P assertions O attacked, P attacks O answered
    std::vector<std::string> keys;
    auto covered = [&](const WorldLabel& w, const Formula& g) {
        if (g.kind() == Kind::Atom) return o_pos[w].count(g.name()) > 0;
        if (g.kind() != Kind::Ctx) return true;
        ContextFormula c = s.options().env.resolve(g.name());
        if (c.is_bot()) return false;
        for (const auto& l : c.literals())
            if (!(l.positive ? o_pos : o_neg)[w].count(l.atom)) return false;
        return true;
    };
    for (std::size_t k = 0; k < h.size(); ++k) {
        const Move& m = h[k];
        const std::string at = "move " + std::to_string(k) + ": ";
        if (k > 0 && m.actor == h[k - 1].actor) out.push_back(at + "PL-0: players must alternate");
        if (k > 0 && m.kind == MoveKind::Start) out.push_back(at + "PL-0: second starting move");
        std::vector<WorldLabel> labels;
        const Assertion* asserted = std::get_if<Assertion>(&m.payload);
        if (asserted) {
            labels.push_back(asserted->label);
        } else {
            const auto& r = std::get<Request>(m.payload);
            labels.push_back(r.label);
            if (r.kind == Request::Kind::Know) labels.push_back(r.chosen);
        }
        if (m.actor == Player::P) {
            for (const auto& w : labels)
                if (!introduced.count(w)) out.push_back(at + "ML-frw: P introduced " + w.str());
            if (asserted && asserted->formula.kind() == Kind::Atom &&
                !covered(asserted->label, asserted->formula))
                out.push_back(at + "PL-3: P stated " + render_formula(asserted->formula) +
                              " first at " + asserted->label.str());
            if (asserted && asserted->formula.kind() == Kind::Ctx &&
                !covered(asserted->label, asserted->formula))
                out.push_back(at + "ML-frc: P introduced " + render_formula(asserted->formula) +
                              " at " + asserted->label.str());
        }
        for (const auto& w : labels) introduced.insert(w);
        if (m.actor == Player::O && asserted) {
            const Formula& g = asserted->formula;
            if (g.kind() == Kind::Atom) o_pos[asserted->label].insert(g.name());
            if (g.kind() == Kind::Not && g.body().kind() == Kind::Atom)
                o_neg[asserted->label].insert(g.body().name());
            if (g.kind() == Kind::Ctx) {
                const ContextFormula c = s.options().env.resolve(g.name());
                for (const auto& l : c.literals()) (l.positive ? o_pos : o_neg)[asserted->label].insert(l.atom);
            }
        }
        // PL-2: identical content against identical targets
        std::string key = std::string(to_string(m.actor)) + "|" +
                          std::to_string(static_cast<int>(m.kind)) + "|";
        if (m.target >= 0 && m.target < static_cast<int>(h.size())) {
            const Move& t = h[static_cast<std::size_t>(m.target)];
            key += render_payload(t.payload);
            if (m.kind == MoveKind::Defend && t.target >= 0)
                key += "|" + render_payload(h[static_cast<std::size_t>(t.target)].payload);
        }
        key += "|" + render_payload(m.payload);
        const std::string said = render_payload(m.payload);
        const bool answered = (asserted && o_attacked.count(said)) ||
                              (m.kind == MoveKind::Attack && o_defended.count(key));
        if (!seen_facts.insert(key).second) {
            if (m.actor == Player::O || answered) out.push_back(at + "PL-2: repeats an earlier move");
        } else if (m.actor == Player::P && asserted && o_attacked.count(said)) {
            out.push_back(at + "PL-2: restates " + said + " after O attacked it");
        }
        if (m.actor == Player::O && m.target >= 0 && m.target < static_cast<int>(k)) {
            const Move& t = h[static_cast<std::size_t>(m.target)];
            if (m.kind == MoveKind::Attack && std::holds_alternative<Assertion>(t.payload))
                o_attacked.insert(render_payload(t.payload));
            if (m.kind == MoveKind::Defend) o_defended.insert(keys[static_cast<std::size_t>(m.target)]);
        }
        keys.push_back(key);
    }
    return out;
}

// ----------------------------------------------------------------- search

namespace {

class BudgetHit : public std::exception {};

class Searcher {
public:
    Searcher(Arena& arena, std::uint64_t budget) : arena_(arena), budget_(budget) {}

    bool wins(const Position& pos) {
        if (auto it = memo_.find(pos); it != memo_.end()) return it->second;
        if (++nodes_ > budget_) throw BudgetHit();
        auto moves = detail::candidates(arena_, pos);
        bool result;
        if (pos.turn == Player::P) {
            result = false;
            if (moves.empty() && detail::make_view(arena_, pos).o_inconsistent) result = true;
            for (const Fact& f : moves)
                if (wins(detail::advance(pos, f))) {
                    p_choice_.emplace(pos, f);
                    result = true;
                    break;
                }
        } else {
            result = true;
            for (const Fact& f : moves)
                if (!wins(detail::advance(pos, f))) {
                    o_choice_.emplace(pos, f);
                    result = false;
                    break;
                }
        }
        memo_.emplace(pos, result);
        return result;
    }

    // P's choices along every O continuation of a won position.
    void collect(const Position& pos, std::unordered_map<Position, Fact, detail::PositionHash>& out) {
        if (out.count(pos)) return;
        if (pos.turn == Player::P) {
            auto it = p_choice_.find(pos);
            if (it == p_choice_.end()) return;  // O is inconsistent: nothing to answer
            out.emplace(pos, it->second);
            collect(detail::advance(pos, it->second), out);
        } else {
            for (const Fact& f : detail::candidates(arena_, pos)) collect(detail::advance(pos, f), out);
        }
    }

    std::optional<Fact> o_choice(const Position& pos) const {
        auto it = o_choice_.find(pos);
        if (it == o_choice_.end()) return std::nullopt;
        return it->second;
    }

    std::uint64_t nodes() const { return nodes_; }

private:
    Arena& arena_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    std::unordered_map<Position, bool, detail::PositionHash> memo_;
    std::unordered_map<Position, Fact, detail::PositionHash> p_choice_;
    std::unordered_map<Position, Fact, detail::PositionHash> o_choice_;
};

}  // namespace

std::optional<Move> Strategy::response(const GameState& s) const {
    if (!impl_) return std::nullopt;
    if (&SearchAccess::arena(s) != impl_->arena.get()) {
        // ids are per arena: replay the play into the strategy's own game
        if (s.thesis() != impl_->root.thesis()) throw std::invalid_argument("state from a different game");
        GameState local = impl_->root;
        for (std::size_t k = 1; k < s.history().size(); ++k) local = apply_move(local, s.history()[k]);
        return response(local);
    }
    auto it = impl_->choice.find(SearchAccess::position(s));
    if (it == impl_->choice.end()) return std::nullopt;
    Arena& arena = SearchAccess::arena(s);
    auto prior = SearchAccess::history_facts(arena, s);
    return SearchAccess::to_move(arena, s, prior, it->second);
}

std::size_t Strategy::size() const { return impl_ ? impl_->choice.size() : 0; }

SearchResult has_winning_strategy(const Formula& thesis, GameOptions opts, std::uint64_t budget) {
    GameState s = initial_state(thesis, std::move(opts));
    Arena& arena = SearchAccess::arena(s);
    Searcher search(arena, budget);
    SearchResult res{SearchResult::Status::BudgetExhausted, std::nullopt, {}, 0};
    bool won;
    try {
        won = search.wins(SearchAccess::position(s));
    } catch (const BudgetHit&) {
        res.nodes = search.nodes();
        return res;
    }
    res.nodes = search.nodes();
    if (won) {
        auto impl = std::make_shared<Strategy::Impl>();
        impl->arena = SearchAccess::arena_ptr(s);
        impl->root = s;
        search.collect(SearchAccess::position(s), impl->choice);
        res.status = SearchResult::Status::ProponentWins;
        res.strategy = SearchAccess::make_strategy(std::move(impl));
        return res;
    }
    res.status = SearchResult::Status::OpponentWins;
    // follow O's refutation; P's replies are all losing, take the first
    for (;;) {
        const Position& pos = SearchAccess::position(s);
        auto legal = detail::candidates(arena, pos);
        if (legal.empty()) break;
        Fact f = legal.front();
        if (pos.turn == Player::O) {
            auto choice = search.o_choice(pos);
            if (!choice) break;
            f = *choice;
        }
        auto prior = SearchAccess::history_facts(arena, s);
        Move m = SearchAccess::to_move(arena, s, prior, f);
        s = SearchAccess::with(s, detail::advance(pos, f), m);
    }
    res.refuting_play = s.history();
    return res;
}

// ------------------------------------------------------------- transcript

namespace {

struct Cell {
    std::string num, text, ref;
};

}  // namespace

std::string render_transcript(const GameState& s, TranscriptFormat fmt) {
    const auto& h = s.history();
    std::vector<std::pair<Cell, Cell>> rows;  // (O side, P side)
    auto cell = [&](std::size_t k, bool with_ref) {
        Cell c{"(" + std::to_string(k) + ")", render_payload(h[k].payload), ""};
        if (with_ref) c.ref = std::to_string(h[k].target);
        return c;
    };
    rows.push_back({Cell{}, cell(0, false)});
    for (std::size_t k = 1; k < h.size(); ++k) {
        if (h[k].kind != MoveKind::Attack) continue;
        Cell att = cell(k, true);
        std::vector<Cell> answers;
        for (std::size_t d = k + 1; d < h.size(); ++d)
            if (h[d].kind == MoveKind::Defend && h[d].target == static_cast<int>(k))
                answers.push_back(cell(d, false));
        if (answers.empty()) {
            const auto* target = std::get_if<Assertion>(&h[static_cast<std::size_t>(h[k].target)].payload);
            Cell none;
            if (target && target->formula.kind() == Kind::Not) none.text = "⊗";
            answers.push_back(none);
        }
        for (std::size_t a = 0; a < answers.size(); ++a) {
            Cell left = a == 0 ? att : Cell{};
            if (h[k].actor == Player::O) rows.push_back({left, answers[a]});
            else rows.push_back({answers[a], left});
        }
    }

    std::string verdict;
    if (auto w = winner(s)) verdict = std::string(to_string(*w)) + " wins the play";
    else verdict = "play unfinished, " + std::string(to_string(s.turn())) + " to move";

    std::ostringstream os;
    if (fmt == TranscriptFormat::Markdown) {
        os << "| | O | | | P | |\n|---|---|---|---|---|---|\n";
        for (const auto& [o, p] : rows)
            os << "| " << o.num << " | " << o.text << " | " << o.ref << " | " << p.ref << " | "
               << p.text << " | " << p.num << " |\n";
        os << "\n" << verdict << "\n";
        return os.str();
    }
    // display width: count code points, not bytes
    auto width = [](const std::string& t) {
        std::size_t n = 0;
        for (unsigned char ch : t) n += (ch & 0xC0) != 0x80;
        return n;
    };
    std::size_t wo = 1, wp = 1, wn = 3, wr = 1;
    for (const auto& [o, p] : rows) {
        wo = std::max(wo, width(o.text));
        wp = std::max(wp, width(p.text));
        wn = std::max({wn, o.num.size(), p.num.size()});
        wr = std::max({wr, o.ref.size(), p.ref.size()});
    }
    auto pad = [&](const std::string& t, std::size_t w, bool right) {
        std::string fill(w > width(t) ? w - width(t) : 0, ' ');
        return right ? fill + t : t + fill;
    };
    os << pad("", wn, false) << "  " << pad("O", wo, false) << "  " << pad("", wr, true) << " || "
       << pad("", wr, false) << "  " << pad("P", wp, false) << "  " << "\n";
    for (const auto& [o, p] : rows) {
        std::string line = pad(o.num, wn, false) + "  " + pad(o.text, wo, false) + "  " +
                           pad(o.ref, wr, true) + " || " + pad(p.ref, wr, false) + "  " +
                           pad(p.text, wp, false) + "  " + p.num;
        while (!line.empty() && line.back() == ' ') line.pop_back();
        os << line << "\n";
    }
    os << verdict << "\n";
    return os.str();
}

}  // namespace cel
