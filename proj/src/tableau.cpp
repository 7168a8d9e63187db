#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_set>

#include "cel/prove.hpp"
#include "cel/reduce.hpp"

namespace cel {

bool TableauNode::closed() const {
    if (children.empty()) return !closure.empty();
    return std::all_of(children.begin(), children.end(),
                       [](const TableauNode& c) { return c.closed(); });
}

namespace {

// Labels form a tree; a label created as an agent-j witness joins the
// j-cluster of its parent and starts singleton clusters for everyone else.
struct Label {
    int parent = -1;
    std::string agent;
    std::string name;
};

struct SignedHash {
    std::size_t operator()(const std::pair<bool, Formula>& s) const {
        return s.second.hash() * 2 + (s.first ? 1 : 0);
    }
};

struct Entry {
    int label;
    bool sign;
    Formula f;
    bool done = false;
};

enum class RuleClass { None, Alpha, Beta, Witness };

struct Branch {
    std::vector<Label> labels;
    std::vector<std::unordered_set<std::pair<bool, Formula>, SignedHash>> facts;
    std::vector<Entry> entries;
    // (agent, cluster root) -> signed bodies every member must carry
    std::map<std::pair<std::string, int>, std::vector<std::pair<bool, Formula>>> boxes;
    std::map<std::pair<int, std::string>, int> next_child;
};

std::string show(const Branch& b, int label, bool sign, const Formula& f) {
    return b.labels[label].name + ": " + (sign ? "T " : "F ") + render_formula(f);
}

int cluster_root(const Branch& b, int label, const std::string& agent) {
    while (b.labels[label].parent >= 0 && b.labels[label].agent == agent)
        label = b.labels[label].parent;
    return label;
}

std::vector<int> cluster_members(const Branch& b, int label, const std::string& agent) {
    int root = cluster_root(b, label, agent);
    std::vector<int> out;
    for (int k = 0; k < static_cast<int>(b.labels.size()); ++k)
        if (cluster_root(b, k, agent) == root) out.push_back(k);
    return out;
}

class Tableau {
public:
    Tableau(const ContextEnv& env, std::size_t max_steps) : env_(env), max_steps_(max_steps) {}

    // True when every branch below closes; otherwise `open` holds a
    // saturated open branch.
    bool run(Branch& b, TableauNode& node, std::optional<Branch>& open);

    bool add(Branch& b, int label, bool sign, const Formula& f, TableauNode& node);

private:
    RuleClass classify(bool sign, const Formula& f) const;
    bool apply_alpha(Branch& b, const Entry& e, TableauNode& node);
    std::vector<std::vector<std::pair<bool, Formula>>> beta_alternatives(const Entry& e) const;
    bool apply_witness(Branch& b, const Entry& e, TableauNode& node);
    bool add_box(Branch& b, int label, const std::string& agent, bool sign, const Formula& body,
                 TableauNode& node);
    void tick() {
        if (++steps_ > max_steps_)
            throw ResourceLimit("tableau exceeded " + std::to_string(max_steps_) + " steps");
    }

    const ContextEnv& env_;
    std::size_t max_steps_;
    std::size_t steps_ = 0;
};

RuleClass Tableau::classify(bool sign, const Formula& f) const {
    switch (f.kind()) {
    case Kind::Atom: return RuleClass::None;
    case Kind::Ctx: return sign ? RuleClass::Alpha : RuleClass::Beta;
    case Kind::Not: return RuleClass::Alpha;
    case Kind::And: return sign ? RuleClass::Alpha : RuleClass::Beta;
    case Kind::Or: return sign ? RuleClass::Beta : RuleClass::Alpha;
    case Kind::Imp: return sign ? RuleClass::Beta : RuleClass::Alpha;
    case Kind::Iff: return RuleClass::Beta;
    case Kind::Know: return sign ? RuleClass::Alpha : RuleClass::Witness;
    case Kind::Poss: return sign ? RuleClass::Witness : RuleClass::Alpha;
    case Kind::Rel: throw ProofError("relativized formula reached the tableau");
    }
    return RuleClass::None;
}

bool Tableau::add(Branch& b, int label, bool sign, const Formula& f, TableauNode& node) {
    auto& facts = b.facts[label];
    if (facts.count({sign, f})) return true;
    if (facts.count({!sign, f})) {
        node.closure = "closed at " + b.labels[label].name + ": T/F " + render_formula(f);
        return false;
    }
    facts.insert({sign, f});
    if (classify(sign, f) != RuleClass::None) b.entries.push_back({label, sign, f});
    return true;
}

bool Tableau::add_box(Branch& b, int label, const std::string& agent, bool sign,
                      const Formula& body, TableauNode& node) {
    int root = cluster_root(b, label, agent);
    auto& box = b.boxes[{agent, root}];
    if (std::find(box.begin(), box.end(), std::make_pair(sign, body)) != box.end()) return true;
    box.emplace_back(sign, body);
    for (int m : cluster_members(b, label, agent))
        if (!add(b, m, sign, body, node)) return false;
    return true;
}

bool Tableau::apply_alpha(Branch& b, const Entry& e, TableauNode& node) {
    const Formula& f = e.f;
    node.steps.push_back("α " + show(b, e.label, e.sign, f));
    switch (f.kind()) {
    case Kind::Ctx: {
        ContextFormula c = env_.resolve(f.name());
        if (c.is_bot()) {
            node.closure = "closed at " + b.labels[e.label].name + ": T " + render_formula(f) +
                           " is false";
            return false;
        }
        for (const auto& l : c.literals())
            if (!add(b, e.label, l.positive, Formula::atom(l.atom), node)) return false;
        return true;
    }
    case Kind::Not: return add(b, e.label, !e.sign, f.body(), node);
    case Kind::And:
        return add(b, e.label, true, f.left(), node) && add(b, e.label, true, f.right(), node);
    case Kind::Or:
        return add(b, e.label, false, f.left(), node) && add(b, e.label, false, f.right(), node);
    case Kind::Imp:
        return add(b, e.label, true, f.left(), node) && add(b, e.label, false, f.right(), node);
    case Kind::Know: return add_box(b, e.label, f.name(), true, f.body(), node);
    case Kind::Poss: return add_box(b, e.label, f.name(), false, f.body(), node);
    default: throw std::logic_error("not an alpha formula");
    }
}

std::vector<std::vector<std::pair<bool, Formula>>> Tableau::beta_alternatives(
    const Entry& e) const {
    const Formula& f = e.f;
    switch (f.kind()) {
    case Kind::Ctx: {
        ContextFormula c = env_.resolve(f.name());
        std::vector<std::vector<std::pair<bool, Formula>>> alts;
        if (c.is_bot()) return {{}};
        for (const auto& l : c.literals()) alts.push_back({{!l.positive, Formula::atom(l.atom)}});
        return alts;  // Top: no alternative, the branch closes
    }
    case Kind::And: return {{{false, f.left()}}, {{false, f.right()}}};
    case Kind::Or: return {{{true, f.left()}}, {{true, f.right()}}};
    case Kind::Imp: return {{{false, f.left()}}, {{true, f.right()}}};
    case Kind::Iff:
        if (e.sign)
            return {{{true, f.left()}, {true, f.right()}}, {{false, f.left()}, {false, f.right()}}};
        return {{{true, f.left()}, {false, f.right()}}, {{false, f.left()}, {true, f.right()}}};
    default: throw std::logic_error("not a beta formula");
    }
}

bool Tableau::apply_witness(Branch& b, const Entry& e, TableauNode& node) {
    const std::string& agent = e.f.name();
    // F K phi needs a member refuting phi; T P phi one verifying it
    const bool body_sign = e.f.kind() == Kind::Poss;
    const Formula& body = e.f.body();
    for (int m : cluster_members(b, e.label, agent)) {
        if (b.facts[m].count({body_sign, body})) {
            node.steps.push_back("π " + show(b, e.label, e.sign, e.f) + " ⇐ " +
                                 b.labels[m].name);
            return true;
        }
    }
    int idx = ++b.next_child[{e.label, agent}];
    Label fresh{e.label, agent, b.labels[e.label].name + agent + std::to_string(idx)};
    b.labels.push_back(fresh);
    b.facts.emplace_back();
    const int id = static_cast<int>(b.labels.size()) - 1;
    node.steps.push_back("π " + show(b, e.label, e.sign, e.f) + " ⇒ " + fresh.name);
    if (!add(b, id, body_sign, body, node)) return false;
    // the new member inherits the cluster's boxed formulas
    int root = cluster_root(b, id, agent);
    auto box = b.boxes[{agent, root}];
    for (const auto& [s, g] : box)
        if (!add(b, id, s, g, node)) return false;
    return true;
}

bool Tableau::run(Branch& b, TableauNode& node, std::optional<Branch>& open) {
    for (;;) {
        tick();
        auto pick = [&](RuleClass rc) -> Entry* {
            for (auto& e : b.entries)
                if (!e.done && classify(e.sign, e.f) == rc) return &e;
            return nullptr;
        };
        if (Entry* e = pick(RuleClass::Alpha)) {
            e->done = true;
            Entry copy = *e;
            if (!apply_alpha(b, copy, node)) return true;
            continue;
        }
        if (Entry* e = pick(RuleClass::Beta)) {
            e->done = true;
            Entry copy = *e;
            node.steps.push_back("β " + show(b, copy.label, copy.sign, copy.f));
            auto alts = beta_alternatives(copy);
            if (alts.empty()) {
                node.closure = "closed at " + b.labels[copy.label].name + ": F " +
                               render_formula(copy.f) + " is unsatisfiable";
                return true;
            }
            if (alts.size() == 1) {
                for (const auto& [s, g] : alts.front())
                    if (!add(b, copy.label, s, g, node)) return true;
                continue;
            }
            for (const auto& alt : alts) {
                Branch child = b;
                TableauNode& cn = node.children.emplace_back();
                bool ok = true;
                for (const auto& [s, g] : alt)
                    if (!add(child, copy.label, s, g, cn)) {
                        ok = false;
                        break;
                    }
                if (ok && !run(child, cn, open)) return false;
            }
            return true;
        }
        if (Entry* e = pick(RuleClass::Witness)) {
            e->done = true;
            Entry copy = *e;
            if (!apply_witness(b, copy, node)) return true;
            continue;
        }
        open = b;
        return false;
    }
}

KripkeModel extract_model(const Branch& b, const std::set<std::string>& agents) {
    KripkeModel m;
    for (const auto& l : b.labels) m.worlds.push_back(l.name);
    for (const auto& agent : agents) {
        std::map<int, std::vector<std::string>> by_root;
        for (int k = 0; k < static_cast<int>(b.labels.size()); ++k)
            by_root[cluster_root(b, k, agent)].push_back(b.labels[k].name);
        auto& classes = m.relations[agent];
        for (auto& [root, members] : by_root) classes.push_back(std::move(members));
    }
    for (int k = 0; k < static_cast<int>(b.labels.size()); ++k)
        for (const auto& [sign, f] : b.facts[k])
            if (sign && f.kind() == Kind::Atom) m.valuation[f.name()].push_back(b.labels[k].name);
    for (auto& [atom, ws] : m.valuation) {
        std::sort(ws.begin(), ws.end(), [&](const std::string& x, const std::string& y) {
            auto ix = std::find(m.worlds.begin(), m.worlds.end(), x);
            auto iy = std::find(m.worlds.begin(), m.worlds.end(), y);
            return ix < iy;
        });
    }
    return m;
}

}  // namespace

Verdict prove_el(const Formula& f, const ContextEnv& env, TableauOptions opts) {
    auto info = formula_info(f);
    if (!info.is_el) throw ProofError("prove_el expects a formula without relativization");
    if (has_unset_variant(f)) throw ProofError("knowledge operator without variant tag");

    Tableau t(env, opts.max_steps);
    Branch b;
    b.labels.push_back({-1, "", "1"});
    b.facts.emplace_back();
    TableauNode root;
    root.steps.push_back("start 1: F " + render_formula(f));
    std::optional<Branch> open;
    bool closed = !t.add(b, 0, false, f, root) || t.run(b, root, open);
    if (closed) return Valid{std::move(root)};

    KripkeModel m = extract_model(*open, info.agents);
    Evaluator ev(m, env);
    if (ev.holds(0, f))
        throw ProofError("open branch does not refute " + render_formula(f) +
                         " (tableau defect)");
    return Invalid{std::move(m), "1"};
}

Verdict prove_cel(const Formula& f, const ContextEnv& env, TableauOptions opts) {
    if (has_unset_variant(f)) throw ProofError("knowledge operator without variant tag");
    ReductionTrace trace = reduce_full(f);
    Verdict v = prove_el(trace.result, env, opts);
    if (auto* inv = std::get_if<Invalid>(&v)) {
        // relations for agents only mentioned through contexts are harmless;
        // every agent of f already occurs in the reduced formula
        if (satisfies(inv->model, inv->world, env, f))
            throw ProofError("counter-model for the reduced formula does not refute " +
                             render_formula(f));
    }
    return v;
}

namespace {

void render_node(const TableauNode& n, int depth, std::ostringstream& os) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    for (const auto& s : n.steps) os << pad << s << '\n';
    if (!n.closure.empty()) os << pad << "× " << n.closure << '\n';
    for (std::size_t k = 0; k < n.children.size(); ++k) {
        os << pad << "branch " << k + 1 << ":\n";
        render_node(n.children[k], depth + 1, os);
    }
}

}  // namespace

std::string render_tableau(const TableauNode& t) {
    std::ostringstream os;
    render_node(t, 0, os);
    return os.str();
}

}  // namespace cel
