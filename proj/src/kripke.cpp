#include "cel/kripke.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "cel/reduce.hpp"

namespace cel {

// ---------------------------------------------------------------- models

std::vector<std::string> check_model(const KripkeModel& m) {
    std::vector<std::string> out;
    if (m.worlds.empty()) out.push_back("model has no worlds");
    if (m.worlds.size() > static_cast<std::size_t>(max_model_worlds))
        out.push_back("model has more than " + std::to_string(max_model_worlds) + " worlds");
    std::set<std::string> known;
    for (const auto& w : m.worlds) {
        if (w.empty()) out.push_back("empty world name");
        if (!known.insert(w).second) out.push_back("duplicate world '" + w + "'");
    }
    for (const auto& [agent, classes] : m.relations) {
        if (agent.empty()) out.push_back("empty agent name");
        std::map<std::string, int> seen;
        for (const auto& cls : classes) {
            if (cls.empty()) out.push_back("agent " + agent + ": empty class");
            for (const auto& w : cls) {
                if (!known.count(w))
                    out.push_back("agent " + agent + ": unknown world '" + w + "'");
                ++seen[w];
            }
        }
        for (const auto& w : m.worlds) {
            auto it = seen.find(w);
            if (it == seen.end())
                out.push_back("agent " + agent + ": world '" + w + "' in no class");
            else if (it->second > 1)
                out.push_back("agent " + agent + ": world '" + w + "' in several classes");
        }
    }
    for (const auto& [atom, ws] : m.valuation) {
        if (atom.empty()) out.push_back("empty atom name");
        for (const auto& w : ws)
            if (!known.count(w)) out.push_back("atom " + atom + ": unknown world '" + w + "'");
    }
    return out;
}

// ---------------------------------------------------------------- contexts

ContextEnv ContextEnv::constant(ContextFormula c) {
    ContextEnv e;
    e.fallback_ = Fallback::Constant;
    e.fallback_body_ = std::move(c);
    return e;
}

ContextEnv ContextEnv::strict() {
    ContextEnv e;
    e.fallback_ = Fallback::Error;
    return e;
}

ContextEnv& ContextEnv::bind(std::string name, ContextFormula body) {
    bindings_[std::move(name)] = std::move(body);
    return *this;
}

ContextFormula ContextEnv::resolve(const std::string& name) const {
    if (auto it = bindings_.find(name); it != bindings_.end()) return it->second;
    switch (fallback_) {
    case Fallback::FreshAtom:
        return ContextFormula::of({Literal{std::string(fresh_context_prefix) + name, true}});
    case Fallback::Constant: return fallback_body_;
    case Fallback::Error: break;
    }
    throw EvalError("unresolved context '" + name + "'");
}

// ---------------------------------------------------------------- evaluation

Evaluator::Evaluator(const KripkeModel& m, ContextEnv env) : env_(std::move(env)) {
    auto problems = check_model(m);
    if (!problems.empty()) throw ModelError("ill-formed model: " + problems.front());
    n_ = static_cast<int>(m.worlds.size());
    all_ = n_ == 64 ? ~WorldSet{0} : ((WorldSet{1} << n_) - 1);
    for (int k = 0; k < n_; ++k) index_[m.worlds[k]] = k;
    for (const auto& [agent, classes] : m.relations) {
        auto& masks = classes_[agent];
        for (const auto& cls : classes) {
            WorldSet s = 0;
            for (const auto& w : cls) s |= WorldSet{1} << index_.at(w);
            masks.push_back(s);
        }
    }
    for (const auto& [atom, ws] : m.valuation) {
        WorldSet s = 0;
        for (const auto& w : ws) s |= WorldSet{1} << index_.at(w);
        valuation_[atom] = s;
    }
}

int Evaluator::world_index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw EvalError("unknown world '" + name + "'");
    return it->second;
}

WorldSet Evaluator::atom_set(const std::string& atom) const {
    auto it = valuation_.find(atom);
    return it == valuation_.end() ? 0 : it->second;
}

WorldSet Evaluator::literal_set(const ContextFormula& c) const {
    if (c.is_bot()) return 0;
    WorldSet s = all_;
    for (const auto& l : c.literals()) {
        WorldSet a = atom_set(l.atom);
        s &= l.positive ? a : (all_ & ~a);
    }
    return s;
}

WorldSet Evaluator::context_set(const std::string& context) const {
    return literal_set(env_.resolve(context));
}

WorldSet Evaluator::box(const std::string& agent, WorldSet s) const {
    auto it = classes_.find(agent);
    if (it == classes_.end()) throw EvalError("model has no relation for agent '" + agent + "'");
    WorldSet out = 0;
    for (WorldSet cls : it->second)
        if ((cls & s) == cls) out |= cls;
    return out;
}

WorldSet Evaluator::diamond(const std::string& agent, WorldSet s) const {
    auto it = classes_.find(agent);
    if (it == classes_.end()) throw EvalError("model has no relation for agent '" + agent + "'");
    WorldSet out = 0;
    for (WorldSet cls : it->second)
        if (cls & s) out |= cls;
    return out;
}

namespace {

void require_variant(const Formula& f) {
    if (f.variant() == Variant::Unset)
        throw EvalError("knowledge operator without variant tag: " + render_formula(f));
}

}  // namespace

WorldSet Evaluator::truth_set(const Formula& f) const {
    switch (f.kind()) {
    case Kind::Atom: return atom_set(f.name());
    case Kind::Ctx: return context_set(f.name());
    case Kind::Not: return all_ & ~truth_set(f.body());
    case Kind::And: return truth_set(f.left()) & truth_set(f.right());
    case Kind::Or: return truth_set(f.left()) | truth_set(f.right());
    case Kind::Imp: return (all_ & ~truth_set(f.left())) | truth_set(f.right());
    case Kind::Iff: return all_ & ~(truth_set(f.left()) ^ truth_set(f.right()));
    case Kind::Know: require_variant(f); return box(f.name(), truth_set(f.body()));
    case Kind::Poss: require_variant(f); return diamond(f.name(), truth_set(f.body()));
    case Kind::Rel: return relativized(f.body(), f.name());
    }
    return 0;
}

// (body)^ctx, one clause per shape of the body.
WorldSet Evaluator::relativized(const Formula& body, const std::string& ctx) const {
    const WorldSet not_ctx = all_ & ~context_set(ctx);
    switch (body.kind()) {
    case Kind::Atom:
    case Kind::Ctx:
    case Kind::Rel: return not_ctx | truth_set(body);
    case Kind::Not: return not_ctx | (all_ & ~relativized(body.body(), ctx));
    case Kind::And: return relativized(body.left(), ctx) & relativized(body.right(), ctx);
    case Kind::Know: {
        require_variant(body);
        const std::string own = agent_context(body.name());
        const Variant v = body.variant();
        const std::string& cx = (v == Variant::V11 || v == Variant::V12) ? ctx : own;
        const std::string& cy = (v == Variant::V11 || v == Variant::V21) ? ctx : own;
        return (all_ & ~context_set(cx)) | box(body.name(), relativized(body.body(), cy));
    }
    case Kind::Or:
    case Kind::Imp:
    case Kind::Iff:
    case Kind::Poss:
        return truth_set(rewrite_redex(Formula::rel(body, ctx)).result);
    }
    return 0;
}

bool eval_context(const KripkeModel& m, const std::string& world, const ContextEnv& env,
                  const std::string& context) {
    Evaluator ev(m, env);
    return (ev.context_set(context) >> ev.world_index(world)) & 1U;
}

bool satisfies(const KripkeModel& m, const std::string& world, const ContextEnv& env,
               const Formula& f) {
    Evaluator ev(m, env);
    return ev.holds(ev.world_index(world), f);
}

// ---------------------------------------------------------------- enumeration

std::vector<std::vector<int>> set_partitions(int n) {
    std::vector<std::vector<int>> out;
    if (n <= 0) return out;
    std::vector<int> rgs(static_cast<std::size_t>(n), 0);
    for (;;) {
        out.push_back(rgs);
        // next restricted growth string: increment the rightmost position
        // that may still grow, reset everything after it
        int k = n - 1;
        for (; k > 0; --k) {
            int mx = *std::max_element(rgs.begin(), rgs.begin() + k);
            if (rgs[k] <= mx) break;
        }
        if (k == 0) return out;
        ++rgs[k];
        std::fill(rgs.begin() + k + 1, rgs.end(), 0);
    }
}

std::uint64_t bell_number(int n) {
    // Bell triangle
    std::vector<std::uint64_t> row{1};
    for (int k = 1; k <= n; ++k) {
        std::vector<std::uint64_t> next{row.back()};
        for (auto v : row) next.push_back(next.back() + v);
        row = std::move(next);
    }
    return row.front();
}

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
    return a * b;
}

std::uint64_t pow2(std::uint64_t e) { return e >= 64 ? UINT64_MAX : (std::uint64_t{1} << e); }

}  // namespace

std::uint64_t model_count(const EnumerationSpec& spec) {
    std::uint64_t total = 0;
    for (int n = 1; n <= spec.max_worlds; ++n) {
        std::uint64_t c = 1;
        for (std::size_t a = 0; a < spec.agents.size(); ++a) c = saturating_mul(c, bell_number(n));
        c = saturating_mul(c, pow2(static_cast<std::uint64_t>(n) * spec.atoms.size()));
        total = total > UINT64_MAX - c ? UINT64_MAX : total + c;
    }
    return total;
}

void enumerate_models(const EnumerationSpec& spec,
                      const std::function<bool(const KripkeModel&)>& visit) {
    if (spec.max_worlds < 1) throw std::invalid_argument("max_worlds must be at least 1");
    if (spec.max_worlds > max_model_worlds)
        throw std::invalid_argument("max_worlds exceeds " + std::to_string(max_model_worlds));
    const std::uint64_t count = model_count(spec);
    if (count > spec.ceiling)
        throw ResourceLimit("enumeration of " + std::to_string(count) +
                            " models exceeds the ceiling of " + std::to_string(spec.ceiling));

    std::vector<std::string> agents = spec.agents;
    std::sort(agents.begin(), agents.end());
    agents.erase(std::unique(agents.begin(), agents.end()), agents.end());
    std::vector<std::string> atoms = spec.atoms;
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());

    for (int n = 1; n <= spec.max_worlds; ++n) {
        KripkeModel m;
        for (int k = 1; k <= n; ++k) m.worlds.push_back("w" + std::to_string(k));
        const auto parts = set_partitions(n);
        std::vector<std::size_t> choice(agents.size(), 0);
        const std::size_t bits = static_cast<std::size_t>(n) * atoms.size();
        for (;;) {
            m.relations.clear();
            for (std::size_t a = 0; a < agents.size(); ++a) {
                const auto& rgs = parts[choice[a]];
                int classes = *std::max_element(rgs.begin(), rgs.end()) + 1;
                std::vector<std::vector<std::string>> cls(static_cast<std::size_t>(classes));
                for (int w = 0; w < n; ++w) cls[rgs[w]].push_back(m.worlds[w]);
                m.relations[agents[a]] = std::move(cls);
            }
            for (std::uint64_t val = 0; val < pow2(bits); ++val) {
                m.valuation.clear();
                for (std::size_t a = 0; a < atoms.size(); ++a) {
                    auto& ws = m.valuation[atoms[a]];
                    for (int w = 0; w < n; ++w)
                        if ((val >> (a * static_cast<std::size_t>(n) + w)) & 1U)
                            ws.push_back(m.worlds[w]);
                }
                if (!visit(m)) return;
            }
            // odometer over agent partitions, last agent fastest
            bool done = true;
            for (std::size_t a = agents.size(); a-- > 0;) {
                if (++choice[a] < parts.size()) {
                    done = false;
                    break;
                }
                choice[a] = 0;
            }
            if (done) break;
        }
    }
}

std::vector<std::string> relevant_atoms(const Formula& f, const ContextEnv& env) {
    std::set<std::string> atoms;
    std::set<std::string> contexts;
    std::function<void(const Formula&)> walk = [&](const Formula& g) {
        switch (g.kind()) {
        case Kind::Atom: atoms.insert(g.name()); return;
        case Kind::Ctx: contexts.insert(g.name()); return;
        case Kind::Rel:
            contexts.insert(g.name());
            walk(g.body());
            return;
        case Kind::Know:
        case Kind::Poss:
            if (g.variant() != Variant::V11) contexts.insert(agent_context(g.name()));
            walk(g.body());
            return;
        case Kind::Not: walk(g.body()); return;
        default:
            walk(g.left());
            walk(g.right());
        }
    };
    walk(f);
    for (const auto& c : contexts) {
        ContextFormula body = env.resolve(c);
        for (const auto& l : body.literals()) atoms.insert(l.atom);
    }
    return {atoms.begin(), atoms.end()};
}

std::optional<Countermodel> find_countermodel(const Formula& f, const ContextEnv& env,
                                              int max_worlds, std::uint64_t ceiling) {
    auto info = formula_info(f);
    EnumerationSpec spec{max_worlds, {info.agents.begin(), info.agents.end()},
                         relevant_atoms(f, env), ceiling};
    std::optional<Countermodel> found;
    enumerate_models(spec, [&](const KripkeModel& m) {
        Evaluator ev(m, env);
        WorldSet t = ev.truth_set(f);
        if (t == ev.all()) return true;
        for (int w = 0; w < ev.world_count(); ++w) {
            if (!((t >> w) & 1U)) {
                found = Countermodel{m, m.worlds[w]};
                return false;
            }
        }
        return true;
    });
    return found;
}

// ---------------------------------------------------------------- DOT

std::string to_dot(const KripkeModel& m, const std::string& highlight) {
    std::ostringstream os;
    os << "graph kripke {\n  node [shape=box];\n";
    for (const auto& w : m.worlds) {
        std::string label = w;
        std::string atoms;
        for (const auto& [atom, ws] : m.valuation)
            if (std::find(ws.begin(), ws.end(), w) != ws.end())
                atoms += (atoms.empty() ? "" : ", ") + atom;
        label += "\\n{" + atoms + "}";
        os << "  \"" << w << "\" [label=\"" << label << "\"";
        if (w == highlight) os << ", penwidth=2";
        os << "];\n";
    }
    for (const auto& [agent, classes] : m.relations)
        for (const auto& cls : classes)
            for (std::size_t a = 0; a < cls.size(); ++a)
                for (std::size_t b = a + 1; b < cls.size(); ++b)
                    os << "  \"" << cls[a] << "\" -- \"" << cls[b] << "\" [label=\"" << agent
                       << "\"];\n";
    os << "}\n";
    return os.str();
}

}  // namespace cel
