#include "cel/serialize.hpp"

#include <fstream>
#include <optional>
#include <sstream>

namespace cel {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object()) throw FormatError("expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw FormatError(std::string("missing field \"") + key + "\"");
    return *it;
}

std::string text(const Json& j, const std::string& what) {
    if (!j.is_string()) throw FormatError(what + " must be a string");
    return j.get<std::string>();
}

std::vector<std::string> strings(const Json& j, const std::string& what) {
    if (!j.is_array()) throw FormatError(what + " must be an array");
    std::vector<std::string> out;
    for (const auto& e : j) out.push_back(text(e, what + " entry"));
    return out;
}

Formula formula(const Json& j, const std::string& what) {
    try {
        return parse_formula(text(j, what));
    } catch (const SyntaxError& e) {
        throw FormatError(what + ": " + e.what());
    }
}

}  // namespace

Json model_to_json(const KripkeModel& m) {
    Json j;
    j["worlds"] = m.worlds;
    j["agents"] = Json::object();
    for (const auto& [agent, classes] : m.relations) j["agents"][agent] = classes;
    j["valuation"] = Json::object();
    for (const auto& [atom, ws] : m.valuation) j["valuation"][atom] = ws;
    return j;
}

KripkeModel model_from_json(const Json& j) {
    KripkeModel m;
    m.worlds = strings(field(j, "worlds"), "worlds");
    const Json& agents = field(j, "agents");
    if (!agents.is_object()) throw FormatError("agents must be an object");
    for (const auto& [agent, classes] : agents.items()) {
        if (!classes.is_array()) throw FormatError("classes of " + agent + " must be an array");
        auto& out = m.relations[agent];
        for (const auto& c : classes) out.push_back(strings(c, "class of " + agent));
    }
    if (auto it = j.find("valuation"); it != j.end()) {
        if (!it->is_object()) throw FormatError("valuation must be an object");
        for (const auto& [atom, ws] : it->items()) m.valuation[atom] = strings(ws, "valuation of " + atom);
    }
    auto problems = check_model(m);
    if (!problems.empty()) throw FormatError("invalid model: " + problems.front());
    return m;
}

Json env_to_json(const ContextEnv& env) {
    Json j = Json::object();
    for (const auto& [name, body] : env.bindings()) j[name] = render_context(body);
    return j;
}

ContextEnv env_from_json(const Json& j) {
    if (!j.is_object()) throw FormatError("context environment must be an object");
    ContextEnv env;
    for (const auto& [name, body] : j.items()) {
        try {
            env.bind(name, parse_context(text(body, "context " + name)));
        } catch (const SyntaxError& e) {
            throw FormatError("context " + name + ": " + e.what());
        }
    }
    return env;
}

Json trace_to_json(const ReductionTrace& t) {
    Json j = Json::array();
    for (const auto& s : t.steps)
        j.push_back({{"before", render_formula(s.before)},
                     {"axiom", s.axiom},
                     {"path", s.path},
                     {"after", render_formula(s.after)}});
    return j;
}

std::vector<ReductionStep> trace_from_json(const Json& j) {
    if (!j.is_array()) throw FormatError("trace must be an array");
    std::vector<ReductionStep> out;
    for (const auto& s : j) {
        const Json& path = field(s, "path");
        if (!path.is_array()) throw FormatError("path must be an array of child indices");
        Path p;
        for (const auto& k : path) {
            if (!k.is_number_integer()) throw FormatError("path entries must be integers");
            p.push_back(k.get<int>());
        }
        out.push_back({formula(field(s, "before"), "before"), text(field(s, "axiom"), "axiom"),
                       std::move(p), formula(field(s, "after"), "after")});
    }
    return out;
}

Json tableau_to_json(const TableauNode& t) {
    Json j;
    j["steps"] = t.steps;
    if (!t.closure.empty()) j["closure"] = t.closure;
    if (!t.children.empty()) {
        j["children"] = Json::array();
        for (const auto& c : t.children) j["children"].push_back(tableau_to_json(c));
    }
    return j;
}

TableauNode tableau_from_json(const Json& j) {
    TableauNode t;
    t.steps = strings(field(j, "steps"), "steps");
    if (auto it = j.find("closure"); it != j.end()) t.closure = text(*it, "closure");
    if (auto it = j.find("children"); it != j.end()) {
        if (!it->is_array()) throw FormatError("children must be an array");
        for (const auto& c : *it) t.children.push_back(tableau_from_json(c));
    }
    return t;
}

Json verdict_to_json(const Verdict& v) {
    if (const auto* ok = std::get_if<Valid>(&v))
        return {{"verdict", "valid"}, {"proof", tableau_to_json(ok->proof)}};
    const auto& bad = std::get<Invalid>(v);
    return {{"verdict", "invalid"}, {"world", bad.world}, {"model", model_to_json(bad.model)}};
}

Verdict verdict_from_json(const Json& j) {
    const std::string v = text(field(j, "verdict"), "verdict");
    if (v == "valid") return Valid{tableau_from_json(field(j, "proof"))};
    if (v == "invalid")
        return Invalid{model_from_json(field(j, "model")), text(field(j, "world"), "world")};
    throw FormatError("verdict must be \"valid\" or \"invalid\"");
}

Json moves_to_json(const std::vector<Move>& moves) {
    Json j = Json::array();
    for (const auto& m : moves) {
        const char* kind = m.kind == MoveKind::Start ? "start" : m.kind == MoveKind::Attack ? "attack" : "defend";
        j.push_back({{"actor", std::string(to_string(m.actor))},
                     {"kind", kind},
                     {"target", m.target},
                     {"payload", render_payload(m.payload)}});
    }
    return j;
}

std::vector<Move> moves_from_json(const Json& j) {
    if (!j.is_array()) throw FormatError("play script must be an array of moves");
    std::vector<Move> out;
    for (const auto& e : j) {
        const std::string n = "move " + std::to_string(out.size());
        const std::string actor = text(field(e, "actor"), n + " actor");
        if (actor != "P" && actor != "O") throw FormatError(n + ": actor must be \"P\" or \"O\"");
        const std::string kind = text(field(e, "kind"), n + " kind");
        MoveKind mk;
        if (kind == "start") mk = MoveKind::Start;
        else if (kind == "attack") mk = MoveKind::Attack;
        else if (kind == "defend" || kind == "defence" || kind == "defense") mk = MoveKind::Defend;
        else throw FormatError(n + ": kind must be start, attack or defend");
        int target = -1;
        if (auto it = e.find("target"); it != e.end() && !it->is_null()) {
            if (!it->is_number_integer()) throw FormatError(n + ": target must be an integer");
            target = it->get<int>();
        }
        std::optional<Payload> payload;
        try {
            payload = parse_payload(text(field(e, "payload"), n + " payload"));
        } catch (const SyntaxError& err) {
            throw FormatError(n + " payload: " + err.what());
        } catch (const std::invalid_argument& err) {
            throw FormatError(n + " payload: " + err.what());
        }
        Move m{actor == "P" ? Player::P : Player::O, mk, target, std::move(*payload)};
        out.push_back(std::move(m));
    }
    return out;
}

PlayScript play_script_from_json(const Json& j) {
    if (j.is_array()) return {std::nullopt, std::nullopt, moves_from_json(j)};
    PlayScript p;
    p.moves = moves_from_json(field(j, "moves"));
    if (auto it = j.find("thesis"); it != j.end()) p.thesis = text(*it, "thesis");
    if (auto it = j.find("winner"); it != j.end()) {
        const std::string w = text(*it, "winner");
        if (w != "P" && w != "O") throw FormatError("winner must be \"P\" or \"O\"");
        p.winner = w == "P" ? Player::P : Player::O;
    }
    return p;
}

Json play_script_to_json(const PlayScript& p) {
    Json j = Json::object();
    if (p.thesis) j["thesis"] = *p.thesis;
    if (p.winner) j["winner"] = std::string(to_string(*p.winner));
    j["moves"] = moves_to_json(p.moves);
    return j;
}

Json info_to_json(const FormulaInfo& info) {
    return {{"atoms", info.atoms},
            {"agents", info.agents},
            {"contexts", info.contexts},
            {"modalDepth", info.modal_depth},
            {"isEL", info.is_el},
            {"isAbsolute", info.is_absolute}};
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace cel
