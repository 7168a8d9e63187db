// JSON forms of models, context environments, reduction traces, verdicts and
// play scripts. Formulas travel as their rendered strings.

#ifndef CEL_SERIALIZE_HPP
#define CEL_SERIALIZE_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cel/dialogue.hpp"
#include "cel/kripke.hpp"
#include "cel/prove.hpp"
#include "cel/reduce.hpp"
#include "cel/syntax.hpp"

namespace cel {

using Json = nlohmann::ordered_json;

/// Malformed or ill-typed JSON input; the message names the offending field.
class FormatError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// {"worlds":["w1"],"agents":{"i":[["w1"]]},"valuation":{"p":["w1"]}}
Json model_to_json(const KripkeModel& m);
KripkeModel model_from_json(const Json& j);

/// {"ci":"p & ~q","cscep":"true"}; unbound names keep the fresh-atom policy.
Json env_to_json(const ContextEnv& env);
ContextEnv env_from_json(const Json& j);

/// [{"before":..,"axiom":..,"path":[0,1],"after":..}, ...]
Json trace_to_json(const ReductionTrace& t);
std::vector<ReductionStep> trace_from_json(const Json& j);

Json tableau_to_json(const TableauNode& t);
TableauNode tableau_from_json(const Json& j);

/// {"verdict":"valid","proof":{..}} or
/// {"verdict":"invalid","world":"w1","model":{..}}
Json verdict_to_json(const Verdict& v);
Verdict verdict_from_json(const Json& j);

/// [{"actor":"P","kind":"start","target":-1,"payload":"1: K{i,1.1} a"}, ...]
Json moves_to_json(const std::vector<Move>& moves);
std::vector<Move> moves_from_json(const Json& j);

/// A recorded play: either a bare move array or
/// {"thesis":"..","winner":"P","moves":[..]} with thesis and winner optional.
struct PlayScript {
    std::optional<std::string> thesis;
    std::optional<Player> winner;
    std::vector<Move> moves;
};

PlayScript play_script_from_json(const Json& j);
Json play_script_to_json(const PlayScript& p);

Json info_to_json(const FormulaInfo& info);

/// Reads a whole file into JSON; FormatError on I/O or parse failure.
Json load_json_file(const std::string& path);

}  // namespace cel

#endif  // CEL_SERIALIZE_HPP
