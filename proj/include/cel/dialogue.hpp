// Dialogical games for multi-agent S5 with context relativization: labelled
// worlds, particle and structural rules, strategy search and transcripts.

#ifndef CEL_DIALOGUE_HPP
#define CEL_DIALOGUE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cel/kripke.hpp"
#include "cel/syntax.hpp"

namespace cel {

enum class Player : std::uint8_t { P, O };

inline Player other(Player p) { return p == Player::P ? Player::O : Player::P; }
std::string_view to_string(Player p);

/// Fitting-style world name: "1" followed by (agent, index) steps, e.g. 1i1j2.
/// Agent names inside labels must not end in a digit.
class WorldLabel {
public:
    WorldLabel() = default;
    static WorldLabel root() { return {}; }
    static WorldLabel parse(std::string_view text);

    WorldLabel child(std::string agent, int index) const;
    const std::vector<std::pair<std::string, int>>& steps() const { return steps_; }
    bool is_root() const { return steps_.empty(); }
    WorldLabel parent() const;

    /// Steps counted with consecutive same-agent steps merged: 1i1i1 has
    /// rank 1, 1i1j1 rank 2.
    int rank() const;
    /// Representative of this label's cluster for `agent`: trailing steps by
    /// that agent are stripped.
    WorldLabel cluster_root(const std::string& agent) const;
    bool same_cluster(const WorldLabel& other, const std::string& agent) const {
        return cluster_root(agent) == other.cluster_root(agent);
    }

    std::string str() const;

    friend auto operator<=>(const WorldLabel&, const WorldLabel&) = default;
    friend bool operator==(const WorldLabel&, const WorldLabel&) = default;

private:
    std::vector<std::pair<std::string, int>> steps_;
};

/// w: phi. Contexts are asserted as formulas of kind Ctx.
struct Assertion {
    WorldLabel label;
    Formula formula;
    friend bool operator==(const Assertion&, const Assertion&) = default;
};

/// Non-assertive attacks: ? (disjunction), ?L, ?R, ?K{j}/u and ?P{j}.
struct Request {
    enum class Kind : std::uint8_t { Which, Left, Right, Know, Poss };
    Kind kind;
    WorldLabel label;
    std::string agent;   // Know, Poss
    WorldLabel chosen;   // Know
    friend bool operator==(const Request&, const Request&) = default;
};

using Payload = std::variant<Assertion, Request>;

std::string render_payload(const Payload& p);
/// "1i1: K{i,1.1} a", "1: ?L", "1: ?K{i}/1i1", "1: ?P{j}", "1: @ci".
Payload parse_payload(std::string_view text);

enum class MoveKind : std::uint8_t { Start, Attack, Defend };

/// `target` is the index of the attacked move (Attack) or of the attack
/// being answered (Defend); -1 for the starting move.
struct Move {
    Player actor = Player::P;
    MoveKind kind = MoveKind::Start;
    int target = -1;
    Payload payload;
    friend bool operator==(const Move&, const Move&) = default;
};

struct GameOptions {
    ContextEnv env;
    /// O may open worlds up to rank modal_depth(thesis) + rank_slack.
    int rank_slack = 1;
};

class IllegalMove : public std::runtime_error {
public:
    IllegalMove(std::string rule, const std::string& what)
        : std::runtime_error(rule + ": " + what), rule_(std::move(rule)) {}
    const std::string& rule() const { return rule_; }

private:
    std::string rule_;
};

namespace detail {
struct Arena;
struct Position;
}  // namespace detail

/// Immutable play position. Copies share the interning tables of the game
/// they came from.
class GameState {
public:
    const Formula& thesis() const;
    const GameOptions& options() const;
    const std::vector<Move>& history() const { return history_; }
    Player turn() const;
    /// Labels mentioned so far, in order of introduction.
    std::vector<WorldLabel> introduced_labels() const;

private:
    friend GameState initial_state(const Formula&, GameOptions);
    friend std::vector<Move> legal_moves(const GameState&);
    friend GameState apply_move(const GameState&, const Move&);
    friend std::optional<Player> winner(const GameState&);
    friend class Strategy;
    friend struct SearchAccess;

    std::shared_ptr<detail::Arena> arena_;
    std::shared_ptr<const detail::Position> pos_;
    std::vector<Move> history_;
};

GameState initial_state(const Formula& thesis, GameOptions opts = {});
std::vector<Move> legal_moves(const GameState& s);
/// Throws IllegalMove naming the violated rule: PL-0 (turns, start), PL-1
/// (play over), PL-2 (repeats), PL-3 (atoms), PL-4c (own move), ML-frw and
/// ML-frc (worlds and contexts P may use), ML-S5 (world outside the
/// cluster), fresh-world, particle, repetition, rank.
GameState apply_move(const GameState& s, const Move& m);
/// The winner once the player to move is stuck, or once O has committed to
/// inconsistent literals.
std::optional<Player> winner(const GameState& s);

/// Structural invariants of a play; empty iff it conforms.
std::vector<std::string> check_invariants(const GameState& s);

/// P's choices in every position reachable under the strategy.
class Strategy {
public:
    std::optional<Move> response(const GameState& s) const;
    std::size_t size() const;

    struct Impl;

private:
    friend struct SearchAccess;
    std::shared_ptr<const Impl> impl_;
};

struct SearchResult {
    enum class Status { ProponentWins, OpponentWins, BudgetExhausted };
    Status status;
    std::optional<Strategy> strategy;   // ProponentWins
    std::vector<Move> refuting_play;    // OpponentWins: a complete play O wins
    std::uint64_t nodes = 0;
};

inline constexpr std::uint64_t default_search_budget = 2'000'000;

SearchResult has_winning_strategy(const Formula& thesis, GameOptions opts = {},
                                  std::uint64_t budget = default_search_budget);

/// Replays `moves` from the initial state; throws IllegalMove with the move
/// number prefixed.
GameState replay(const Formula& thesis, const std::vector<Move>& moves, GameOptions opts = {});

enum class TranscriptFormat { Text, Markdown };

/// Two-column O/P table: one row per attack, with the answering defence on
/// the same row, followed by the winner line when the play is over.
std::string render_transcript(const GameState& s, TranscriptFormat fmt = TranscriptFormat::Text);

}  // namespace cel

#endif  // CEL_DIALOGUE_HPP
