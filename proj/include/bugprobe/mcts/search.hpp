#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bugprobe/engine/game_spec.hpp"
#include "bugprobe/engine/game_state.hpp"
#include "bugprobe/engine/level.hpp"
#include "bugprobe/mcts/config.hpp"
#include "bugprobe/mcts/stats.hpp"
#include "bugprobe/rng.hpp"
#include "bugprobe/testmodel/evaluator.hpp"

namespace bugprobe::mcts {

// Everything a simulated step depends on.
struct SimState {
  engine::GameState game;
  testmodel::TestState test;
  std::size_t goal = 0;
};

// Immutable inputs shared by every step of a search.
struct Context {
  const engine::GameSpec& spec;
  const engine::LevelMap& level;
  const testmodel::GoalEvaluator& evaluator;
  std::uint32_t cap;  // episode step cap

  Context(const engine::GameSpec& s, const engine::LevelMap& l,
          const testmodel::GoalEvaluator& e)
      : spec(s), level(l), evaluator(e), cap(engine::episode_cap(l)) {}
};

bool is_terminal(const SimState& s, const Context& ctx);
std::uint64_t key_of(const SimState& s);

// Steps the game, records the interactions, scores them with KBE and
// advances the goal. Requires a non-terminal state.
double sim_step(SimState& s, engine::Action a, const Context& ctx,
                std::vector<engine::InteractionEvent>& events);

// Discounted KBE return of up to cfg.rollout_depth steps from `s`.
double rollout(SimState s, const Context& ctx, const MctsConfig& cfg, Rng& rng);

inline constexpr std::int32_t kNone = -1;

struct SearchNode {
  std::uint64_t key = 0;
  std::array<std::int32_t, engine::kActionCount> children{kNone, kNone, kNone,
                                                          kNone, kNone, kNone};
  std::uint8_t untried = 0;  // bit per action
  bool terminal = false;
  double edge_reward = 0;    // KBE reward of the step into this node
  std::uint64_t visits = 0;  // iterations through this node, not shared
  std::int32_t prev = kNone; // matching node of the previous tree
  SimState state;
};

class SearchTree {
 public:
  std::vector<SearchNode> nodes;
  TranspositionTable tt;
  std::int32_t root = kNone;
  ScoreBounds bounds;

  const SearchNode& root_node() const { return nodes[static_cast<std::size_t>(root)]; }
  const StatEntry& stats(const SearchNode& n) const { return tt.at(n.key); }
  // Node reached from the root by `path`, if it was expanded.
  std::optional<std::int32_t> find(std::span<const engine::Action> path) const;
  // Re-roots at the child for `a`; the tree becomes empty when there is none.
  void advance(engine::Action a);
  bool empty() const { return root == kNone; }
};

// Flattened statistics of the previous tree's node at `path`, if present.
std::optional<StatEntry> fast_expansion_transfer(const SearchTree& prev,
                                                 std::span<const engine::Action> path);

struct TransferRecord {
  std::uint64_t key = 0;
  StatEntry previous;
  StatEntry transferred;
};

struct SearchStats {
  std::uint64_t iterations = 0;
  double elapsed_ms = 0;
  double max_iteration_ms = 0;
  std::vector<TransferRecord> transfers;
};

struct SearchResult {
  engine::Action action = engine::Action::Nil;
  SearchTree tree;
  SearchStats stats;
};

// Throws NoLegalActions when `root` is terminal.
SearchResult search(const SimState& root, const Context& ctx, const MctsConfig& cfg,
                    const SearchTree* prev, Rng& rng);

}  // namespace bugprobe::mcts
