#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "bugprobe/engine/game_spec.hpp"
#include "bugprobe/engine/game_state.hpp"
#include "bugprobe/engine/level.hpp"

namespace bugprobe::engine {

struct ExploreLimits {
  int max_depth = 0;
  std::size_t max_expansions = 5'000'000;
};

struct ExploreStats {
  std::size_t expanded = 0;
  std::size_t distinct = 0;
  int depth_reached = 0;
};

using TransitionVisitor =
    std::function<void(const GameState& from, Action action,
                       const std::vector<InteractionEvent>& events)>;

// Breadth-first enumeration of every transition reachable within
// min(max_depth, episode_cap) steps. States are deduplicated on everything
// except the tick; events depend only on (state, action), so each distinct
// transition is visited exactly once at its shallowest depth.
// Throws BudgetExceeded past max_expansions.
ExploreStats explore(const GameSpec& spec, const LevelMap& level,
                     const ExploreLimits& limits, const TransitionVisitor& visit);

}  // namespace bugprobe::engine
