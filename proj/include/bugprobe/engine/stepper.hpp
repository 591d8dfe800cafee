#pragma once

#include <utility>
#include <vector>

#include "bugprobe/engine/game_spec.hpp"
#include "bugprobe/engine/game_state.hpp"

namespace bugprobe::engine {

// Deterministic transition. Movement resolves against the interaction list
// (first match per actor/actee/trigger), `use` attacks the faced cell, then
// terminations are checked. Throws SteppedTerminalState when not running.
std::pair<GameState, std::vector<InteractionEvent>> step(
    const GameState& state, Action action, const GameSpec& spec);

// In-place form used by search; `events` is cleared first.
void step_in_place(GameState& state, Action action, const GameSpec& spec,
                   std::vector<InteractionEvent>& events);

// All six actions while running, none once the game has ended.
std::vector<Action> legal_actions(const GameState& state);

}  // namespace bugprobe::engine
