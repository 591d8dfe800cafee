#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bugprobe/engine/game_state.hpp"

namespace bugprobe::mcts {

struct Trajectory {
  std::string game_id;
  std::string level_id;
  std::string agent;
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;
  std::vector<engine::Action> actions;
  std::vector<std::vector<engine::InteractionEvent>> per_step_events;
  // Digest of per_step_events; the only event record a loaded file carries.
  std::uint64_t events_digest = 0;

  std::size_t length() const { return actions.size(); }
};

std::uint64_t digest_events(
    const std::vector<std::vector<engine::InteractionEvent>>& per_step);

// Versioned header, `---`, then one action per line. Round-trips everything
// except per_step_events, which replay regenerates and checks against the
// digest.
std::string to_text(const Trajectory& t);
// Throws SyntaxError.
Trajectory parse_trajectory(std::string_view text);

}  // namespace bugprobe::mcts
