#pragma once

#include <cstdint>

#include "bugprobe/engine/game_state.hpp"
#include "bugprobe/testmodel/test_state.hpp"

namespace bugprobe::engine {

inline constexpr std::uint64_t kStateKeySeed = 0x6a09e667f3bcc908ULL;

// Seeded 64-bit hash over the canonical form of (state, test, goal). Instance
// ids are excluded, so equal configurations reached by different action orders
// in the same number of steps share a key. The tick is included, which keeps
// the transposition graph acyclic. Stable across runs and platforms.
std::uint64_t state_key(const GameState& state,
                        const testmodel::TestState& test, int goal_index,
                        std::uint64_t seed = kStateKeySeed);

// Key over the game state alone, tick and ids excluded.
std::uint64_t game_state_key(const GameState& state,
                             std::uint64_t seed = kStateKeySeed);

}  // namespace bugprobe::engine
