#include "bugprobe/engine/state_key.hpp"

#include <algorithm>

#include "bugprobe/hash.hpp"

namespace bugprobe::engine {

namespace {

std::uint64_t pack(const SpriteInstance& s) {
  return (std::uint64_t{s.cls} << 32) |
         (std::uint64_t{static_cast<std::uint16_t>(s.cell.x)} << 16) |
         static_cast<std::uint16_t>(s.cell.y);
}

void add_game_state(Hasher& h, const GameState& state) {
  // Packed words sort by (cls, x, y), which is the canonical sprite order.
  std::uint64_t buf[64];
  std::vector<std::uint64_t> heap;
  std::uint64_t* words = buf;
  const std::size_t n = state.sprites.size();
  if (n > std::size(buf)) {
    heap.resize(n);
    words = heap.data();
  }
  for (std::size_t i = 0; i < n; ++i) words[i] = pack(state.sprites[i]);
  std::sort(words, words + n);
  h.add(n);
  for (std::size_t i = 0; i < n; ++i) h.add(words[i]);
  h.add((static_cast<std::uint64_t>(state.orientation) << 8) |
        static_cast<std::uint64_t>(state.status));
  h.add(state.inventory.size());
  for (ClassId c : state.inventory) h.add(c);
}

}  // namespace

std::uint64_t game_state_key(const GameState& state, std::uint64_t seed) {
  Hasher h(seed);
  add_game_state(h, state);
  return h.value();
}

std::uint64_t state_key(const GameState& state, const testmodel::TestState& test,
                        int goal_index, std::uint64_t seed) {
  Hasher h(seed);
  add_game_state(h, state);
  h.add(state.tick);
  h.add(test.goal_hash());
  h.add(test.goal_distinct().size());
  h.add(static_cast<std::uint64_t>(static_cast<std::int64_t>(goal_index)));
  return h.value();
}

}  // namespace bugprobe::engine
