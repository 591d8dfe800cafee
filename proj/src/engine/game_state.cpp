#include "bugprobe/engine/game_state.hpp"

#include <algorithm>

namespace bugprobe::engine {

namespace {
constexpr std::array<std::string_view, kActionCount> kActionNames = {
    "up", "down", "left", "right", "use", "nil"};
}

std::string_view action_name(Action a) {
  return kActionNames[static_cast<std::size_t>(a)];
}

std::optional<Action> parse_action(std::string_view name) {
  for (std::size_t i = 0; i < kActionNames.size(); ++i) {
    if (kActionNames[i] == name) return static_cast<Action>(i);
  }
  return std::nullopt;
}

bool GameState::carrying(ClassId item) const {
  return std::binary_search(inventory.begin(), inventory.end(), item);
}

int GameState::avatar_index(const GameSpec& spec) const {
  for (std::size_t i = 0; i < sprites.size(); ++i) {
    if (sprites[i].cls == spec.avatar()) return static_cast<int>(i);
  }
  return -1;
}

std::size_t GameState::count(ClassId cls) const {
  return static_cast<std::size_t>(
      std::count_if(sprites.begin(), sprites.end(),
                    [cls](const SpriteInstance& s) { return s.cls == cls; }));
}

GameState initial_state(const LevelMap& level, const GameSpec& spec) {
  GameState state;
  state.width = static_cast<std::int16_t>(level.width);
  state.height = static_cast<std::int16_t>(level.height);
  std::uint32_t next_id = 0;
  for (int y = 0; y < level.height; ++y) {
    for (int x = 0; x < level.width; ++x) {
      const char ch = level.at(x, y);
      if (ch == '.') continue;
      for (ClassId c : spec.level_mapping().at(ch)) {
        state.sprites.push_back(
            {next_id++, c,
             Cell{static_cast<std::int16_t>(x), static_cast<std::int16_t>(y)}});
      }
    }
  }
  return state;
}

std::uint32_t episode_cap(const LevelMap& level) {
  return 10u * static_cast<std::uint32_t>(level.width) *
         static_cast<std::uint32_t>(level.height);
}

std::string describe(const GameSpec& spec, const InteractionEvent& e) {
  std::string out = "t=" + std::to_string(e.tick) + ' ';
  out += spec.class_name(e.actor);
  out += '>';
  out += spec.class_name(e.actee);
  out += ' ';
  if (e.trigger == Trigger::Use) out += "use:";
  out += effect_name(e.effect);
  if (e.cell != kNoCell) {
    out += " @(" + std::to_string(e.cell.x) + ',' + std::to_string(e.cell.y) + ')';
  }
  if (e.has_witness()) out += " [" + e.bug_witness + ']';
  return out;
}

}  // namespace bugprobe::engine
