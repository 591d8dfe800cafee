#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bugprobe/engine/game_spec.hpp"
#include "bugprobe/engine/level.hpp"

namespace bugprobe::engine {

enum class Action : std::uint8_t { Up, Down, Left, Right, Use, Nil };

inline constexpr std::array<Action, 6> kAllActions = {
    Action::Up, Action::Down, Action::Left, Action::Right, Action::Use,
    Action::Nil};
inline constexpr std::size_t kActionCount = kAllActions.size();

std::string_view action_name(Action a);
std::optional<Action> parse_action(std::string_view name);

enum class Orientation : std::uint8_t { Up, Down, Left, Right };
enum class Status : std::uint8_t { Running, Win, Lose };

struct Cell {
  std::int16_t x = -1;
  std::int16_t y = -1;
  bool operator==(const Cell&) const = default;
  auto operator<=>(const Cell&) const = default;
};

inline constexpr Cell kNoCell{};

struct SpriteInstance {
  std::uint32_t id = 0;
  ClassId cls = kNoClass;
  Cell cell;
  bool operator==(const SpriteInstance&) const = default;
};

struct GameState {
  std::uint32_t tick = 0;
  std::vector<SpriteInstance> sprites;  // sorted by id
  Orientation orientation = Orientation::Down;
  std::vector<ClassId> inventory;  // sorted multiset
  Status status = Status::Running;
  std::int16_t width = 0;  // grid extent, fixed by the level
  std::int16_t height = 0;

  bool running() const { return status == Status::Running; }
  bool carrying(ClassId item) const;
  // Index into `sprites` of the avatar, or -1 when it has been destroyed.
  int avatar_index(const GameSpec& spec) const;
  std::size_t count(ClassId cls) const;

  bool operator==(const GameState&) const = default;
};

// One sprite-sprite (or avatar-cell) interaction produced by a step.
struct InteractionEvent {
  std::uint32_t tick = 0;
  ClassId actor = kNoClass;
  ClassId actee = kNoClass;
  Effect effect = Effect::Move;
  Trigger trigger = Trigger::Move;
  Cell cell;
  std::string bug_witness;  // empty when no mutation is implicated

  bool has_witness() const { return !bug_witness.empty(); }
  bool operator==(const InteractionEvent&) const = default;
};

GameState initial_state(const LevelMap& level, const GameSpec& spec);

// 10 x width x height.
std::uint32_t episode_cap(const LevelMap& level);

std::string describe(const GameSpec& spec, const InteractionEvent& e);

}  // namespace bugprobe::engine
