#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bugprobe/engine/game_state.hpp"

namespace bugprobe::testmodel {

using engine::ClassId;
using engine::Effect;
using engine::InteractionEvent;
using engine::Trigger;

struct InteractionKey {
  ClassId actor = engine::kNoClass;
  ClassId actee = engine::kNoClass;
  Effect effect = Effect::Move;
  Trigger trigger = Trigger::Move;
  engine::Cell cell;

  bool operator==(const InteractionKey&) const = default;
  auto operator<=>(const InteractionKey&) const = default;
};

InteractionKey key_of(const InteractionEvent& e);
std::uint64_t hash_key(const InteractionKey& k);

// Executed interactions of one episode. `executed` keeps raw counts; the
// distinct set restarts with each goal and drives criterion progress.
class TestState {
 public:
  void record(const InteractionEvent& e);
  void record(std::span<const InteractionEvent> events) {
    for (const auto& e : events) record(e);
  }
  // Adds raw counts only; the per-goal set is untouched. Used for pooling.
  void add_count(const InteractionKey& k, std::uint32_t n);
  // Clears the per-goal distinct set; counts are kept.
  void begin_goal();

  std::uint32_t count(const InteractionKey& k) const;
  std::uint64_t total() const { return total_; }
  const std::vector<std::pair<InteractionKey, std::uint32_t>>& executed() const {
    return executed_;
  }
  // Sorted, distinct keys seen since the active goal started.
  const std::vector<InteractionKey>& goal_distinct() const { return goal_distinct_; }
  // Order-independent hash of goal_distinct().
  std::uint64_t goal_hash() const { return goal_hash_; }

  bool operator==(const TestState&) const = default;

 private:
  std::vector<std::pair<InteractionKey, std::uint32_t>> executed_;
  std::vector<InteractionKey> goal_distinct_;
  std::uint64_t goal_hash_ = 0;
  std::uint64_t total_ = 0;
};

TestState update_test_state(TestState test,
                            std::span<const InteractionEvent> events);

}  // namespace bugprobe::testmodel
