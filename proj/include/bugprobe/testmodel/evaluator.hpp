#pragma once

#include <span>
#include <vector>

#include "bugprobe/engine/level.hpp"
#include "bugprobe/testmodel/goal.hpp"
#include "bugprobe/testmodel/test_state.hpp"

namespace bugprobe::testmodel {

// Instances N_i a feature ranges over on `level`: sprites of the actee class
// (empty cells for `empty`) when per-instance, otherwise 1.
std::int64_t feature_instances(const Feature& f, const engine::LevelMap& level,
                               const engine::GameSpec& spec);

// ceil(c * N), at least 1.
std::int64_t feature_target(const Feature& f, std::int64_t instances);

// min(1, distinct satisfied instances / target).
double feature_progress(const TestState& test, const Feature& f,
                        std::int64_t target);

// Mean per-feature progress, or 0 below the criteria threshold c_T.
double fulfillment(const TestState& test, const TestGoal& goal,
                   const GoalSequence& seq, const engine::LevelMap& level,
                   const engine::GameSpec& spec);

// KBE reward for one step. `prev` is the test state before the step.
// A feature scores at most once per step, and only for an interaction not
// already recorded under the active goal; non-move interactions matching no
// feature cost unknown_feature_weight each.
double eval_kbe(const TestState& prev, std::span<const InteractionEvent> events,
                const TestGoal& goal, const GoalSequence& seq,
                const engine::LevelMap& level, const engine::GameSpec& spec);

// Advances at most one goal. Throws SequenceExhausted when already done.
void advance_goal(GoalSequence& seq, TestState& test,
                  const engine::LevelMap& level, const engine::GameSpec& spec);

// Moves into empty cells carry no reward or penalty.
inline bool is_neutral(const InteractionKey& k) {
  return k.effect == Effect::Move;
}

// Per-level cache of feature targets for the hot loop in search. Must not
// outlive the sequence, level and spec it was built from.
class GoalEvaluator {
 public:
  GoalEvaluator(const GoalSequence& seq, const engine::LevelMap& level,
                const engine::GameSpec& spec);

  const GoalSequence& sequence() const { return seq_; }
  std::size_t goal_count() const { return seq_.goals.size(); }

  double fulfillment(const TestState& test, std::size_t goal) const;
  // Records `events` into `test` and returns the step reward for `goal`.
  double step_reward(TestState& test, std::span<const InteractionEvent> events,
                     std::size_t goal) const;
  // Advances `goal` by at most one when complete, resetting the per-goal set.
  bool try_advance(TestState& test, std::size_t& goal) const;

 private:
  double raw_fulfillment(const TestState& test, std::size_t goal) const;

  const GoalSequence& seq_;
  std::vector<std::vector<std::int64_t>> targets_;
};

}  // namespace bugprobe::testmodel
