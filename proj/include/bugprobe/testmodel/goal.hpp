#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bugprobe/engine/game_spec.hpp"
#include "bugprobe/engine/level.hpp"
#include "bugprobe/testmodel/test_state.hpp"

namespace bugprobe::testmodel {

// Criterion c as an exact fraction in (0, 1].
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

// Accepts "1", "1/2", "0.25". Throws InvalidSpec outside (0, 1].
Rational parse_rational(std::string_view text);
std::string to_text(const Rational& r);

// ACTOR/ACTEE/EFFECT[/each]. `*` is a wildcard, `empty` names an empty cell,
// and the effect token `use` matches every use-triggered interaction.
struct Matcher {
  std::optional<ClassId> actor;
  std::optional<ClassId> actee;
  std::optional<Effect> effect;
  bool any_use = false;
  bool per_instance = false;

  bool matches(const InteractionKey& k) const {
    if (actor && *actor != k.actor) return false;
    if (actee && *actee != k.actee) return false;
    if (any_use) return k.trigger == Trigger::Use;
    return !effect || *effect == k.effect;
  }
  bool operator==(const Matcher&) const = default;
};

Matcher parse_matcher(std::string_view text, const engine::GameSpec& spec);
std::string to_text(const Matcher& m, const engine::GameSpec& spec);

struct Feature {
  Matcher matcher;
  double weight = 1.0;
  Rational criterion;
  bool operator==(const Feature&) const = default;
};

struct TestGoal {
  std::vector<Feature> features;
  double dampening = 0.1;
  bool operator==(const TestGoal&) const = default;
};

struct GoalSequence {
  std::string name;
  std::vector<TestGoal> goals;
  std::size_t active_index = 0;
  double criteria_threshold = 0.01;    // c_T: raw fulfillment below this is 0
  double completion_threshold = 1.0;   // a goal advances at f >= this
  double goal_reward = 10.0;           // w_h
  double unknown_feature_weight = -1.0;
  bool weighted_fulfillment = false;   // weight-averaged instead of plain mean

  bool done() const { return active_index >= goals.size(); }
  bool operator==(const GoalSequence&) const = default;
};

// Goal file: blocks of
//   sequence NAME
//   goal [DAMPENING]
//     feature MATCHER WEIGHT CRITERION
//   end
// Throws SyntaxError, UndeclaredClass, InvalidSpec.
std::vector<GoalSequence> parse_goal_file(std::string_view text,
                                          const engine::GameSpec& spec);
std::string to_text(const std::vector<GoalSequence>& seqs,
                    const engine::GameSpec& spec);

}  // namespace bugprobe::testmodel
