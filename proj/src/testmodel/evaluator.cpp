#include "bugprobe/testmodel/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "bugprobe/error.hpp"

namespace bugprobe::testmodel {

std::int64_t feature_instances(const Feature& f, const engine::LevelMap& level,
                               const engine::GameSpec& spec) {
  if (!f.matcher.per_instance) return 1;
  const ClassId actee = *f.matcher.actee;
  std::int64_t n = 0;
  for (int y = 0; y < level.height; ++y) {
    for (int x = 0; x < level.width; ++x) {
      const char ch = level.at(x, y);
      if (ch == '.') {
        n += actee == engine::kNoClass ? 1 : 0;
        continue;
      }
      const auto& classes = spec.level_mapping().at(ch);
      if (actee == engine::kNoClass) {
        // The avatar's start cell is walkable floor once it moves away.
        n += std::all_of(classes.begin(), classes.end(),
                         [&](ClassId c) { return c == spec.avatar(); })
                 ? 1
                 : 0;
      } else {
        n += std::count(classes.begin(), classes.end(), actee);
      }
    }
  }
  return n;
}

std::int64_t feature_target(const Feature& f, std::int64_t instances) {
  const std::int64_t num = f.criterion.num * instances;
  const std::int64_t t = (num + f.criterion.den - 1) / f.criterion.den;
  return std::max<std::int64_t>(1, t);
}

double feature_progress(const TestState& test, const Feature& f,
                        std::int64_t target) {
  const auto& keys = test.goal_distinct();
  std::int64_t satisfied = 0;
  if (!f.matcher.per_instance) {
    satisfied = std::any_of(keys.begin(), keys.end(),
                            [&](const InteractionKey& k) { return f.matcher.matches(k); })
                    ? 1
                    : 0;
  } else {
    engine::Cell cells[32];
    std::vector<engine::Cell> overflow;
    std::size_t n = 0;
    for (const auto& k : keys) {
      if (!f.matcher.matches(k)) continue;
      if (n < std::size(cells)) {
        cells[n++] = k.cell;
      } else {
        overflow.push_back(k.cell);
      }
    }
    if (overflow.empty()) {
      std::sort(cells, cells + n);
      satisfied = std::unique(cells, cells + n) - cells;
    } else {
      overflow.insert(overflow.end(), cells, cells + n);
      std::sort(overflow.begin(), overflow.end());
      satisfied = std::unique(overflow.begin(), overflow.end()) - overflow.begin();
    }
  }
  return std::min(1.0, static_cast<double>(satisfied) / static_cast<double>(target));
}

namespace {

double aggregate(const TestGoal& goal, const GoalSequence& seq,
                 const std::vector<double>& progress) {
  if (goal.features.empty()) return 1.0;
  double sum = 0;
  double weights = 0;
  for (std::size_t i = 0; i < goal.features.size(); ++i) {
    const double w = seq.weighted_fulfillment ? std::abs(goal.features[i].weight) : 1.0;
    sum += w * progress[i];
    weights += w;
  }
  return weights > 0 ? sum / weights : 0.0;
}

double cutoff(double raw, const GoalSequence& seq) {
  return raw < seq.criteria_threshold ? 0.0 : raw;
}

// Shared by the free functions and the cached evaluator.
double kbe_reward(const TestGoal& goal, const GoalSequence& seq,
                  const std::vector<std::int64_t>& targets, TestState& test,
                  std::span<const InteractionEvent> events) {
  const std::size_t nf = goal.features.size();
  std::vector<double> before(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    before[i] = feature_progress(test, goal.features[i], targets[i]);
  }
  double feature_term = 0;
  std::vector<char> hit(nf, 0);
  std::vector<InteractionKey> unknown;
  for (const auto& e : events) {
    const InteractionKey k = key_of(e);
    const auto& seen = test.goal_distinct();
    const bool fresh = !std::binary_search(seen.begin(), seen.end(), k);
    bool matched = false;
    for (std::size_t i = 0; i < nf; ++i) {
      if (goal.features[i].matcher.matches(k)) {
        if (fresh) hit[i] = 1;
        matched = true;
      }
    }
    if (!matched && !is_neutral(k) &&
        std::find(unknown.begin(), unknown.end(), k) == unknown.end()) {
      unknown.push_back(k);
    }
  }
  for (std::size_t i = 0; i < nf; ++i) {
    if (!hit[i]) continue;
    const double w = goal.features[i].weight;
    feature_term += before[i] >= 1.0 ? w * goal.dampening : w;
  }
  test.record(events);
  std::vector<double> after(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    after[i] = feature_progress(test, goal.features[i], targets[i]);
  }
  const double f_before = cutoff(aggregate(goal, seq, before), seq);
  const double f_after = cutoff(aggregate(goal, seq, after), seq);
  return feature_term +
         static_cast<double>(unknown.size()) * seq.unknown_feature_weight +
         std::pow(seq.goal_reward, f_after) - std::pow(seq.goal_reward, f_before);
}

std::vector<std::int64_t> targets_for(const TestGoal& goal,
                                      const engine::LevelMap& level,
                                      const engine::GameSpec& spec) {
  std::vector<std::int64_t> t;
  t.reserve(goal.features.size());
  for (const auto& f : goal.features) {
    t.push_back(feature_target(f, feature_instances(f, level, spec)));
  }
  return t;
}

}  // namespace

double fulfillment(const TestState& test, const TestGoal& goal,
                   const GoalSequence& seq, const engine::LevelMap& level,
                   const engine::GameSpec& spec) {
  const auto targets = targets_for(goal, level, spec);
  std::vector<double> progress(goal.features.size());
  for (std::size_t i = 0; i < goal.features.size(); ++i) {
    progress[i] = feature_progress(test, goal.features[i], targets[i]);
  }
  return cutoff(aggregate(goal, seq, progress), seq);
}

double eval_kbe(const TestState& prev, std::span<const InteractionEvent> events,
                const TestGoal& goal, const GoalSequence& seq,
                const engine::LevelMap& level, const engine::GameSpec& spec) {
  TestState test = prev;
  return kbe_reward(goal, seq, targets_for(goal, level, spec), test, events);
}

void advance_goal(GoalSequence& seq, TestState& test,
                  const engine::LevelMap& level, const engine::GameSpec& spec) {
  if (seq.done()) {
    throw SequenceExhausted("goal sequence '" + seq.name + "' is already complete");
  }
  const TestGoal& goal = seq.goals[seq.active_index];
  if (fulfillment(test, goal, seq, level, spec) >= seq.completion_threshold) {
    ++seq.active_index;
    test.begin_goal();
  }
}

GoalEvaluator::GoalEvaluator(const GoalSequence& seq,
                             const engine::LevelMap& level,
                             const engine::GameSpec& spec)
    : seq_(seq) {
  for (const auto& g : seq.goals) targets_.push_back(targets_for(g, level, spec));
}

double GoalEvaluator::raw_fulfillment(const TestState& test,
                                      std::size_t goal) const {
  const TestGoal& g = seq_.goals[goal];
  std::vector<double> progress(g.features.size());
  for (std::size_t i = 0; i < g.features.size(); ++i) {
    progress[i] = feature_progress(test, g.features[i], targets_[goal][i]);
  }
  return aggregate(g, seq_, progress);
}

double GoalEvaluator::fulfillment(const TestState& test, std::size_t goal) const {
  return cutoff(raw_fulfillment(test, goal), seq_);
}

double GoalEvaluator::step_reward(TestState& test,
                                  std::span<const InteractionEvent> events,
                                  std::size_t goal) const {
  if (goal >= seq_.goals.size()) {
    test.record(events);
    return 0.0;
  }
  return kbe_reward(seq_.goals[goal], seq_, targets_[goal], test, events);
}

bool GoalEvaluator::try_advance(TestState& test, std::size_t& goal) const {
  if (goal >= seq_.goals.size()) return false;
  if (fulfillment(test, goal) < seq_.completion_threshold) return false;
  ++goal;
  test.begin_goal();
  return true;
}

}  // namespace bugprobe::testmodel
