#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "bugprobe/mcts/config.hpp"

namespace bugprobe::mcts {

struct StatEntry {
  std::uint64_t n = 0;
  double total = 0;
  double max = -std::numeric_limits<double>::infinity();
  double sumsq = 0;
  std::uint64_t key = 0;

  double mean() const { return n == 0 ? 0.0 : total / static_cast<double>(n); }
  bool operator==(const StatEntry&) const = default;
};

// One entry per state key; search nodes refer to entries by key only.
using TranspositionTable = std::unordered_map<std::uint64_t, StatEntry>;

// Running range of scores seen by one search; the identity range [0, 1]
// leaves scores unscaled.
struct ScoreBounds {
  double lo = 0;
  double hi = 1;
  bool seen = false;

  void observe(double x);
  double scale(double x) const;
};

// UCB1 with the optional MixMax blend and SP-UCT term. Requires n_i > 0
// and parent_visits > 0.
double uct_value(const StatEntry& entry, std::uint64_t parent_visits,
                 const MctsConfig& cfg, const ScoreBounds& bounds = {});

// Softmax of beta * v with max subtraction.
std::vector<double> boltzmann_probabilities(std::span<const double> values,
                                            double beta);

// Adds `score` once per occurrence of each key in `path`.
void backpropagate(std::span<const std::uint64_t> path, double score,
                   TranspositionTable& tt);

// Average kept, visits reset to one.
StatEntry flatten(const StatEntry& e);

}  // namespace bugprobe::mcts
