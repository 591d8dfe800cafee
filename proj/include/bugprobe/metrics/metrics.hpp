#pragma once

#include <span>
#include <vector>

#include "bugprobe/mcts/trajectory.hpp"
#include "bugprobe/testmodel/test_state.hpp"

namespace bugprobe::metrics {

struct Interval {
  double low = 0;
  double high = 0;
  double mid() const { return 0.5 * (low + high); }
  bool operator==(const Interval&) const = default;
};

// mean +- t(0.975, n-1) * s / sqrt(n). Throws TooFewSamples below 2 samples.
Interval ci95(std::span<const double> samples);

double mean(std::span<const double> samples);

inline constexpr double kCrossEntropyEpsilon = 1e-6;

// -sum p_ref ln p_cand over interaction types (cell dropped), both smoothed
// by epsilon over the union support. Throws EmptyReference.
double cross_entropy(const testmodel::TestState& reference,
                     const testmodel::TestState& candidate,
                     double epsilon = kCrossEntropyEpsilon);

// Pools raw counts from several episodes.
testmodel::TestState pool_counts(std::span<const testmodel::TestState> tests);

// ci95 over trajectory lengths. Throws TooFewSamples.
Interval summarize_lengths(std::span<const mcts::Trajectory> trajs);

}  // namespace bugprobe::metrics
