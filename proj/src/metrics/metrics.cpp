#include "bugprobe/metrics/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <map>
#include <tuple>

#include "bugprobe/error.hpp"

namespace bugprobe::metrics {

double mean(std::span<const double> samples) {
  double sum = 0;
  for (double x : samples) sum += x;
  return samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
}

Interval ci95(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) {
    throw TooFewSamples("ci95 needs at least 2 samples, got " + std::to_string(n));
  }
  const double m = mean(samples);
  double ss = 0;
  for (double x : samples) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(dist, 0.975);
  const double half = t * sd / std::sqrt(static_cast<double>(n));
  return {m - half, m + half};
}

namespace {

using TypeKey = std::tuple<testmodel::ClassId, testmodel::ClassId,
                           testmodel::Effect, testmodel::Trigger>;

std::map<TypeKey, double> by_type(const testmodel::TestState& t) {
  std::map<TypeKey, double> out;
  for (const auto& [k, n] : t.executed()) {
    out[{k.actor, k.actee, k.effect, k.trigger}] += n;
  }
  return out;
}

}  // namespace

double cross_entropy(const testmodel::TestState& reference,
                     const testmodel::TestState& candidate, double epsilon) {
  if (reference.total() == 0) throw EmptyReference("reference has no interactions");
  const auto ref = by_type(reference);
  const auto cand = by_type(candidate);
  std::map<TypeKey, std::pair<double, double>> support;
  for (const auto& [k, n] : ref) support[k].first = n;
  for (const auto& [k, n] : cand) support[k].second = n;
  const double size = static_cast<double>(support.size());
  const double ref_total = static_cast<double>(reference.total()) + epsilon * size;
  const double cand_total = static_cast<double>(candidate.total()) + epsilon * size;
  double h = 0;
  for (const auto& [k, counts] : support) {
    const double p = (counts.first + epsilon) / ref_total;
    const double q = (counts.second + epsilon) / cand_total;
    h -= p * std::log(q);
  }
  return h;
}

testmodel::TestState pool_counts(std::span<const testmodel::TestState> tests) {
  testmodel::TestState pooled;
  for (const auto& t : tests) {
    for (const auto& [k, n] : t.executed()) pooled.add_count(k, n);
  }
  return pooled;
}

Interval summarize_lengths(std::span<const mcts::Trajectory> trajs) {
  std::vector<double> lengths;
  lengths.reserve(trajs.size());
  for (const auto& t : trajs) lengths.push_back(static_cast<double>(t.length()));
  return ci95(lengths);
}

}  // namespace bugprobe::metrics
