#include "bugprobe/mcts/stats.hpp"

#include <algorithm>
#include <cmath>

namespace bugprobe::mcts {

void ScoreBounds::observe(double x) {
  if (!seen) {
    lo = hi = x;
    seen = true;
    return;
  }
  lo = std::min(lo, x);
  hi = std::max(hi, x);
}

double ScoreBounds::scale(double x) const {
  const double range = hi - lo;
  return range > 0 ? (x - lo) / range : 0.0;
}

double uct_value(const StatEntry& entry, std::uint64_t parent_visits,
                 const MctsConfig& cfg, const ScoreBounds& bounds) {
  const double ni = static_cast<double>(entry.n);
  const double mean = bounds.scale(entry.mean());
  double exploit = mean;
  if (cfg.use_mixmax) exploit = bounds.scale(entry.max) * cfg.q + mean * (1.0 - cfg.q);
  const double explore =
      std::sqrt(2.0 * std::log(static_cast<double>(parent_visits)) / ni);
  if (!cfg.use_sp_uct) return exploit + 2.0 * cfg.cp * explore;

  // Second moment of the scaled samples, from the raw sums.
  const double range = bounds.hi - bounds.lo;
  double sumsq = entry.sumsq;
  if (bounds.seen && range > 0) {
    sumsq = (entry.sumsq - 2.0 * bounds.lo * entry.total + ni * bounds.lo * bounds.lo) /
            (range * range);
  } else if (bounds.seen) {
    sumsq = 0;
  }
  const double centre = cfg.sp_term == SpTerm::MeanLinear ? ni * mean : ni * mean * mean;
  const double deviation = std::sqrt(std::max(0.0, (sumsq - centre + cfg.d) / ni));
  return exploit + cfg.cp * explore + deviation;
}

std::vector<double> boltzmann_probabilities(std::span<const double> values,
                                            double beta) {
  std::vector<double> p(values.size());
  if (values.empty()) return p;
  const double top = beta * *std::max_element(values.begin(), values.end());
  const double low = beta * *std::min_element(values.begin(), values.end());
  const double shift = beta >= 0 ? top : low;
  double sum = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    p[i] = std::exp(beta * values[i] - shift);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return p;
}

void backpropagate(std::span<const std::uint64_t> path, double score,
                   TranspositionTable& tt) {
  for (std::uint64_t key : path) {
    StatEntry& e = tt[key];
    e.key = key;
    ++e.n;
    e.total += score;
    e.sumsq += score * score;
    e.max = std::max(e.max, score);
  }
}

StatEntry flatten(const StatEntry& e) {
  const double avg = e.mean();
  return {1, avg, e.max, avg * avg, e.key};
}

}  // namespace bugprobe::mcts
