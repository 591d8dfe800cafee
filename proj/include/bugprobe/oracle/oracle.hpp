#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bugprobe/engine/game_spec.hpp"
#include "bugprobe/engine/level.hpp"
#include "bugprobe/mcts/trajectory.hpp"

namespace bugprobe::oracle {

// Repeated witnesses of one bug count once.
struct BugReport {
  std::string trajectory_ref;
  std::size_t sequence_length = 0;
  std::map<std::string, std::uint32_t> first_witness_tick;  // bugId -> tick

  std::set<std::string> witnessed() const;
  std::size_t unique_count() const { return first_witness_tick.size(); }
  bool operator==(const BugReport&) const = default;
};

// Folds per-step witnesses into a report.
BugReport collect_witnesses(
    std::string trajectory_ref,
    const std::vector<std::vector<engine::InteractionEvent>>& per_step);

// Re-steps the shipped game over the recorded actions. Throws
// TrajectoryMismatch when the replay ends early or disagrees with the
// recorded events (or their digest when only the digest is known).
BugReport replay_and_detect(const mcts::Trajectory& traj,
                            const engine::GameSpec& shipped,
                            const engine::LevelMap& level,
                            std::string trajectory_ref = {});

inline constexpr std::size_t kOracleExpansionCap = 5'000'000;

// Every bug witnessable within max_depth steps of the level start, by
// exhaustive breadth-first search. Throws BudgetExceeded.
std::set<std::string> reachable_bugs(const engine::GameSpec& shipped,
                                     const engine::LevelMap& level, int max_depth,
                                     std::size_t max_expansions = kOracleExpansionCap);

struct BugStats {
  double combined_pct = 0;
  std::vector<double> individual_pcts;
};

// Percentages of `catalog`; ids outside the catalog are ignored.
// No reports yield 0 combined and no individuals. Throws EmptyCatalog.
BugStats aggregate_bug_stats(const std::vector<BugReport>& reports,
                             const std::vector<std::string>& catalog);

// One tab-separated record per line:
//   trajectory=REF<TAB>length=N<TAB>witnessed=ID@TICK,ID@TICK
std::string to_text(const BugReport& r);
std::string to_text(const std::vector<BugReport>& reports);
// Throws SyntaxError.
std::vector<BugReport> parse_bug_reports(std::string_view text);

}  // namespace bugprobe::oracle
