#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bugprobe/engine/game_spec.hpp"
#include "bugprobe/engine/level.hpp"
#include "bugprobe/engine/mutation.hpp"
#include "bugprobe/mcts/config.hpp"
#include "bugprobe/mcts/trajectory.hpp"
#include "bugprobe/metrics/metrics.hpp"
#include "bugprobe/oracle/oracle.hpp"
#include "bugprobe/testmodel/game_graph.hpp"
#include "bugprobe/testmodel/goal.hpp"

namespace bugprobe::harness {

inline constexpr int kConfigVersion = 1;

enum class GoalType : std::uint8_t { Synthetic, Baseline };

std::string_view goal_type_name(GoalType g);  // "synthetic" / "baseline"
std::optional<GoalType> parse_goal_type(std::string_view name);

// Paths are absolute once the config is loaded.
struct GameEntry {
  std::string id;
  std::filesystem::path spec;
  std::filesystem::path catalog;
  std::filesystem::path graph;
  std::vector<std::filesystem::path> levels;
  // Goal files override generation from the graph for every level.
  std::optional<std::filesystem::path> synthetic_goals;
  std::optional<std::filesystem::path> baseline_goals;
};

struct ExperimentConfig {
  int version = kConfigVersion;
  std::vector<GameEntry> games;
  std::vector<mcts::Agent> agents;
  std::vector<GoalType> goal_types;
  std::vector<mcts::Budget> budgets;
  std::size_t runs = 5;
  std::uint64_t seed_base = 0;
  std::uint64_t goal_seed = 0;
  // Completion at c_T = 0.01 and the mean-linear SP term.
  bool paper_faithful = false;
  std::optional<mcts::Agent> reference_agent;
  std::size_t threads = 1;
  testmodel::CoverageOptions coverage;
};

// JSON, documented in docs/formats.md. Relative paths resolve against
// `base_dir`. Throws SyntaxError on malformed input and MissingAsset when a
// referenced file does not exist.
ExperimentConfig parse_experiment_config(std::string_view json,
                                         const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Parsed assets of one game.
struct GameAssets {
  std::string id;
  engine::GameSpec golden;
  std::vector<engine::BugMutation> catalog;
  engine::GameSpec shipped;
  testmodel::GameGraph graph;
  std::vector<engine::LevelMap> levels;
};

GameAssets load_game(const GameEntry& entry);

// Goal sequences used by every run of a (game, level, goal type).
std::vector<testmodel::GoalSequence> goals_for(const GameEntry& entry,
                                               const GameAssets& assets,
                                               std::size_t level_index,
                                               GoalType type,
                                               const ExperimentConfig& cfg);

mcts::MctsConfig agent_config(mcts::Agent agent, mcts::Budget budget,
                              bool paper_faithful);

struct CellKey {
  std::string game;
  std::string level;
  mcts::Agent agent = mcts::Agent::KBE;
  GoalType goals = GoalType::Synthetic;
  mcts::Budget budget;

  // Directory name under runs/.
  std::string slug() const;
  bool operator==(const CellKey&) const = default;
};

struct RunRecord {
  mcts::Trajectory trajectory;
  oracle::BugReport report;
};

struct CellResult {
  CellKey key;
  std::vector<RunRecord> runs;
  std::string error;  // non-empty when the cell failed
  std::size_t catalog_size = 0;

  // Filled by aggregation.
  std::vector<double> bug_pcts;
  double combined_pct = 0;
  double mean_unique = 0;
  std::optional<metrics::Interval> bug_pct_ci;
  std::optional<metrics::Interval> length_ci;
  std::optional<metrics::Interval> cross_entropy_ci;

  bool failed() const { return !error.empty(); }
};

struct ReportBundle {
  std::vector<CellResult> cells;
  bool partial = false;
  bool paper_faithful = false;
  std::optional<mcts::Agent> reference_agent;
};

// Runs every cell of the grid. Run i of a cell uses seed seed_base + i and
// goal sequence i mod (number of sequences). A failing cell is recorded and
// the bundle marked partial.
ReportBundle run_experiment(const ExperimentConfig& cfg);

// Rebuilds a bundle from saved trajectories by replaying them on the shipped
// games. Missing cells are marked failed.
ReportBundle load_saved_runs(const ExperimentConfig& cfg,
                             const std::filesystem::path& out_dir);

// Bug percentages, intervals and cross-entropy against the reference agent's
// pooled interactions in the matching (game, level, goals, budget) cell.
void aggregate(ReportBundle& bundle, const ExperimentConfig& cfg);

std::string report_csv(const ReportBundle& bundle);
std::string report_json(const ReportBundle& bundle);

// report.csv, report.json and runs/<cell>/{runN.traj,bug_reports.txt}.
void write_bundle(const ReportBundle& bundle, const std::filesystem::path& out_dir);
void write_reports(const ReportBundle& bundle, const std::filesystem::path& out_dir);

}  // namespace bugprobe::harness
