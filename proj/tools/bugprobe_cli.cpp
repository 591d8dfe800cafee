#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bugprobe/engine/game_spec.hpp"
#include "bugprobe/engine/level.hpp"
#include "bugprobe/engine/mutation.hpp"
#include "bugprobe/error.hpp"
#include "bugprobe/harness/experiment.hpp"
#include "bugprobe/mcts/trajectory.hpp"
#include "bugprobe/oracle/oracle.hpp"
#include "bugprobe/testmodel/game_graph.hpp"
#include "bugprobe/testmodel/goal.hpp"
#include "bugprobe/text.hpp"

namespace fs = std::filesystem;
using namespace bugprobe;

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

struct GameArgs {
  std::string data = BUGPROBE_DATA_DIR;
  std::string game;
  std::string level;
};

void add_game_options(CLI::App* cmd, GameArgs& g, bool need_level) {
  cmd->add_option("--data", g.data, "Data directory holding games/<id>/");
  cmd->add_option("--game", g.game, "Game id under games/, or a game directory")->required();
  auto* level = cmd->add_option("--level", g.level, "Level number or level file");
  if (need_level) level->required();
}

fs::path game_dir(const GameArgs& g) {
  if (fs::is_directory(g.game)) return g.game;
  return fs::path(g.data) / "games" / g.game;
}

fs::path level_path(const GameArgs& g) {
  if (fs::is_regular_file(g.level)) return g.level;
  return game_dir(g) / ("level" + g.level + ".txt");
}

harness::GameEntry entry_for(const GameArgs& g) {
  const fs::path dir = game_dir(g);
  harness::GameEntry e;
  e.id = fs::path(g.game).filename().string();
  e.spec = dir / "game.txt";
  e.catalog = dir / "bugs.txt";
  e.graph = dir / "graph.txt";
  if (!g.level.empty()) {
    e.levels.push_back(level_path(g));
  } else {
    for (int i = 1; fs::exists(dir / ("level" + std::to_string(i) + ".txt")); ++i) {
      e.levels.push_back(dir / ("level" + std::to_string(i) + ".txt"));
    }
  }
  return e;
}

int cmd_validate(const GameArgs& g, const std::vector<std::string>& goal_files) {
  const harness::GameEntry e = entry_for(g);
  const harness::GameAssets a = harness::load_game(e);
  for (const auto& f : goal_files) testmodel::parse_goal_file(read_file(f), a.golden);
  std::cout << "ok: " << a.id << " (" << a.catalog.size() << " bugs, " << a.levels.size()
            << " levels, " << goal_files.size() << " goal files)\n";
  return 0;
}

int cmd_goals(const GameArgs& g, const std::string& type, std::uint64_t seed,
              const std::string& out) {
  const harness::GameEntry e = entry_for(g);
  const harness::GameAssets a = harness::load_game(e);
  const auto goal_type = harness::parse_goal_type(type);
  if (!goal_type) throw CLI::ValidationError("--type", "expected synthetic or baseline");
  harness::ExperimentConfig cfg;
  cfg.goal_seed = seed;
  const std::string text =
      testmodel::to_text(harness::goals_for(e, a, 0, *goal_type, cfg), a.golden);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return 0;
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed,
            std::optional<std::uint64_t> budget_ms, std::optional<std::uint64_t> iterations,
            const std::vector<std::string>& agents, bool paper_faithful,
            const std::string& out) {
  harness::ExperimentConfig cfg = harness::load_experiment_config(config);
  if (seed) cfg.seed_base = *seed;
  if (budget_ms || iterations) cfg.budgets.clear();
  if (iterations) cfg.budgets.push_back(mcts::Budget::iterations(*iterations));
  if (budget_ms) cfg.budgets.push_back(mcts::Budget::millis(*budget_ms));
  if (!agents.empty()) {
    cfg.agents.clear();
    for (const auto& name : agents) {
      const auto a = mcts::parse_agent(name);
      if (!a) throw CLI::ValidationError("--agent", "unknown agent " + name);
      cfg.agents.push_back(*a);
    }
  }
  if (paper_faithful) cfg.paper_faithful = true;
  const harness::ReportBundle bundle = harness::run_experiment(cfg);
  harness::write_bundle(bundle, out);
  std::size_t failed = 0;
  for (const auto& c : bundle.cells) {
    if (c.failed()) {
      ++failed;
      std::cerr << "cell " << c.key.slug() << " failed: " << c.error << "\n";
    }
  }
  std::cout << bundle.cells.size() << " cells, " << failed << " failed, reports in " << out
            << "\n";
  return 0;
}

int cmd_replay(const GameArgs& g, const std::string& trajectory) {
  const harness::GameAssets a = harness::load_game(entry_for(g));
  const mcts::Trajectory t = mcts::parse_trajectory(read_file(trajectory));
  std::cout << oracle::to_text(
      oracle::replay_and_detect(t, a.shipped, a.levels.front(), trajectory))
            << "\n";
  return 0;
}

int cmd_oracle(const GameArgs& g, int depth, bool golden) {
  const harness::GameAssets a = harness::load_game(entry_for(g));
  const auto bugs =
      oracle::reachable_bugs(golden ? a.golden : a.shipped, a.levels.front(), depth);
  std::cout << bugs.size() << " reachable:";
  for (const auto& b : bugs) std::cout << ' ' << b;
  std::cout << "\n";
  return 0;
}

int cmd_report(const std::string& config, const std::string& out) {
  const harness::ExperimentConfig cfg = harness::load_experiment_config(config);
  const harness::ReportBundle bundle = harness::load_saved_runs(cfg, out);
  harness::write_reports(bundle, out);
  std::cout << "reports rewritten in " << out << (bundle.partial ? " (partial)" : "") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal-directed MCTS game testing"};
  app.require_subcommand(1);

  GameArgs game;
  std::vector<std::string> goal_files;
  auto* validate = app.add_subcommand("validate", "Lint a game's spec, catalog, graph and levels");
  add_game_options(validate, game, false);
  validate->add_option("--goals", goal_files, "Goal files to lint")->check(CLI::ExistingFile);

  std::string goal_type = "synthetic";
  std::uint64_t goal_seed = 0;
  std::string goals_out;
  auto* goals = app.add_subcommand("goals", "Generate goal sequences from the game graph");
  add_game_options(goals, game, true);
  goals->add_option("--type", goal_type, "synthetic or baseline");
  goals->add_option("--seed", goal_seed, "Probe sampling seed");
  goals->add_option("--out", goals_out, "Output file (stdout when absent)");

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget_ms;
  std::optional<std::uint64_t> iterations;
  std::vector<std::string> agents;
  bool paper_faithful = false;
  std::string out = "out";
  auto* run = app.add_subcommand("run", "Run an experiment grid");
  run->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override seed_base");
  auto* ms = run->add_option("--budget-ms", budget_ms, "Wall-clock budget per move");
  run->add_option("--iterations", iterations, "Iteration budget per move")->excludes(ms);
  run->add_option("--agent", agents, "Restrict to these agents");
  run->add_flag("--paper-faithful", paper_faithful,
                "Completion at the criteria threshold 0.01, mean-linear SP term");
  run->add_option("--out", out, "Output directory");

  std::string trajectory;
  auto* replay = app.add_subcommand("replay", "Replay a trajectory on the shipped game");
  add_game_options(replay, game, true);
  replay->add_option("trajectory", trajectory, "Trajectory file")->required()->check(CLI::ExistingFile);

  int depth = 60;
  bool golden = false;
  auto* orc = app.add_subcommand("oracle", "Bugs reachable by exhaustive search");
  add_game_options(orc, game, true);
  orc->add_option("--depth", depth, "Maximum action depth")->check(CLI::PositiveNumber);
  orc->add_flag("--golden", golden, "Search the golden spec instead");

  auto* report = app.add_subcommand("report", "Rebuild reports from saved runs");
  report->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  report->add_option("--out", out, "Directory written by run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  }

  try {
    if (*validate) return cmd_validate(game, goal_files);
    if (*goals) return cmd_goals(game, goal_type, goal_seed, goals_out);
    if (*run) {
      return cmd_run(config, seed, budget_ms, iterations, agents, paper_faithful, out);
    }
    if (*replay) return cmd_replay(game, trajectory);
    if (*orc) return cmd_oracle(game, depth, golden);
    if (*report) return cmd_report(config, out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
