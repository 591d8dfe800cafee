#include "bugprobe/harness/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <map>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "bugprobe/error.hpp"
#include "bugprobe/engine/stepper.hpp"
#include "bugprobe/mcts/episode.hpp"
#include "bugprobe/text.hpp"

namespace bugprobe::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 2> kGoalTypeNames = {"synthetic", "baseline"};

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path out = fs::path(p).is_absolute() ? fs::path(p) : base / p;
  out = out.lexically_normal();
  if (!fs::exists(out)) throw MissingAsset("missing asset " + out.string());
  return out;
}

template <typename T>
T field(const json& j, const char* name, T fallback) {
  const auto it = j.find(name);
  return it == j.end() ? fallback : it->get<T>();
}

std::string level_id(const fs::path& p) { return p.stem().string(); }

// Interactions of a whole episode, goal boundaries ignored.
testmodel::TestState interactions_of(const mcts::Trajectory& t) {
  testmodel::TestState s;
  for (const auto& step : t.per_step_events) s.record(step);
  return s;
}

std::optional<metrics::Interval> maybe_ci(const std::vector<double>& xs) {
  if (xs.size() < 2) return std::nullopt;
  return metrics::ci95(xs);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void csv_interval(std::string& out, const std::optional<metrics::Interval>& ci) {
  out += ',';
  if (ci) out += fmt(ci->low);
  out += ',';
  if (ci) out += fmt(ci->high);
}

json json_interval(const std::optional<metrics::Interval>& ci) {
  if (!ci) return nullptr;
  return json{{"low", ci->low}, {"high", ci->high}};
}

std::string run_file(std::size_t i) { return "run" + std::to_string(i) + ".traj"; }

struct Job {
  std::size_t game = 0;
  std::size_t level = 0;
  GoalType goals = GoalType::Synthetic;
  std::size_t cell = 0;
};

}  // namespace

std::string_view goal_type_name(GoalType g) {
  return kGoalTypeNames[static_cast<std::size_t>(g)];
}

std::optional<GoalType> parse_goal_type(std::string_view name) {
  for (std::size_t i = 0; i < kGoalTypeNames.size(); ++i) {
    if (name == kGoalTypeNames[i]) return static_cast<GoalType>(i);
  }
  return std::nullopt;
}

ExperimentConfig parse_experiment_config(std::string_view text,
                                         const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SyntaxError(0, static_cast<int>(e.byte), e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.version = field(j, "version", kConfigVersion);
    if (cfg.version != kConfigVersion) {
      throw SyntaxError(0, 0, "unsupported config version " + std::to_string(cfg.version));
    }
    for (const auto& g : j.at("games")) {
      GameEntry e;
      e.id = g.at("id").get<std::string>();
      e.spec = resolve(base_dir, g.at("spec").get<std::string>());
      e.catalog = resolve(base_dir, g.at("catalog").get<std::string>());
      e.graph = resolve(base_dir, g.at("graph").get<std::string>());
      for (const auto& l : g.at("levels")) {
        e.levels.push_back(resolve(base_dir, l.get<std::string>()));
      }
      if (g.contains("synthetic_goals")) {
        e.synthetic_goals = resolve(base_dir, g["synthetic_goals"].get<std::string>());
      }
      if (g.contains("baseline_goals")) {
        e.baseline_goals = resolve(base_dir, g["baseline_goals"].get<std::string>());
      }
      cfg.games.push_back(std::move(e));
    }
    for (const auto& a : j.at("agents")) {
      const auto agent = mcts::parse_agent(a.get<std::string>());
      if (!agent) throw SyntaxError(0, 0, "unknown agent " + a.get<std::string>());
      cfg.agents.push_back(*agent);
    }
    for (const auto& g : j.value("goal_types", json::array({"synthetic"}))) {
      const auto type = parse_goal_type(g.get<std::string>());
      if (!type) throw SyntaxError(0, 0, "unknown goal type " + g.get<std::string>());
      cfg.goal_types.push_back(*type);
    }
    for (const auto& b : j.at("budgets")) {
      const auto budget = mcts::parse_budget(b.get<std::string>());
      if (!budget) throw SyntaxError(0, 0, "bad budget " + b.get<std::string>());
      cfg.budgets.push_back(*budget);
    }
    cfg.runs = field<std::size_t>(j, "runs", 5);
    cfg.seed_base = field<std::uint64_t>(j, "seed_base", 0);
    cfg.goal_seed = field<std::uint64_t>(j, "goal_seed", cfg.seed_base);
    cfg.paper_faithful = field(j, "paper_faithful", false);
    cfg.threads = std::max<std::size_t>(1, field<std::size_t>(j, "threads", 1));
    if (j.contains("reference_agent")) {
      cfg.reference_agent = mcts::parse_agent(j["reference_agent"].get<std::string>());
      if (!cfg.reference_agent) throw SyntaxError(0, 0, "unknown reference agent");
    }
    const auto coverage = field<std::string>(j, "coverage", "all-edges");
    if (coverage == "all-edges") {
      cfg.coverage.kind = testmodel::Coverage::AllEdges;
    } else if (coverage == "all-paths") {
      cfg.coverage.kind = testmodel::Coverage::AllPaths;
    } else {
      throw SyntaxError(0, 0, "unknown coverage " + coverage);
    }
    cfg.coverage.max_path_length =
        field<std::size_t>(j, "max_path_length", cfg.coverage.max_path_length);
  } catch (const json::exception& e) {
    throw SyntaxError(0, 0, e.what());
  }
  if (cfg.runs == 0) throw SyntaxError(0, 0, "runs must be positive");
  return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  return parse_experiment_config(read_file(path), path.parent_path());
}

GameAssets load_game(const GameEntry& entry) {
  GameAssets a;
  a.id = entry.id;
  a.golden = engine::parse_game_spec(read_file(entry.spec));
  a.catalog = engine::parse_mutation_catalog(read_file(entry.catalog), a.golden);
  a.shipped = engine::apply_mutations(a.golden, a.catalog);
  a.graph = testmodel::parse_game_graph(read_file(entry.graph), a.golden);
  for (const auto& p : entry.levels) {
    a.levels.push_back(engine::parse_level(read_file(p), level_id(p), a.golden));
  }
  return a;
}

std::vector<testmodel::GoalSequence> goals_for(const GameEntry& entry,
                                               const GameAssets& assets,
                                               std::size_t level_index,
                                               GoalType type,
                                               const ExperimentConfig& cfg) {
  std::vector<testmodel::GoalSequence> seqs;
  const auto& file = type == GoalType::Synthetic ? entry.synthetic_goals : entry.baseline_goals;
  if (file) {
    seqs = testmodel::parse_goal_file(read_file(*file), assets.golden);
  } else if (type == GoalType::Synthetic) {
    seqs = testmodel::generate_synthetic_goals(
        assets.graph, assets.golden, assets.levels[level_index], cfg.coverage, cfg.goal_seed);
  } else {
    seqs = testmodel::generate_baseline_goals(assets.graph, cfg.coverage);
  }
  if (cfg.paper_faithful) {
    for (auto& s : seqs) s.completion_threshold = s.criteria_threshold;
  }
  return seqs;
}

mcts::MctsConfig agent_config(mcts::Agent agent, mcts::Budget budget,
                              bool paper_faithful) {
  mcts::MctsConfig m = mcts::preset(agent, budget);
  if (paper_faithful) m.sp_term = mcts::SpTerm::MeanLinear;
  return m;
}

std::string CellKey::slug() const {
  std::string s = game + "_" + level + "_" + std::string(mcts::agent_name(agent)) + "_" +
                  std::string(goal_type_name(goals)) + "_" + budget.text();
  return s;
}

ReportBundle run_experiment(const ExperimentConfig& cfg) {
  ReportBundle bundle;
  bundle.paper_faithful = cfg.paper_faithful;
  bundle.reference_agent = cfg.reference_agent;

  std::vector<GameAssets> games;
  for (const auto& g : cfg.games) games.push_back(load_game(g));

  // Goal generation can fail per level; every cell of that level then fails.
  std::map<std::tuple<std::size_t, std::size_t, GoalType>,
           std::vector<testmodel::GoalSequence>> goals;
  std::map<std::tuple<std::size_t, std::size_t, GoalType>, std::string> goal_errors;

  std::vector<Job> jobs;
  for (std::size_t g = 0; g < games.size(); ++g) {
    for (std::size_t l = 0; l < games[g].levels.size(); ++l) {
      for (GoalType type : cfg.goal_types) {
        try {
          goals[{g, l, type}] = goals_for(cfg.games[g], games[g], l, type, cfg);
          if (goals[{g, l, type}].empty()) throw Error("no goal sequences");
        } catch (const Error& e) {
          goal_errors[{g, l, type}] = e.what();
        }
        for (mcts::Agent agent : cfg.agents) {
          for (mcts::Budget budget : cfg.budgets) {
            CellResult cell;
            cell.key = {games[g].id, games[g].levels[l].id, agent, type, budget};
            cell.catalog_size = games[g].catalog.size();
            jobs.push_back({g, l, type, bundle.cells.size()});
            bundle.cells.push_back(std::move(cell));
          }
        }
      }
    }
  }

  auto run_cell = [&](const Job& job) {
    CellResult& cell = bundle.cells[job.cell];
    const auto err = goal_errors.find({job.game, job.level, job.goals});
    if (err != goal_errors.end()) {
      cell.error = err->second;
      return;
    }
    const auto& seqs = goals.at({job.game, job.level, job.goals});
    const GameAssets& assets = games[job.game];
    try {
      for (std::size_t i = 0; i < cfg.runs; ++i) {
        mcts::MctsConfig m = agent_config(cell.key.agent, cell.key.budget, cfg.paper_faithful);
        m.seed = cfg.seed_base + i;
        const mcts::Episode ep = mcts::play_episode(
            assets.levels[job.level], assets.shipped, seqs[i % seqs.size()], m,
            {assets.id, cell.key.level, std::string(mcts::agent_name(cell.key.agent))});
        RunRecord rec{ep.trajectory,
                      oracle::collect_witnesses(run_file(i), ep.trajectory.per_step_events)};
        cell.runs.push_back(std::move(rec));
      }
    } catch (const std::exception& e) {
      cell.error = e.what();
      cell.runs.clear();
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) run_cell(jobs[i]);
  };
  const std::size_t n_threads = std::min(cfg.threads, std::max<std::size_t>(1, jobs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  aggregate(bundle, cfg);
  return bundle;
}

ReportBundle load_saved_runs(const ExperimentConfig& cfg, const fs::path& out_dir) {
  ReportBundle bundle;
  bundle.paper_faithful = cfg.paper_faithful;
  bundle.reference_agent = cfg.reference_agent;
  for (const auto& entry : cfg.games) {
    const GameAssets assets = load_game(entry);
    for (const auto& level : assets.levels) {
      for (GoalType type : cfg.goal_types) {
        for (mcts::Agent agent : cfg.agents) {
          for (mcts::Budget budget : cfg.budgets) {
            CellResult cell;
            cell.key = {assets.id, level.id, agent, type, budget};
            cell.catalog_size = assets.catalog.size();
            const fs::path dir = out_dir / "runs" / cell.key.slug();
            try {
              for (std::size_t i = 0; i < cfg.runs; ++i) {
                mcts::Trajectory t = mcts::parse_trajectory(read_file(dir / run_file(i)));
                oracle::BugReport r =
                    oracle::replay_and_detect(t, assets.shipped, level, run_file(i));
                // Replay fills the events the saved file only digests.
                t.per_step_events.clear();
                engine::GameState s = engine::initial_state(level, assets.shipped);
                for (engine::Action a : t.actions) {
                  t.per_step_events.emplace_back();
                  engine::step_in_place(s, a, assets.shipped, t.per_step_events.back());
                }
                cell.runs.push_back({std::move(t), std::move(r)});
              }
            } catch (const Error& e) {
              cell.error = e.what();
              cell.runs.clear();
            }
            bundle.cells.push_back(std::move(cell));
          }
        }
      }
    }
  }
  aggregate(bundle, cfg);
  return bundle;
}

void aggregate(ReportBundle& bundle, const ExperimentConfig& cfg) {
  bundle.partial = false;
  for (CellResult& cell : bundle.cells) {
    cell.bug_pcts.clear();
    cell.combined_pct = 0;
    cell.mean_unique = 0;
    cell.bug_pct_ci.reset();
    cell.length_ci.reset();
    cell.cross_entropy_ci.reset();
    if (cell.failed()) {
      bundle.partial = true;
      continue;
    }
    const double size = static_cast<double>(cell.catalog_size);
    std::vector<double> lengths;
    std::set<std::string> all;
    for (const auto& run : cell.runs) {
      const auto w = run.report.witnessed();
      all.insert(w.begin(), w.end());
      cell.bug_pcts.push_back(size > 0 ? 100.0 * static_cast<double>(w.size()) / size : 0);
      cell.mean_unique += static_cast<double>(w.size());
      lengths.push_back(static_cast<double>(run.trajectory.length()));
    }
    if (!cell.runs.empty()) cell.mean_unique /= static_cast<double>(cell.runs.size());
    cell.combined_pct = size > 0 ? 100.0 * static_cast<double>(all.size()) / size : 0;
    cell.bug_pct_ci = maybe_ci(cell.bug_pcts);
    cell.length_ci = maybe_ci(lengths);
  }
  if (!cfg.reference_agent) return;
  for (CellResult& cell : bundle.cells) {
    if (cell.failed()) continue;
    const auto ref = std::find_if(bundle.cells.begin(), bundle.cells.end(), [&](const CellResult& c) {
      return c.key.game == cell.key.game && c.key.level == cell.key.level &&
             c.key.goals == cell.key.goals && c.key.budget == cell.key.budget &&
             c.key.agent == *cfg.reference_agent;
    });
    if (ref == bundle.cells.end() || ref->failed()) continue;
    std::vector<testmodel::TestState> ref_tests;
    for (const auto& run : ref->runs) ref_tests.push_back(interactions_of(run.trajectory));
    const testmodel::TestState pooled = metrics::pool_counts(ref_tests);
    if (pooled.total() == 0) continue;
    std::vector<double> ces;
    for (const auto& run : cell.runs) {
      ces.push_back(metrics::cross_entropy(pooled, interactions_of(run.trajectory)));
    }
    cell.cross_entropy_ci = maybe_ci(ces);
  }
}

std::string report_csv(const ReportBundle& bundle) {
  std::string out =
      "game,level,agent,goals,budget,mode,runs,bug_pct_low,bug_pct_high,"
      "bug_pct_combined,unique_mean,length_low,length_high,cross_entropy_low,"
      "cross_entropy_high,status\n";
  const std::string mode = bundle.paper_faithful ? "paper-faithful" : "default";
  for (const CellResult& c : bundle.cells) {
    out += c.key.game + ',' + c.key.level + ',' + std::string(mcts::agent_name(c.key.agent)) +
           ',' + std::string(goal_type_name(c.key.goals)) + ',' + c.key.budget.text() + ',' +
           mode + ',' + std::to_string(c.runs.size());
    csv_interval(out, c.bug_pct_ci);
    out += ',' + (c.failed() ? std::string() : fmt(c.combined_pct));
    out += ',' + (c.failed() ? std::string() : fmt(c.mean_unique));
    csv_interval(out, c.length_ci);
    csv_interval(out, c.cross_entropy_ci);
    out += c.failed() ? ",failed\n" : ",ok\n";
  }
  return out;
}

std::string report_json(const ReportBundle& bundle) {
  json cells = json::array();
  for (const CellResult& c : bundle.cells) {
    json runs = json::array();
    for (const auto& r : c.runs) {
      runs.push_back({{"seed", r.trajectory.seed},
                      {"length", r.trajectory.length()},
                      {"witnessed", r.report.witnessed()}});
    }
    json cell = {{"game", c.key.game},
                 {"level", c.key.level},
                 {"agent", mcts::agent_name(c.key.agent)},
                 {"goals", goal_type_name(c.key.goals)},
                 {"budget", c.key.budget.text()},
                 {"runs", std::move(runs)},
                 {"catalog_size", c.catalog_size},
                 {"bug_pct", json_interval(c.bug_pct_ci)},
                 {"length", json_interval(c.length_ci)},
                 {"cross_entropy", json_interval(c.cross_entropy_ci)}};
    if (c.failed()) {
      cell["error"] = c.error;
    } else {
      cell["bug_pct_combined"] = c.combined_pct;
      cell["unique_mean"] = c.mean_unique;
    }
    cells.push_back(std::move(cell));
  }
  json j = {{"version", kConfigVersion},
            {"mode", bundle.paper_faithful ? "paper-faithful" : "default"},
            {"reference_agent",
             bundle.reference_agent ? json(mcts::agent_name(*bundle.reference_agent)) : json()},
            {"partial", bundle.partial},
            {"cells", std::move(cells)}};
  return j.dump(2) + "\n";
}

void write_reports(const ReportBundle& bundle, const fs::path& out_dir) {
  write_file(out_dir / "report.csv", report_csv(bundle));
  write_file(out_dir / "report.json", report_json(bundle));
}

void write_bundle(const ReportBundle& bundle, const fs::path& out_dir) {
  for (const CellResult& c : bundle.cells) {
    if (c.failed()) continue;
    const fs::path dir = out_dir / "runs" / c.key.slug();
    std::vector<oracle::BugReport> reports;
    for (std::size_t i = 0; i < c.runs.size(); ++i) {
      write_file(dir / run_file(i), mcts::to_text(c.runs[i].trajectory));
      reports.push_back(c.runs[i].report);
    }
    write_file(dir / "bug_reports.txt", oracle::to_text(reports));
  }
  write_reports(bundle, out_dir);
}

}  // namespace bugprobe::harness
