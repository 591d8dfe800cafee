// One PASS/FAIL line per acceptance criterion. Arguments select criteria by
// number; none runs all. Exit status is nonzero when any selected one fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "../unit/support.hpp"
#include "bugprobe/engine/stepper.hpp"
#include "bugprobe/mcts/episode.hpp"
#include "bugprobe/mcts/search.hpp"
#include "bugprobe/mcts/stats.hpp"
#include "bugprobe/metrics/metrics.hpp"
#include "bugprobe/oracle/oracle.hpp"
#include "bugprobe/rng.hpp"
#include "bugprobe/testmodel/evaluator.hpp"
#include "bugprobe/testmodel/game_graph.hpp"

namespace bugprobe {
namespace {

namespace fs = std::filesystem;
using engine::Action;
using mcts::MctsConfig;
using mcts::StatEntry;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Collects failed checks; the first failure is reported.
class Checks {
 public:
  void expect(bool ok, std::string what) {
    if (!ok && failure_.empty()) failure_ = std::move(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want << " +- " << tol;
    expect(std::abs(got - want) <= tol, os.str());
  }
  Outcome done(std::string summary) const {
    if (failure_.empty()) return {true, std::move(summary)};
    return {false, failure_ + " (" + summary + ")"};
  }

 private:
  std::string failure_;
};

std::string fmt(double x, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << std::fixed << x;
  return os.str();
}

std::string interval(const metrics::Interval& ci) {
  return "[" + fmt(ci.low, 3) + ", " + fmt(ci.high, 3) + "]";
}

StatEntry entry(std::uint64_t n, double total, double max, double sumsq) {
  StatEntry e;
  e.n = n;
  e.total = total;
  e.max = max;
  e.sumsq = sumsq;
  return e;
}

// ---- 1 ---------------------------------------------------------------------

constexpr std::string_view kCrateSpec = R"(sprites:
  avatar avatar
  wall   wall
  crate  wall
levelmapping:
  w > wall
  c > crate
  A > avatar
interactions:
  avatar wall  > blockMove
  avatar crate > blockMove
)";

Outcome formula_fidelity() {
  Checks c;
  const double tol = 1e-9;

  MctsConfig plain;
  const double ucb = mcts::uct_value(entry(1, 0.5, 0.5, 0.25), 2, plain);
  c.near(ucb, 0.5 + 2 * plain.cp * std::sqrt(2 * std::log(2.0) / 1), tol, "UCB1");

  const std::vector<double> v{0, 2 * std::log(2.0)};
  const auto p = mcts::boltzmann_probabilities(v, 0.5);
  c.near(p.at(0), 1.0 / 3, tol, "Boltzmann p0");
  c.near(p.at(1), 2.0 / 3, tol, "Boltzmann p1");

  MctsConfig mm;
  mm.cp = 0;
  mm.use_mixmax = true;
  mm.q = 0.25;
  c.near(mcts::uct_value(entry(1, 0, 1, 0), 2, mm), 0.25, tol, "MixMax blend");

  MctsConfig sp;
  sp.cp = 0;
  sp.use_sp_uct = true;
  sp.d = 10000;
  const double third = mcts::uct_value(entry(1, 1, 1, 1), 2, sp) - 1;
  c.near(third, 100, tol, "SP third term");

  const auto spec = engine::parse_game_spec(kCrateSpec);
  const auto level = engine::parse_level("wwwwww\nwAc.cw\nwc..cw\nwwwwww\n", "crates", spec);
  testmodel::TestGoal goal{{{testmodel::parse_matcher("avatar/crate/use", spec), 0,
                             testmodel::parse_rational("1")}}};
  testmodel::GoalSequence seq;
  seq.name = "t";
  seq.goals = {goal};
  engine::InteractionEvent e;
  e.actor = spec.avatar();
  e.actee = *spec.find_class("crate");
  e.effect = engine::Effect::Use;
  e.trigger = engine::Trigger::Use;
  e.cell = {2, 1};
  const double kbe = testmodel::eval_kbe({}, std::span(&e, 1), goal, seq, level, spec);
  c.near(kbe, 9, tol, "goal completion");

  return c.done("UCB1 " + fmt(ucb, 9) + " (the quoted 2.7372 is off by 1.2e-4; exact formula used), " +
                "Boltzmann (" + fmt(p[0], 6) + ", " + fmt(p[1], 6) + "), SP " +
                fmt(third, 6) + ", KBE " + fmt(kbe, 6) + ", tol 1e-9");
}

// ---- shared search fixtures -------------------------------------------------

struct World {
  engine::GameSpec spec;
  engine::LevelMap level;
  testmodel::GoalSequence seq;
  testmodel::GoalEvaluator evaluator;
  mcts::Context ctx;

  World(engine::GameSpec s, engine::LevelMap l, testmodel::GoalSequence g)
      : spec(std::move(s)),
        level(std::move(l)),
        seq(std::move(g)),
        evaluator(seq, level, spec),
        ctx(spec, level, evaluator) {}

  mcts::SimState start() const { return {engine::initial_state(level, spec), {}, 0}; }
};

testmodel::GameGraph graph_of(const test::Game& g) {
  return testmodel::parse_game_graph(read_file(g.dir + "/graph.txt"), g.golden);
}

// Sum of per-node visits for every key, plus one per transferred seed.
std::map<std::uint64_t, std::uint64_t> visits_by_key(
    const mcts::SearchTree& tree, const std::vector<mcts::TransferRecord>& transfers) {
  std::map<std::uint64_t, std::uint64_t> visits;
  for (const auto& n : tree.nodes) visits[n.key] += n.visits;
  for (const auto& t : transfers) visits[t.key] += 1;
  return visits;
}

// ---- 2 ---------------------------------------------------------------------

Outcome transpositions() {
  Checks c;
  auto spec = test::toy_spec();
  auto level = test::toy_level("wwww\nwA.w\nw..w\nwwww\n", spec);
  const auto seq =
      testmodel::parse_goal_file("sequence s\ngoal\n  feature avatar/key/collectItem 1 1\nend\n",
                                 spec)
          .at(0);
  World w(std::move(spec), std::move(level), seq);
  MctsConfig cfg;
  cfg.budget = mcts::Budget::iterations(400);
  Rng rng(2);
  const auto r = mcts::search(w.start(), w.ctx, cfg, nullptr, rng);
  const std::vector<Action> p1{Action::Right, Action::Nil};
  const std::vector<Action> p2{Action::Nil, Action::Right};
  const auto a = r.tree.find(p1);
  const auto b = r.tree.find(p2);
  if (!a || !b) return {false, "paths Right,Nil and Nil,Right were not both expanded"};
  const auto& na = r.tree.nodes[static_cast<std::size_t>(*a)];
  const auto& nb = r.tree.nodes[static_cast<std::size_t>(*b)];
  c.expect(*a != *b, "paths share a node");
  c.expect(na.key == nb.key, "paths reach different keys");
  const auto visits = visits_by_key(r.tree, {});
  std::size_t sharing = 0;
  for (const auto& n : r.tree.nodes) sharing += n.key == na.key ? 1 : 0;
  const auto n = r.tree.stats(na).n;
  c.expect(n == visits.at(na.key), "shared entry n != sum of backprop updates over its nodes");
  std::size_t mismatched = 0;
  for (const auto& [key, e] : r.tree.tt) mismatched += e.n != visits.at(key) ? 1 : 0;
  c.expect(mismatched == 0, std::to_string(mismatched) + " entries disagree with node visits");
  return c.done("nodes sharing the entry " + std::to_string(sharing) + ", n " +
                std::to_string(n) + " = " + std::to_string(na.visits) + " + " +
                std::to_string(nb.visits) + " + " +
                std::to_string(n - na.visits - nb.visits) + " via other orders, " +
                std::to_string(r.tree.tt.size()) + " entries checked");
}

// ---- 3 ---------------------------------------------------------------------

Outcome fast_expansion() {
  Checks c;
  const auto b = test::load("B");
  const auto graph = graph_of(b);
  World w(b.shipped, b.level(1), testmodel::generate_baseline_goals(graph).at(0));
  MctsConfig cfg = mcts::preset(mcts::Agent::FE, mcts::Budget::iterations(500));
  cfg.trace_transfers = true;
  Rng rng(3);
  auto s = w.start();
  const auto first = mcts::search(s, w.ctx, cfg, nullptr, rng);
  std::vector<engine::InteractionEvent> events;
  mcts::sim_step(s, first.action, w.ctx, events);
  mcts::SearchTree prev = first.tree;
  prev.advance(first.action);
  if (prev.empty()) return {false, "played child missing from the first tree"};
  const auto second = mcts::search(s, w.ctx, cfg, &prev, rng);
  const auto& transfers = second.stats.transfers;
  c.expect(!transfers.empty(), "no entries transferred");
  std::size_t raw_above_one = 0;
  double worst = 0;
  for (const auto& t : transfers) {
    c.expect(t.transferred.n == 1, "transferred entry with n != 1");
    worst = std::max(worst, std::abs(t.transferred.mean() - t.previous.mean()));
    raw_above_one += t.previous.n > 1 ? 1 : 0;
  }
  c.near(worst, 0, 1e-9, "largest mean drift");
  c.expect(raw_above_one > 0, "no transferred entry had more than one previous visit");
  // After the second search an entry is its seed plus the new backprops only.
  const auto visits = visits_by_key(second.tree, transfers);
  std::size_t retained = 0;
  for (const auto& t : transfers) {
    retained += second.tree.tt.at(t.key).n != visits.at(t.key) ? 1 : 0;
  }
  c.expect(retained == 0, std::to_string(retained) + " entries kept previous visit counts");
  return c.done(std::to_string(transfers.size()) + " transfers, " +
                std::to_string(raw_above_one) + " flattened from n > 1, max mean drift " +
                fmt(worst, 12));
}

// ---- 4 ---------------------------------------------------------------------

Outcome oracle_equivalence() {
  Checks c;
  const auto a = test::load("A");
  const auto graph = graph_of(a);
  std::set<std::string> catalog;
  for (const auto& m : a.catalog) catalog.insert(m.bug_id);

  constexpr int kLevels = 4;
  constexpr int kEpisodes = 25;
  constexpr int kDepth = 80;
  std::vector<std::set<std::string>> reachable(kLevels + 1);
  std::set<std::string> reachable_union;
  std::vector<std::set<std::string>> found(kLevels + 1);
  std::set<std::string> found_union;
  std::vector<engine::LevelMap> levels{engine::LevelMap{}};
  for (int lv = 1; lv <= kLevels; ++lv) {
    levels.push_back(a.level(lv));
    reachable[lv] = oracle::reachable_bugs(a.shipped, levels[lv], kDepth);
    reachable_union.insert(reachable[lv].begin(), reachable[lv].end());
  }
  for (int s = 1; s <= kEpisodes; ++s) {
    const int lv = (s - 1) % kLevels + 1;
    const auto seqs =
        testmodel::generate_synthetic_goals(graph, a.golden, levels[lv], {}, 1);
    MctsConfig cfg = mcts::preset(mcts::Agent::KBE, mcts::Budget::iterations(2000));
    cfg.seed = static_cast<std::uint64_t>(s);
    const auto ep = mcts::play_episode(levels[lv], a.shipped,
                                       seqs[static_cast<std::size_t>(s) % seqs.size()], cfg);
    const auto bugs = oracle::collect_witnesses("", ep.trajectory.per_step_events).witnessed();
    found[lv].insert(bugs.begin(), bugs.end());
    found_union.insert(bugs.begin(), bugs.end());
  }
  std::string per_level;
  for (int lv = 1; lv <= kLevels; ++lv) {
    const bool subset = std::includes(reachable[lv].begin(), reachable[lv].end(),
                                      found[lv].begin(), found[lv].end());
    c.expect(subset, "level " + std::to_string(lv) + ": search found a bug the oracle missed");
    per_level += " L" + std::to_string(lv) + " " + std::to_string(found[lv].size()) + "/" +
                 std::to_string(reachable[lv].size());
  }
  c.expect(reachable_union == catalog, "oracle misses part of the catalog");
  return c.done(std::to_string(kEpisodes) + " episodes at 2000it, found/reachable@" +
                std::to_string(kDepth) + ":" + per_level + ", oracle covers " +
                std::to_string(reachable_union.size()) + "/" + std::to_string(catalog.size()) +
                " catalog bugs, search found " + std::to_string(found_union.size()));
}

// ---- 5 ---------------------------------------------------------------------

Outcome budget_direction() {
  Checks c;
  const auto b = test::load("B");
  const auto graph = graph_of(b);
  constexpr int kLevels = 4;
  constexpr int kSeeds = 20;
  std::vector<engine::LevelMap> levels{engine::LevelMap{}};
  std::vector<std::vector<testmodel::GoalSequence>> seqs(kLevels + 1);
  for (int lv = 1; lv <= kLevels; ++lv) {
    levels.push_back(b.level(lv));
    seqs[lv] = testmodel::generate_synthetic_goals(graph, b.golden, levels[lv], {}, 1);
  }
  std::map<std::uint64_t, std::vector<double>> unique;
  for (const std::uint64_t its : {800u, 6000u}) {
    for (int s = 1; s <= kSeeds; ++s) {
      const int lv = (s - 1) % kLevels + 1;
      MctsConfig cfg = mcts::preset(mcts::Agent::KBE, mcts::Budget::iterations(its));
      cfg.seed = static_cast<std::uint64_t>(s);
      const auto& seq = seqs[lv][static_cast<std::size_t>(s) % seqs[lv].size()];
      const auto ep = mcts::play_episode(levels[lv], b.shipped, seq, cfg);
      unique[its].push_back(static_cast<double>(
          oracle::collect_witnesses("", ep.trajectory.per_step_events).unique_count()));
    }
  }
  const double low = metrics::mean(unique[800]);
  const double high = metrics::mean(unique[6000]);
  c.expect(high - low >= 0, "mean at 6000it below mean at 800it");
  return c.done(std::to_string(kSeeds) + " seeds, mean unique bugs 800it " + fmt(low, 3) +
                " ci95 " + interval(metrics::ci95(unique[800])) + ", 6000it " + fmt(high, 3) +
                " ci95 " + interval(metrics::ci95(unique[6000])) + ", difference " +
                fmt(high - low, 3));
}

// ---- 6 ---------------------------------------------------------------------

Outcome budget_adherence() {
  Checks c;
  const auto g = test::load("C");
  const auto graph = graph_of(g);
  constexpr int kLevels = 4;
  constexpr int kSearches = 1000;
  constexpr double kBudgetMs = 40;
  std::vector<std::unique_ptr<World>> worlds;
  for (int lv = 1; lv <= kLevels; ++lv) {
    worlds.push_back(std::make_unique<World>(g.shipped, g.level(lv),
                                             testmodel::generate_baseline_goals(graph).at(0)));
  }
  const MctsConfig cfg = mcts::preset(mcts::Agent::KBE, mcts::Budget::millis(40));
  std::size_t within = 0;
  std::vector<double> elapsed;
  for (int i = 0; i < kSearches; ++i) {
    const World& w = *worlds[static_cast<std::size_t>(i % kLevels)];
    // Start from a short random walk so the searches see varied states.
    Rng walk(static_cast<std::uint64_t>(i));
    auto s = w.start();
    std::vector<engine::InteractionEvent> events;
    for (int step = 0; step < i % 30; ++step) {
      auto next = s;
      events.clear();
      mcts::sim_step(next, engine::kAllActions[uniform_index(walk, engine::kActionCount)],
                     w.ctx, events);
      if (mcts::is_terminal(next, w.ctx)) break;
      s = std::move(next);
    }
    Rng rng(static_cast<std::uint64_t>(i) + 1);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = mcts::search(s, w.ctx, cfg, nullptr, rng);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    elapsed.push_back(ms);
    within += ms <= kBudgetMs + r.stats.max_iteration_ms ? 1 : 0;
  }
  std::sort(elapsed.begin(), elapsed.end());
  const double share = static_cast<double>(within) / kSearches;
  c.expect(share >= 0.95, "fewer than 95% of searches within budget plus one iteration");
  return c.done(std::to_string(within) + "/" + std::to_string(kSearches) +
                " within 40ms + one iteration (" + fmt(100 * share, 1) + "%, 99% expected), p50 " +
                fmt(elapsed[kSearches / 2], 2) + "ms, p99 " +
                fmt(elapsed[kSearches * 99 / 100], 2) + "ms, max " + fmt(elapsed.back(), 2) +
                "ms");
}

// ---- 7 ---------------------------------------------------------------------

Outcome unique_bugs() {
  Checks c;
  const auto b = test::load("B");
  std::vector<engine::BugMutation> picked;
  for (const auto& m : b.catalog) {
    if (m.bug_id == "B3") picked.push_back(m);
  }
  const auto shipped = engine::apply_mutations(b.golden, picked);
  const auto level = engine::parse_level("wwwwww\nwA.W.w\nwwwwww\n", "t", b.golden);
  // Into the cracked wall three times.
  mcts::Trajectory t;
  t.actions = {Action::Right, Action::Right, Action::Right,
               Action::Left,  Action::Right, Action::Left};
  auto s = engine::initial_state(level, shipped);
  std::size_t triggers = 0;
  for (Action a : t.actions) {
    auto [next, events] = engine::step(s, a, shipped);
    for (const auto& e : events) triggers += e.bug_witness == "B3" ? 1 : 0;
    t.per_step_events.push_back(std::move(events));
    s = std::move(next);
  }
  t.events_digest = mcts::digest_events(t.per_step_events);
  const auto r = oracle::replay_and_detect(t, shipped, level);
  c.expect(triggers == 3, "crafted trajectory triggers B3 " + std::to_string(triggers) + " times");
  c.expect(r.unique_count() == 1, "unique count " + std::to_string(r.unique_count()));
  return c.done("B3 triggered " + std::to_string(triggers) + " times, unique count " +
                std::to_string(r.unique_count()));
}

// ---- 8 ---------------------------------------------------------------------

std::map<std::string, std::string> tree_contents(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return files;
}

Outcome determinism() {
  Checks c;
  const fs::path root = fs::temp_directory_path() / "bugprobe_acceptance_determinism";
  fs::remove_all(root);
  const std::string config = test::data_path("experiments/smoke.json");
  std::vector<std::map<std::string, std::string>> outputs;
  for (const char* name : {"first", "second"}) {
    const fs::path out = root / name;
    const std::string cmd = std::string("\"") + BUGPROBE_CLI + "\" run --config \"" + config +
                            "\" --seed 7 --out \"" + out.string() + "\" > /dev/null";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) return {false, "run exited with status " + std::to_string(rc)};
    outputs.push_back(tree_contents(out));
  }
  c.expect(outputs[0].contains("report.csv") && outputs[0].contains("report.json"),
           "report files missing");
  c.expect(outputs[0] == outputs[1], "outputs differ between invocations");
  std::size_t bytes = 0;
  for (const auto& [_, text] : outputs[0]) bytes += text.size();
  fs::remove_all(root);
  return c.done(std::to_string(outputs[0].size()) + " files, " + std::to_string(bytes) +
                " bytes, byte-identical across two invocations");
}

// ---- 9 ---------------------------------------------------------------------

Outcome statistics() {
  Checks c;
  const std::vector<double> xs{1, 2, 3};
  const auto ci = metrics::ci95(xs);
  const double half = oracles::t_quantile(0.975, 2) / std::sqrt(3.0);
  c.near(ci.low, 2 - half, 1e-3, "ci95 low");
  c.near(ci.high, 2 + half, 1e-3, "ci95 high");

  auto key = [](engine::ClassId actee) {
    testmodel::InteractionKey k;
    k.actor = 0;
    k.actee = actee;
    k.effect = engine::Effect::BlockMove;
    return k;
  };
  Rng rng(4);
  std::size_t pairs = 0;
  std::size_t violations = 0;
  while (pairs < 1000) {
    testmodel::TestState p;
    testmodel::TestState q;
    for (engine::ClassId cls = 0; cls < 5; ++cls) {
      if (uniform01(rng) < 0.8) p.add_count(key(cls), 1 + static_cast<std::uint32_t>(uniform_index(rng, 20)));
      if (uniform01(rng) < 0.8) q.add_count(key(cls), 1 + static_cast<std::uint32_t>(uniform_index(rng, 20)));
    }
    if (p.total() == 0) continue;
    ++pairs;
    violations += metrics::cross_entropy(p, p) > metrics::cross_entropy(p, q) + 1e-4 ? 1 : 0;
  }
  c.expect(violations == 0, std::to_string(violations) + " Gibbs violations");
  return c.done("ci95(1,2,3) " + interval(ci) + " vs oracle [" + fmt(2 - half, 3) + ", " +
                fmt(2 + half, 3) + "] tol 1e-3, Gibbs holds on " + std::to_string(pairs) +
                " pairs tol 1e-4");
}

struct Criterion {
  int id;
  std::string_view name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace bugprobe

int main(int argc, char** argv) {
  using namespace bugprobe;
  const std::vector<Criterion> all{
      {1, "formula fidelity", formula_fidelity},
      {2, "transposition correctness", transpositions},
      {3, "fast-expansion invariants", fast_expansion},
      {4, "oracle equivalence", oracle_equivalence},
      {5, "budget direction", budget_direction},
      {6, "budget adherence", budget_adherence},
      {7, "unique-bug semantics", unique_bugs},
      {8, "determinism", determinism},
      {9, "statistical utilities", statistics},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  bool ok = true;
  for (const auto& cr : all) {
    if (!selected.empty() && !selected.contains(cr.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << cr.id << "] " << cr.name << ": "
              << o.detail << " (" << fmt(s, 1) << "s)" << std::endl;
  }
  return ok ? 0 : 1;
}
