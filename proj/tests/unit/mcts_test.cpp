#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "bugprobe/engine/explore.hpp"
#include "bugprobe/error.hpp"
#include "bugprobe/mcts/episode.hpp"
#include "bugprobe/mcts/stats.hpp"
#include "bugprobe/testmodel/game_graph.hpp"
#include "support.hpp"

namespace bugprobe {
namespace {

using engine::Action;
using mcts::MctsConfig;
using mcts::StatEntry;

StatEntry entry(std::uint64_t n, double total, double max, double sumsq) {
  StatEntry e;
  e.n = n;
  e.total = total;
  e.max = max;
  e.sumsq = sumsq;
  return e;
}

TEST(Uct, PlainUcb1) {
  MctsConfig cfg;
  const double v = mcts::uct_value(entry(1, 0.5, 0.5, 0.25), 2, cfg);
  EXPECT_NEAR(v, 0.5 + 1.9 * std::sqrt(2 * std::log(2.0)), 1e-9);
  EXPECT_NEAR(v, 2.73708, 1e-5);
}

TEST(Uct, MixMaxBlend) {
  MctsConfig cfg;
  cfg.cp = 0;
  cfg.use_mixmax = true;
  cfg.q = 0.25;
  EXPECT_NEAR(mcts::uct_value(entry(1, 0, 1, 0), 2, cfg), 0.25, 1e-9);
}

TEST(Uct, MixMaxWithZeroQIsPlain) {
  MctsConfig plain;
  MctsConfig mm;
  mm.use_mixmax = true;
  mm.q = 0;
  const StatEntry e = entry(3, 1.2, 0.9, 0.7);
  EXPECT_NEAR(mcts::uct_value(e, 10, mm), mcts::uct_value(e, 10, plain), 1e-12);
}

TEST(Uct, SpThirdTerm) {
  MctsConfig cfg;
  cfg.cp = 0;
  cfg.use_sp_uct = true;
  cfg.d = 10000;
  // Mean 1 plus sqrt((1 - 1 + 10000) / 1).
  EXPECT_NEAR(mcts::uct_value(entry(1, 1, 1, 1), 2, cfg), 1 + 100, 1e-9);
}

TEST(Uct, SpVarianceVariant) {
  MctsConfig cfg;
  cfg.cp = 0;
  cfg.use_sp_uct = true;
  cfg.d = 0;
  cfg.sp_term = mcts::SpTerm::VarianceCorrect;
  // Samples 0 and 2: mean 1, sum of squares 4, 4 - 2 * 1 = 2.
  EXPECT_NEAR(mcts::uct_value(entry(2, 2, 2, 4), 4, cfg), 1 + 1, 1e-9);
}

TEST(Uct, NormalizedExploitation) {
  MctsConfig cfg;
  cfg.cp = 0;
  mcts::ScoreBounds b;
  b.observe(-4);
  b.observe(6);
  EXPECT_NEAR(mcts::uct_value(entry(2, 2, 1, 1), 4, cfg, b), 0.5, 1e-12);
}

TEST(Boltzmann, ZeroBetaIsUniform) {
  const std::vector<double> v{3, -1, 7, 0};
  for (double p : mcts::boltzmann_probabilities(v, 0)) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(Boltzmann, HandComputed) {
  const std::vector<double> v{0, 2 * std::log(2.0)};
  const auto p = mcts::boltzmann_probabilities(v, 0.5);
  EXPECT_NEAR(p[0], 1.0 / 3, 1e-9);
  EXPECT_NEAR(p[1], 2.0 / 3, 1e-9);
}

TEST(Boltzmann, SingleValue) {
  const std::vector<double> v{42};
  EXPECT_EQ(mcts::boltzmann_probabilities(v, 0.5), std::vector<double>{1.0});
}

TEST(Boltzmann, LargeValuesStayFinite) {
  const std::vector<double> v{1e6, 1e6 + 1};
  const auto p = mcts::boltzmann_probabilities(v, 1);
  EXPECT_NEAR(p[0] + p[1], 1, 1e-12);
  EXPECT_GT(p[1], p[0]);
}

TEST(Backprop, FreshThenZero) {
  mcts::TranspositionTable tt;
  const std::vector<std::uint64_t> path{7};
  mcts::backpropagate(path, 2, tt);
  EXPECT_EQ(tt[7].n, 1u);
  EXPECT_EQ(tt[7].total, 2);
  EXPECT_EQ(tt[7].sumsq, 4);
  EXPECT_EQ(tt[7].max, 2);
  mcts::backpropagate(path, 0, tt);
  EXPECT_EQ(tt[7].n, 2u);
  EXPECT_EQ(tt[7].total, 2);
  EXPECT_EQ(tt[7].sumsq, 4);
  EXPECT_EQ(tt[7].max, 2);
  EXPECT_EQ(tt[7].mean(), 1);
}

TEST(Backprop, SharedKeyCountsBothPaths) {
  mcts::TranspositionTable tt;
  const std::vector<std::uint64_t> left{1, 2, 9};
  const std::vector<std::uint64_t> right{1, 3, 9};
  mcts::backpropagate(left, 1, tt);
  mcts::backpropagate(right, 3, tt);
  EXPECT_EQ(tt[9].n, 2u);
  EXPECT_EQ(tt[9].total, 4);
  EXPECT_EQ(tt[2].n, 1u);
}

TEST(Flatten, KeepsAverage) {
  const StatEntry f = mcts::flatten(entry(5, 10, 4, 30));
  EXPECT_EQ(f.n, 1u);
  EXPECT_DOUBLE_EQ(f.total, 2);
  EXPECT_DOUBLE_EQ(f.mean(), 2);
  EXPECT_EQ(mcts::flatten(f), f);
}

// A level, a goal sequence and the evaluator, kept alive together.
struct World {
  engine::GameSpec spec;
  engine::LevelMap level;
  testmodel::GoalSequence seq;
  testmodel::GoalEvaluator evaluator;
  mcts::Context ctx;

  World(engine::GameSpec s, std::string_view rows, std::string_view goals)
      : World(s, rows, testmodel::parse_goal_file(goals, s).at(0)) {}

  World(engine::GameSpec s, std::string_view rows, testmodel::GoalSequence goals)
      : spec(std::move(s)),
        level(engine::parse_level(rows, "t", spec)),
        seq(std::move(goals)),
        evaluator(seq, level, spec),
        ctx(spec, level, evaluator) {}

  mcts::SimState start() const { return {engine::initial_state(level, spec), {}, 0}; }
};

constexpr std::string_view kKeyGoal =
    "sequence k\ngoal\n  feature avatar/key/collectItem 1 1\nend\n"
    "goal\n  feature avatar/door/winIfCarrying 1 1\nend\n";

TEST(Rollout, TerminalScoresZero) {
  World w(test::toy_spec(), "wwwww\nwAkDw\nwwwww\n", kKeyGoal);
  auto s = w.start();
  s.goal = w.seq.goals.size();
  Rng rng(1);
  EXPECT_EQ(mcts::rollout(s, w.ctx, MctsConfig{}, rng), 0.0);
}

// Oracle: the rollout score is the discounted return of some action
// sequence, enumerated exhaustively.
TEST(Rollout, ScoreIsADiscountedReturn) {
  World w(test::toy_spec(), "wwwwww\nw.A.kw\nw..D.w\nwwwwww\n", kKeyGoal);
  MctsConfig cfg;
  cfg.rollout_depth = 2;
  std::vector<double> returns;
  std::vector<engine::InteractionEvent> ev;
  for (Action a : engine::kAllActions) {
    for (Action b : engine::kAllActions) {
      auto s = w.start();
      double r = mcts::sim_step(s, a, w.ctx, ev);
      if (!mcts::is_terminal(s, w.ctx)) r += cfg.gamma * mcts::sim_step(s, b, w.ctx, ev);
      returns.push_back(r);
    }
  }
  for (bool boltzmann : {false, true}) {
    cfg.use_boltzmann = boltzmann;
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
      const double score = mcts::rollout(w.start(), w.ctx, cfg, rng);
      EXPECT_TRUE(std::any_of(returns.begin(), returns.end(),
                              [&](double r) { return std::abs(r - score) < 1e-12; }))
          << score;
    }
  }
}

TEST(Search, SingleIteration) {
  World w(test::toy_spec(), "wwwww\nwAkDw\nwwwww\n", kKeyGoal);
  MctsConfig cfg;
  cfg.budget = mcts::Budget::iterations(1);
  Rng rng(1);
  const auto r = mcts::search(w.start(), w.ctx, cfg, nullptr, rng);
  EXPECT_EQ(r.stats.iterations, 1u);
  EXPECT_EQ(r.tree.root_node().key, mcts::key_of(w.start()));
}

TEST(Search, TerminalRootThrows) {
  World w(test::toy_spec(), "wwwww\nwAkDw\nwwwww\n", kKeyGoal);
  auto s = w.start();
  s.game.status = engine::Status::Lose;
  Rng rng(1);
  EXPECT_THROW(mcts::search(s, w.ctx, MctsConfig{}, nullptr, rng), NoLegalActions);
}

// Oracle: two-step expectimax over the exact step rewards.
TEST(Search, FindsGoalCompletingAction) {
  World w(test::toy_spec(), "wwwww\nw...w\nw.Akw\nw...w\nwwwww\n", kKeyGoal);
  std::vector<engine::InteractionEvent> ev;
  const double gamma = MctsConfig{}.gamma;
  double best = -1e9;
  Action best_action = Action::Nil;
  for (Action a : engine::kAllActions) {
    auto s = w.start();
    const double r1 = mcts::sim_step(s, a, w.ctx, ev);
    double r2 = 0;
    if (!mcts::is_terminal(s, w.ctx)) {
      r2 = -1e9;
      for (Action b : engine::kAllActions) {
        auto t = s;
        r2 = std::max(r2, mcts::sim_step(t, b, w.ctx, ev));
      }
    }
    if (r1 + gamma * r2 > best) {
      best = r1 + gamma * r2;
      best_action = a;
    }
  }
  ASSERT_EQ(best_action, Action::Right);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (mcts::Agent agent : {mcts::Agent::KBE, mcts::Agent::FE, mcts::Agent::MM,
                              mcts::Agent::BR, mcts::Agent::SP}) {
      MctsConfig cfg = mcts::preset(agent, mcts::Budget::iterations(200));
      Rng rng(seed);
      EXPECT_EQ(mcts::search(w.start(), w.ctx, cfg, nullptr, rng).action, best_action)
          << mcts::agent_name(agent) << " seed " << seed;
    }
  }
}

// Every entry's visit count is the number of backpropagations through nodes
// carrying its key, plus one for a transferred seed.
void expect_entries_match_visits(const mcts::SearchTree& tree,
                                 const std::vector<mcts::TransferRecord>& transfers) {
  std::map<std::uint64_t, std::uint64_t> visits;
  for (const auto& n : tree.nodes) visits[n.key] += n.visits;
  for (const auto& t : transfers) visits[t.key] += 1;
  for (const auto& [key, e] : tree.tt) EXPECT_EQ(e.n, visits[key]) << key;
}

TEST(Search, TranspositionsShareEntries) {
  World w(test::toy_spec(), "wwww\nwA.w\nw..w\nwwww\n",
          "sequence s\ngoal\n  feature avatar/key/collectItem 1 1\nend\n");
  MctsConfig cfg;
  cfg.budget = mcts::Budget::iterations(400);
  Rng rng(2);
  const auto r = mcts::search(w.start(), w.ctx, cfg, nullptr, rng);
  const std::vector<Action> p1{Action::Right, Action::Nil};
  const std::vector<Action> p2{Action::Nil, Action::Right};
  const auto a = r.tree.find(p1);
  const auto b = r.tree.find(p2);
  ASSERT_TRUE(a && b);
  ASSERT_NE(*a, *b);
  const auto& na = r.tree.nodes[static_cast<std::size_t>(*a)];
  const auto& nb = r.tree.nodes[static_cast<std::size_t>(*b)];
  EXPECT_EQ(na.key, nb.key);
  EXPECT_GE(r.tree.stats(na).n, na.visits + nb.visits);
  expect_entries_match_visits(r.tree, {});
}

TEST(FastExpansion, AbsentPath) {
  World w(test::toy_spec(), "wwwww\nwAkDw\nwwwww\n", kKeyGoal);
  MctsConfig cfg;
  cfg.budget = mcts::Budget::iterations(1);
  Rng rng(1);
  const auto r = mcts::search(w.start(), w.ctx, cfg, nullptr, rng);
  const std::vector<Action> deep{Action::Up, Action::Up, Action::Up};
  EXPECT_FALSE(mcts::fast_expansion_transfer(r.tree, deep));
  const auto root = mcts::fast_expansion_transfer(r.tree, {});
  ASSERT_TRUE(root);
  EXPECT_EQ(root->n, 1u);
}

TEST(FastExpansion, TransfersFlattenedEntries) {
  const auto b = test::load("B");
  const auto level = b.level(1);
  const auto graph = testmodel::parse_game_graph(read_file(b.dir + "/graph.txt"), b.golden);
  const auto seq = testmodel::generate_baseline_goals(graph).at(0);
  const testmodel::GoalEvaluator ev(seq, level, b.shipped);
  const mcts::Context ctx(b.shipped, level, ev);
  MctsConfig cfg = mcts::preset(mcts::Agent::FE, mcts::Budget::iterations(500));
  cfg.trace_transfers = true;
  Rng rng(3);
  mcts::SimState s{engine::initial_state(level, b.shipped), {}, 0};
  auto first = mcts::search(s, ctx, cfg, nullptr, rng);
  std::vector<engine::InteractionEvent> events;
  mcts::sim_step(s, first.action, ctx, events);
  mcts::SearchTree prev = first.tree;
  prev.advance(first.action);
  ASSERT_FALSE(prev.empty());
  const auto second = mcts::search(s, ctx, cfg, &prev, rng);
  ASSERT_FALSE(second.stats.transfers.empty());
  for (const auto& t : second.stats.transfers) {
    EXPECT_EQ(t.transferred.n, 1u);
    EXPECT_NEAR(t.transferred.mean(), t.previous.mean(), 1e-9);
  }
  EXPECT_GT(second.stats.transfers.front().previous.n, 1u);
  expect_entries_match_visits(second.tree, second.stats.transfers);
}

TEST(Search, ShiftedScoresKeepTheChoice) {
  World w(test::toy_spec(), "wwwwww\nw.A.kw\nw..D.w\nwwwwww\n", kKeyGoal);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    MctsConfig cfg;
    cfg.budget = mcts::Budget::iterations(300);
    Rng r1(seed);
    const auto base = mcts::search(w.start(), w.ctx, cfg, nullptr, r1);
    cfg.score_shift = 64;
    Rng r2(seed);
    EXPECT_EQ(mcts::search(w.start(), w.ctx, cfg, nullptr, r2).action, base.action)
        << "seed " << seed;
  }
}

TEST(Episode, EmptyFirstGoalAdvancesOnFirstMove) {
  const auto spec = test::toy_spec();
  auto seq = testmodel::parse_goal_file(kKeyGoal, spec).at(0);
  seq.goals.front().features.clear();
  World w(spec, "wwwww\nwA.Dw\nwwwww\n", seq);
  auto s = w.start();
  std::vector<engine::InteractionEvent> ev;
  mcts::sim_step(s, Action::Nil, w.ctx, ev);
  EXPECT_EQ(s.goal, 1u);
}

TEST(Episode, DeterministicUnderIterationBudget) {
  const auto a = test::load("A");
  const auto level = a.level(1);
  const auto graph = testmodel::parse_game_graph(read_file(a.dir + "/graph.txt"), a.golden);
  const auto seq = testmodel::generate_baseline_goals(graph).at(0);
  for (mcts::Agent agent : {mcts::Agent::KBE, mcts::Agent::FE, mcts::Agent::BR}) {
    MctsConfig cfg = mcts::preset(agent, mcts::Budget::iterations(150));
    cfg.seed = 12;
    const auto e1 = mcts::play_episode(level, a.shipped, seq, cfg);
    const auto e2 = mcts::play_episode(level, a.shipped, seq, cfg);
    EXPECT_EQ(e1.trajectory.actions, e2.trajectory.actions);
    EXPECT_EQ(e1.trajectory.events_digest, e2.trajectory.events_digest);
  }
}

// Oracle: exhaustive search confirms a winning path within the step cap.
TEST(Episode, BaselineWinsTheGoldenGame) {
  const auto a = test::load("A");
  const auto level = a.level(1);
  bool win_exists = false;
  engine::explore(a.golden, level, {static_cast<int>(engine::episode_cap(level))},
                  [&](const auto&, Action, const auto& events) {
                    for (const auto& e : events) {
                      win_exists |= e.effect == engine::Effect::WinIfCarrying;
                    }
                  });
  ASSERT_TRUE(win_exists);
  const auto graph = testmodel::parse_game_graph(read_file(a.dir + "/graph.txt"), a.golden);
  const auto seq = testmodel::generate_baseline_goals(graph).at(0);
  MctsConfig cfg = mcts::preset(mcts::Agent::KBE, mcts::Budget::iterations(2000));
  cfg.seed = 1;
  const auto ep = mcts::play_episode(level, a.golden, seq, cfg);
  EXPECT_EQ(ep.final_state.status, engine::Status::Win);
  EXPECT_EQ(ep.goals_completed, seq.goals.size());
}

TEST(Trajectory, TextRoundTrip) {
  const auto a = test::load("A");
  const auto level = a.level(2);
  const auto graph = testmodel::parse_game_graph(read_file(a.dir + "/graph.txt"), a.golden);
  const auto seq = testmodel::generate_baseline_goals(graph).at(0);
  MctsConfig cfg = mcts::preset(mcts::Agent::SP, mcts::Budget::iterations(50));
  cfg.seed = 3;
  const auto ep = mcts::play_episode(level, a.shipped, seq, cfg, {"A", "level2", "SP-MCTS"});
  const auto parsed = mcts::parse_trajectory(mcts::to_text(ep.trajectory));
  EXPECT_EQ(parsed.actions, ep.trajectory.actions);
  EXPECT_EQ(parsed.events_digest, ep.trajectory.events_digest);
  EXPECT_EQ(parsed.config_digest, mcts::config_digest(cfg));
  EXPECT_EQ(parsed.agent, "SP-MCTS");
  EXPECT_EQ(parsed.seed, 3u);
}

TEST(Config, PresetsAndNames) {
  EXPECT_EQ(mcts::parse_agent("FE"), mcts::Agent::FE);
  EXPECT_EQ(mcts::parse_agent("SP-MCTS"), mcts::Agent::SP);
  EXPECT_FALSE(mcts::parse_agent("XX"));
  EXPECT_TRUE(mcts::preset(mcts::Agent::FE).use_tree_reuse);
  EXPECT_DOUBLE_EQ(mcts::preset(mcts::Agent::SP).cp, 3.0);
  EXPECT_EQ(mcts::parse_budget("40ms"), mcts::Budget::millis(40));
  EXPECT_EQ(mcts::parse_budget("800it"), mcts::Budget::iterations(800));
  EXPECT_FALSE(mcts::parse_budget("0it"));
  EXPECT_FALSE(mcts::parse_budget("12s"));
  MctsConfig a;
  MctsConfig b;
  b.seed = 99;
  EXPECT_EQ(mcts::config_digest(a), mcts::config_digest(b));
  b.q = 0.3;
  EXPECT_NE(mcts::config_digest(a), mcts::config_digest(b));
}

}  // namespace
}  // namespace bugprobe
