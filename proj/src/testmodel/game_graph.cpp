#include "bugprobe/testmodel/game_graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>

#include "bugprobe/engine/explore.hpp"
#include "bugprobe/error.hpp"
#include "bugprobe/rng.hpp"
#include "bugprobe/testmodel/evaluator.hpp"
#include "bugprobe/text.hpp"

namespace bugprobe::testmodel {

bool GameGraph::is_accepting(std::size_t node) const {
  return std::find(accepting.begin(), accepting.end(), node) != accepting.end();
}

GameGraph parse_game_graph(std::string_view text, const engine::GameSpec& spec) {
  GameGraph g;
  std::map<std::string, std::size_t> ids;
  const auto node = [&](const std::string& name) {
    const auto [it, fresh] = ids.emplace(name, g.nodes.size());
    if (fresh) g.nodes.push_back(name);
    return it->second;
  };
  std::optional<std::size_t> start;
  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int line_no = static_cast<int>(li) + 1;
    const auto tokens = engine::tokenize(strip_comment(lines[li]));
    if (tokens.empty()) continue;
    try {
      if (tokens[0].text == "start" && tokens.size() == 2) {
        if (start) throw SyntaxError(line_no, tokens[0].col, "second start node");
        start = node(tokens[1].text);
      } else if (tokens[0].text == "accept" && tokens.size() == 2) {
        g.accepting.push_back(node(tokens[1].text));
      } else if (tokens.size() == 3) {
        GraphEdge e;
        e.from = node(tokens[0].text);
        e.interaction = parse_matcher(tokens[1].text, spec);
        e.to = node(tokens[2].text);
        g.edges.push_back(e);
      } else {
        throw SyntaxError(line_no, tokens[0].col,
                          "expected 'start N', 'accept N' or 'FROM MATCHER TO'");
      }
    } catch (const UndeclaredClass& e) {
      throw UndeclaredClass(e.name(), line_no);
    } catch (const InvalidSpec& e) {
      throw SyntaxError(line_no, tokens[0].col, e.what());
    }
  }
  if (!start) throw InvalidSpec("graph has no start node");
  if (g.accepting.empty()) throw InvalidSpec("graph has no accepting node");
  g.start = *start;
  return g;
}

namespace {

// Outgoing edge indices per node, optionally shuffled.
std::vector<std::vector<std::size_t>> adjacency(const GameGraph& g, Rng* rng) {
  std::vector<std::vector<std::size_t>> out(g.nodes.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) out[g.edges[i].from].push_back(i);
  if (rng != nullptr) {
    for (auto& a : out) shuffle_range(a.begin(), a.end(), *rng);
  }
  return out;
}

// Shortest edge path from `from` to any node satisfying `goal`.
template <typename Goal>
std::optional<std::vector<std::size_t>> shortest(
    const GameGraph& g, const std::vector<std::vector<std::size_t>>& adj,
    std::size_t from, Goal goal) {
  std::vector<std::optional<std::size_t>> via(g.nodes.size());
  std::vector<char> seen(g.nodes.size(), 0);
  std::deque<std::size_t> queue{from};
  seen[from] = 1;
  while (!queue.empty()) {
    const std::size_t n = queue.front();
    queue.pop_front();
    if (goal(n)) {
      std::vector<std::size_t> path;
      for (std::size_t at = n; via[at]; at = g.edges[*via[at]].from) {
        path.push_back(*via[at]);
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (std::size_t e : adj[n]) {
      const std::size_t to = g.edges[e].to;
      if (!seen[to]) {
        seen[to] = 1;
        via[to] = e;
        queue.push_back(to);
      }
    }
  }
  return std::nullopt;
}

void all_paths(const GameGraph& g, const std::vector<std::vector<std::size_t>>& adj,
               std::size_t at, std::size_t cap, std::vector<char>& on_path,
               std::vector<std::size_t>& path,
               std::vector<std::vector<std::size_t>>& out) {
  if (g.is_accepting(at) && !path.empty()) out.push_back(path);
  if (path.size() >= cap) return;
  for (std::size_t e : adj[at]) {
    const std::size_t to = g.edges[e].to;
    if (on_path[to]) continue;
    on_path[to] = 1;
    path.push_back(e);
    all_paths(g, adj, to, cap, on_path, path, out);
    path.pop_back();
    on_path[to] = 0;
  }
}

GoalSequence sequence_from(std::string name, std::vector<TestGoal> goals) {
  GoalSequence s;
  s.name = std::move(name);
  s.goals = std::move(goals);
  return s;
}

TestGoal edge_goal(const GraphEdge& e) {
  TestGoal g;
  g.features.push_back({e.interaction, 1.0, Rational{1, 1}});
  return g;
}

}  // namespace

std::vector<std::vector<std::size_t>> sample_paths(const GameGraph& graph,
                                                   const CoverageOptions& cov,
                                                   std::uint64_t seed) {
  Rng rng(seed);
  const auto adj = adjacency(graph, seed == 0 ? nullptr : &rng);
  std::vector<std::vector<std::size_t>> paths;
  if (cov.kind == Coverage::AllPaths) {
    std::vector<char> on_path(graph.nodes.size(), 0);
    on_path[graph.start] = 1;
    std::vector<std::size_t> path;
    all_paths(graph, adj, graph.start, cov.max_path_length, on_path, path, paths);
  } else {
    std::vector<std::size_t> order(graph.edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (seed != 0) shuffle_range(order.begin(), order.end(), rng);
    std::vector<char> covered(graph.edges.size(), 0);
    const auto accepting = [&](std::size_t n) { return graph.is_accepting(n); };
    for (std::size_t e : order) {
      if (covered[e]) continue;
      const auto& edge = graph.edges[e];
      auto head = shortest(graph, adj, graph.start,
                           [&](std::size_t n) { return n == edge.from; });
      auto tail = shortest(graph, adj, edge.to, accepting);
      if (!head || !tail) continue;
      std::vector<std::size_t> path = std::move(*head);
      path.push_back(e);
      path.insert(path.end(), tail->begin(), tail->end());
      for (std::size_t p : path) covered[p] = 1;
      if (std::find(paths.begin(), paths.end(), path) == paths.end()) {
        paths.push_back(std::move(path));
      }
    }
  }
  if (paths.empty()) {
    throw UnreachableAccept("no path from '" + graph.nodes[graph.start] +
                            "' reaches an accepting node");
  }
  return paths;
}

std::vector<GoalSequence> generate_baseline_goals(const GameGraph& graph,
                                                  const CoverageOptions& cov) {
  std::vector<GoalSequence> out;
  for (const auto& path : sample_paths(graph, cov, 0)) {
    std::vector<TestGoal> goals;
    for (std::size_t e : path) goals.push_back(edge_goal(graph.edges[e]));
    out.push_back(sequence_from("baseline-" + std::to_string(out.size()),
                                std::move(goals)));
  }
  return out;
}

namespace {

constexpr int kProbeDepth = 40;
constexpr std::size_t kProbeExpansions = 200'000;
constexpr std::size_t kRandomProbes = 2;

// Interactions that occur on the golden game from the level's start.
std::set<InteractionKey> observed_interactions(const engine::GameSpec& golden,
                                               const engine::LevelMap& level) {
  std::set<InteractionKey> seen;
  try {
    engine::explore(golden, level, {kProbeDepth, kProbeExpansions},
                    [&](const engine::GameState&, engine::Action,
                        const std::vector<InteractionEvent>& events) {
                      for (const auto& e : events) seen.insert(key_of(e));
                    });
  } catch (const BudgetExceeded&) {
    // A partial sample still bounds feasibility from below.
  }
  return seen;
}

bool feasible(const Feature& f, const std::set<InteractionKey>& seen,
              const engine::LevelMap& level, const engine::GameSpec& golden) {
  std::set<engine::Cell> cells;
  for (const auto& k : seen) {
    if (!f.matcher.matches(k)) continue;
    if (!f.matcher.per_instance) return true;
    cells.insert(k.cell);
  }
  return f.matcher.per_instance &&
         static_cast<std::int64_t>(cells.size()) >=
             feature_target(f, feature_instances(f, level, golden));
}

Feature probe(std::optional<ClassId> actor, ClassId actee,
              std::optional<Effect> effect, bool any_use, bool each,
              Rational criterion) {
  Feature f;
  f.matcher.actor = actor;
  f.matcher.actee = actee;
  f.matcher.effect = effect;
  f.matcher.any_use = any_use;
  f.matcher.per_instance = each;
  f.criterion = criterion;
  return f;
}

std::vector<Feature> probe_pool(const engine::GameSpec& golden,
                                const engine::LevelMap& level, Rng& rng) {
  std::set<ClassId> present;
  for (const auto& [ch, classes] : golden.level_mapping()) {
    bool used = false;
    for (const auto& row : level.rows) used = used || row.find(ch) != std::string::npos;
    if (used) present.insert(classes.begin(), classes.end());
  }
  const ClassId avatar = golden.avatar();
  std::vector<Feature> pool;
  // Per-instance probes ask for a few instances (2 or 3), whatever N is.
  const auto pick = [&](ClassId c) {
    Feature f;
    f.matcher.per_instance = true;
    f.matcher.actee = c;
    const std::int64_t n = feature_instances(f, level, golden);
    const std::int64_t k = std::min<std::int64_t>(n, 2 + static_cast<std::int64_t>(
                                                          uniform_index(rng, 2)));
    return parse_rational(std::to_string(k) + '/' + std::to_string(std::max<std::int64_t>(n, 1)));
  };
  for (ClassId c : present) {
    switch (golden.kind(c)) {
      case engine::SpriteKind::Wall:
        pool.push_back(probe(avatar, c, Effect::BlockMove, false, true, pick(c)));
        pool.push_back(probe(avatar, c, std::nullopt, true, true, pick(c)));
        break;
      case engine::SpriteKind::Pushable:
        for (ClassId d : present) {
          if (d != c && d != avatar) {
            pool.push_back(probe(c, d, std::nullopt, false, false, Rational{1, 1}));
          }
        }
        break;
      case engine::SpriteKind::Door:
        pool.push_back(probe(avatar, c, std::nullopt, true, false, Rational{1, 1}));
        break;
      default:
        break;
    }
  }
  return pool;
}

// The avatar's move rule on the edge's actee when it has `effect`.
std::optional<engine::InteractionRule> rule_on(const engine::GameSpec& golden,
                                               const Matcher& m, Effect effect) {
  if (!m.actee || *m.actee == engine::kNoClass) return std::nullopt;
  const int r = golden.first_rule(golden.avatar(), *m.actee, engine::Trigger::Move);
  if (r < 0) return std::nullopt;
  const auto& rule = golden.interactions()[static_cast<std::size_t>(r)];
  if (rule.effect != effect) return std::nullopt;
  return rule;
}

void add_unique(std::vector<Feature>& features, const Feature& f) {
  const bool dup = std::any_of(features.begin(), features.end(), [&](const Feature& g) {
    return g.matcher == f.matcher;
  });
  if (!dup) features.push_back(f);
}

}  // namespace

std::vector<GoalSequence> generate_synthetic_goals(const GameGraph& graph,
                                                   const engine::GameSpec& golden,
                                                   const engine::LevelMap& level,
                                                   const CoverageOptions& cov,
                                                   std::uint64_t seed) {
  Rng rng(seed ^ 0x5be0cd19137e2179ULL);
  const auto paths = sample_paths(graph, cov, seed == 0 ? 1 : seed);
  const auto seen = observed_interactions(golden, level);
  const auto pool = probe_pool(golden, level, rng);
  const ClassId avatar = golden.avatar();

  std::vector<GoalSequence> out;
  for (const auto& path : paths) {
    // A locked door is bumped just before its key is collected, or at the
    // start when the path never collects it.
    std::vector<std::vector<ClassId>> locked_before(path.size());
    for (std::size_t j = 0; j < path.size(); ++j) {
      const auto door = rule_on(golden, graph.edges[path[j]].interaction,
                                Effect::WinIfCarrying);
      if (!door) continue;
      std::size_t at = 0;
      for (std::size_t i = 0; i < j; ++i) {
        const auto collect = rule_on(golden, graph.edges[path[i]].interaction,
                                     Effect::CollectItem);
        if (collect && collect->arg == door->arg) {
          at = i;
          break;
        }
      }
      locked_before[at].push_back(door->actee);
    }
    std::vector<TestGoal> goals;
    for (std::size_t j = 0; j < path.size(); ++j) {
      const GraphEdge& edge = graph.edges[path[j]];
      std::vector<Feature> probes;
      const auto& target = edge.interaction.actee;
      if (target && *target != engine::kNoClass && *target != avatar) {
        add_unique(probes, probe(avatar, *target, std::nullopt, true, false, {1, 1}));
      }
      for (ClassId door : locked_before[j]) {
        add_unique(probes, probe(avatar, door, Effect::BlockMove, false, false, {1, 1}));
      }
      for (std::size_t k = 0; k < kRandomProbes && !pool.empty(); ++k) {
        add_unique(probes, pool[uniform_index(rng, pool.size())]);
      }
      std::erase_if(probes, [&](const Feature& f) {
        return !feasible(f, seen, level, golden);
      });
      if (!probes.empty()) {
        TestGoal g;
        g.features = std::move(probes);
        goals.push_back(std::move(g));
      }
      goals.push_back(edge_goal(edge));
    }
    out.push_back(sequence_from("synthetic-" + std::to_string(out.size()),
                                std::move(goals)));
  }
  return out;
}

}  // namespace bugprobe::testmodel
