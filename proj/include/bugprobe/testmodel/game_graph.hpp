#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bugprobe/engine/game_spec.hpp"
#include "bugprobe/engine/level.hpp"
#include "bugprobe/testmodel/goal.hpp"

namespace bugprobe::testmodel {

struct GraphEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  Matcher interaction;
};

// Story graph: nodes are progress states, an edge fires on an interaction.
struct GameGraph {
  std::vector<std::string> nodes;
  std::size_t start = 0;
  std::vector<std::size_t> accepting;
  std::vector<GraphEdge> edges;

  bool is_accepting(std::size_t node) const;
};

// Graph file:
//   start NAME
//   accept NAME          (one or more)
//   FROM MATCHER TO      (one per edge)
// Throws SyntaxError, UndeclaredClass, InvalidSpec.
GameGraph parse_game_graph(std::string_view text, const engine::GameSpec& spec);

enum class Coverage : std::uint8_t { AllEdges, AllPaths };

struct CoverageOptions {
  Coverage kind = Coverage::AllEdges;
  std::size_t max_path_length = 8;  // all-paths only
};

// Edge-index paths from start to an accepting node. `seed` = 0 keeps the
// declared edge order; any other value shuffles tie-breaks.
// Throws UnreachableAccept.
std::vector<std::vector<std::size_t>> sample_paths(const GameGraph& graph,
                                                   const CoverageOptions& cov,
                                                   std::uint64_t seed);

// One sequence per path, one goal per edge (weight 1, criterion 1).
std::vector<GoalSequence> generate_baseline_goals(const GameGraph& graph,
                                                  const CoverageOptions& cov = {});

// Paths as above with a probe goal before each path goal. Probes exercise
// unintended transitions: attacking the next edge's target, bumping a locked
// door before holding its key, and random bump/attack/push probes over the
// level's sprite set. Probes that never occur on `golden` within a bounded
// search from the level's start are dropped.
std::vector<GoalSequence> generate_synthetic_goals(const GameGraph& graph,
                                                   const engine::GameSpec& golden,
                                                   const engine::LevelMap& level,
                                                   const CoverageOptions& cov,
                                                   std::uint64_t seed);

}  // namespace bugprobe::testmodel
