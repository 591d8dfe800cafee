#pragma once

#include <string>

#include "bugprobe/mcts/search.hpp"
#include "bugprobe/mcts/trajectory.hpp"

namespace bugprobe::mcts {

struct Episode {
  Trajectory trajectory;
  engine::GameState final_state;
  testmodel::TestState test;
  std::size_t goals_completed = 0;
  std::uint64_t total_iterations = 0;
  double max_search_ms = 0;
  double max_iteration_ms = 0;
};

struct EpisodeLabels {
  std::string game_id;
  std::string level_id;
  std::string agent;
};

// search -> step -> record -> advance, until the game ends, the goals run
// out or the step cap is reached. The reuse tree is re-rooted at the played
// child between moves.
Episode play_episode(const engine::LevelMap& level, const engine::GameSpec& spec,
                     const testmodel::GoalSequence& seq, const MctsConfig& cfg,
                     const EpisodeLabels& labels = {});

}  // namespace bugprobe::mcts
