#include "bugprobe/mcts/episode.hpp"

#include <algorithm>

namespace bugprobe::mcts {

Episode play_episode(const engine::LevelMap& level, const engine::GameSpec& spec,
                     const testmodel::GoalSequence& seq, const MctsConfig& cfg,
                     const EpisodeLabels& labels) {
  const testmodel::GoalEvaluator evaluator(seq, level, spec);
  const Context ctx(spec, level, evaluator);
  Rng rng(cfg.seed);

  Episode ep;
  ep.trajectory.game_id = labels.game_id;
  ep.trajectory.level_id = labels.level_id;
  ep.trajectory.agent = labels.agent;
  ep.trajectory.seed = cfg.seed;
  ep.trajectory.config_digest = config_digest(cfg);

  SimState state{engine::initial_state(level, spec), {}, seq.active_index};
  SearchTree reuse;
  std::vector<engine::InteractionEvent> events;
  while (!is_terminal(state, ctx)) {
    SearchResult r = search(state, ctx, cfg, cfg.use_tree_reuse ? &reuse : nullptr, rng);
    ep.total_iterations += r.stats.iterations;
    ep.max_search_ms = std::max(ep.max_search_ms, r.stats.elapsed_ms);
    ep.max_iteration_ms = std::max(ep.max_iteration_ms, r.stats.max_iteration_ms);
    sim_step(state, r.action, ctx, events);
    ep.trajectory.actions.push_back(r.action);
    ep.trajectory.per_step_events.push_back(events);
    if (cfg.use_tree_reuse) {
      reuse = std::move(r.tree);
      reuse.advance(r.action);
    }
  }
  ep.trajectory.events_digest = digest_events(ep.trajectory.per_step_events);
  ep.final_state = state.game;
  ep.test = state.test;
  ep.goals_completed = state.goal;
  return ep;
}

}  // namespace bugprobe::mcts
