#include "bugprobe/mcts/search.hpp"

#include <chrono>
#include <cmath>

#include "bugprobe/engine/state_key.hpp"
#include "bugprobe/engine/stepper.hpp"
#include "bugprobe/error.hpp"

namespace bugprobe::mcts {

using engine::Action;
using engine::kActionCount;
using engine::kAllActions;

bool is_terminal(const SimState& s, const Context& ctx) {
  return !s.game.running() || s.goal >= ctx.evaluator.goal_count() ||
         s.game.tick >= ctx.cap;
}

std::uint64_t key_of(const SimState& s) {
  return engine::state_key(s.game, s.test, static_cast<int>(s.goal));
}

double sim_step(SimState& s, Action a, const Context& ctx,
                std::vector<engine::InteractionEvent>& events) {
  engine::step_in_place(s.game, a, ctx.spec, events);
  const double r = ctx.evaluator.step_reward(s.test, events, s.goal);
  ctx.evaluator.try_advance(s.test, s.goal);
  return r;
}

double rollout(SimState s, const Context& ctx, const MctsConfig& cfg, Rng& rng) {
  std::vector<engine::InteractionEvent> events;
  double score = 0;
  double discount = 1;
  if (!cfg.use_boltzmann) {
    for (int k = 0; k < cfg.rollout_depth && !is_terminal(s, ctx); ++k) {
      const Action a = kAllActions[uniform_index(rng, kActionCount)];
      score += discount * sim_step(s, a, ctx, events);
      discount *= cfg.gamma;
    }
    return score;
  }
  std::array<SimState, kActionCount> next;
  std::array<double, kActionCount> values{};
  for (int k = 0; k < cfg.rollout_depth && !is_terminal(s, ctx); ++k) {
    for (std::size_t i = 0; i < kActionCount; ++i) {
      next[i] = s;
      values[i] = sim_step(next[i], kAllActions[i], ctx, events);
    }
    const auto p = boltzmann_probabilities(values, cfg.beta);
    const double u = uniform01(rng);
    std::size_t pick = kActionCount - 1;
    double acc = 0;
    for (std::size_t i = 0; i < kActionCount; ++i) {
      acc += p[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    score += discount * values[pick];
    discount *= cfg.gamma;
    s = std::move(next[pick]);
  }
  return score;
}

std::optional<std::int32_t> SearchTree::find(std::span<const Action> path) const {
  if (root == kNone) return std::nullopt;
  std::int32_t at = root;
  for (Action a : path) {
    at = nodes[static_cast<std::size_t>(at)].children[static_cast<std::size_t>(a)];
    if (at == kNone) return std::nullopt;
  }
  return at;
}

void SearchTree::advance(Action a) {
  if (root == kNone) return;
  root = nodes[static_cast<std::size_t>(root)].children[static_cast<std::size_t>(a)];
}

std::optional<StatEntry> fast_expansion_transfer(const SearchTree& prev,
                                                 std::span<const Action> path) {
  const auto node = prev.find(path);
  if (!node) return std::nullopt;
  const auto it = prev.tt.find(prev.nodes[static_cast<std::size_t>(*node)].key);
  if (it == prev.tt.end() || it->second.n == 0) return std::nullopt;
  return flatten(it->second);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

class Searcher {
 public:
  Searcher(const Context& ctx, const MctsConfig& cfg, const SearchTree* prev,
           Rng& rng, SearchResult& out)
      : ctx_(ctx), cfg_(cfg), prev_(cfg.use_tree_reuse ? prev : nullptr), rng_(rng),
        tree_(out.tree), stats_(out.stats) {}

  void init_root(const SimState& root) {
    SearchNode n;
    n.state = root;
    n.key = key_of(root);
    n.terminal = is_terminal(root, ctx_);
    n.untried = n.terminal ? 0 : 0x3F;
    if (prev_ != nullptr && !prev_->empty()) n.prev = prev_->root;
    tree_.nodes.push_back(std::move(n));
    tree_.root = 0;
    if (tree_.nodes[0].prev != kNone) transfer(0);
  }

  void iterate() {
    path_.clear();
    nodes_.clear();
    std::int32_t at = tree_.root;
    path_.push_back(node(at).key);
    nodes_.push_back(at);
    double acc = 0;
    double discount = 1;
    while (!node(at).terminal) {
      if (node(at).untried != 0) {
        const Action a = pick_untried(node(at).untried);
        const std::int32_t child = expand(at, a);
        acc += discount * node(child).edge_reward;
        discount *= cfg_.gamma;
        path_.push_back(node(child).key);
        nodes_.push_back(child);
        at = child;
        if (node(at).prev == kNone || !transfer(at)) break;
        continue;
      }
      at = select(at);
      acc += discount * node(at).edge_reward;
      discount *= cfg_.gamma;
      path_.push_back(node(at).key);
      nodes_.push_back(at);
    }
    double score = acc;
    if (!node(at).terminal) score += discount * rollout(node(at).state, ctx_, cfg_, rng_);
    score += cfg_.score_shift;
    tree_.bounds.observe(score);
    backpropagate(path_, score, tree_.tt);
    for (std::int32_t i : nodes_) ++node(i).visits;
  }

  // Most visited root edge. Edge visits rather than entry visits, since
  // siblings that reach one state share an entry.
  Action best_action() {
    const SearchNode& r = node(tree_.root);
    std::uint64_t best_n = 0;
    double best_mean = 0;
    candidates_.clear();
    for (std::size_t i = 0; i < kActionCount; ++i) {
      if (r.children[i] == kNone) continue;
      const SearchNode& c = node(r.children[i]);
      const double mean = tree_.tt.at(c.key).mean();
      const bool better = candidates_.empty() || c.visits > best_n ||
                          (c.visits == best_n && mean > best_mean);
      if (better) {
        candidates_.clear();
        best_n = c.visits;
        best_mean = mean;
      }
      if (better || (c.visits == best_n && mean == best_mean)) {
        candidates_.push_back(static_cast<std::int32_t>(i));
      }
    }
    return kAllActions[static_cast<std::size_t>(
        candidates_[uniform_index(rng_, candidates_.size())])];
  }

 private:
  SearchNode& node(std::int32_t i) { return tree_.nodes[static_cast<std::size_t>(i)]; }

  Action pick_untried(std::uint8_t mask) {
    int options[kActionCount];
    int n = 0;
    for (std::size_t i = 0; i < kActionCount; ++i) {
      if (mask & (1u << i)) options[n++] = static_cast<int>(i);
    }
    return kAllActions[static_cast<std::size_t>(
        options[uniform_index(rng_, static_cast<std::uint64_t>(n))])];
  }

  std::int32_t expand(std::int32_t parent, Action a) {
    const auto ai = static_cast<std::size_t>(a);
    SearchNode child;
    child.state = node(parent).state;
    child.edge_reward = sim_step(child.state, a, ctx_, events_);
    child.key = key_of(child.state);
    child.terminal = is_terminal(child.state, ctx_);
    child.untried = child.terminal ? 0 : 0x3F;
    const std::int32_t pp = node(parent).prev;
    if (pp != kNone) child.prev = prev_->nodes[static_cast<std::size_t>(pp)].children[ai];
    node(parent).untried &= static_cast<std::uint8_t>(~(1u << ai));
    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.push_back(std::move(child));
    node(parent).children[ai] = id;
    return id;
  }

  // Seeds the entry of node `at` from its previous-tree counterpart. False
  // when the previous tree holds no statistics for it.
  bool transfer(std::int32_t at) {
    const SearchNode& p = prev_->nodes[static_cast<std::size_t>(node(at).prev)];
    const auto it = prev_->tt.find(p.key);
    if (it == prev_->tt.end() || it->second.n == 0) return false;
    const std::uint64_t key = node(at).key;
    if (tree_.tt.count(key) != 0) return true;  // already known this generation
    StatEntry flat = flatten(it->second);
    flat.key = key;
    tree_.tt.emplace(key, flat);
    tree_.bounds.observe(flat.mean());
    tree_.bounds.observe(flat.max);
    if (cfg_.trace_transfers) stats_.transfers.push_back({key, it->second, flat});
    return true;
  }

  std::int32_t select(std::int32_t at) {
    const SearchNode& n = node(at);
    const std::uint64_t parent_n = std::max<std::uint64_t>(1, tree_.tt.at(n.key).n);
    const ScoreBounds identity;
    const ScoreBounds& bounds = cfg_.normalize ? tree_.bounds : identity;
    double best = -std::numeric_limits<double>::infinity();
    candidates_.clear();
    for (std::size_t i = 0; i < kActionCount; ++i) {
      const std::int32_t c = n.children[i];
      if (c == kNone) continue;
      const double v = uct_value(tree_.tt.at(node(c).key), parent_n, cfg_, bounds);
      if (v > best) {
        best = v;
        candidates_.clear();
      }
      if (v == best) candidates_.push_back(c);
    }
    return candidates_[uniform_index(rng_, candidates_.size())];
  }

  const Context& ctx_;
  const MctsConfig& cfg_;
  const SearchTree* prev_;
  Rng& rng_;
  SearchTree& tree_;
  SearchStats& stats_;
  std::vector<std::uint64_t> path_;
  std::vector<std::int32_t> nodes_;
  std::vector<std::int32_t> candidates_;
  std::vector<engine::InteractionEvent> events_;
};

}  // namespace

SearchResult search(const SimState& root, const Context& ctx, const MctsConfig& cfg,
                    const SearchTree* prev, Rng& rng) {
  const auto t0 = Clock::now();
  if (is_terminal(root, ctx)) {
    throw NoLegalActions("search called on a terminal state (tick " +
                         std::to_string(root.game.tick) + ")");
  }
  SearchResult out;
  if (cfg.budget.kind == Budget::Kind::Iterations) {
    out.tree.nodes.reserve(cfg.budget.amount + 1);
  }
  Searcher s(ctx, cfg, prev, rng, out);
  s.init_root(root);
  const double budget_ms = static_cast<double>(cfg.budget.amount);
  while (true) {
    const auto it0 = Clock::now();
    s.iterate();
    ++out.stats.iterations;
    out.stats.max_iteration_ms = std::max(out.stats.max_iteration_ms, ms_since(it0));
    if (cfg.budget.kind == Budget::Kind::Iterations) {
      if (out.stats.iterations >= cfg.budget.amount) break;
    } else if (ms_since(t0) >= budget_ms) {
      break;
    }
  }
  out.action = s.best_action();
  out.stats.elapsed_ms = ms_since(t0);
  return out;
}

}  // namespace bugprobe::mcts
