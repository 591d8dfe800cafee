#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bugprobe::mcts {

struct Budget {
  enum class Kind : std::uint8_t { Iterations, Millis };
  Kind kind = Kind::Iterations;
  std::uint64_t amount = 1000;

  static Budget iterations(std::uint64_t n) { return {Kind::Iterations, n}; }
  static Budget millis(std::uint64_t ms) { return {Kind::Millis, ms}; }
  std::string text() const;  // "800it", "40ms"
  bool operator==(const Budget&) const = default;
};

// Inverse of Budget::text; the amount must be positive.
std::optional<Budget> parse_budget(std::string_view text);

enum class SpTerm : std::uint8_t {
  MeanLinear,       // sum x^2 - n_i * mean + D
  VarianceCorrect   // sum x^2 - n_i * mean^2 + D
};

struct MctsConfig {
  double cp = 0.95;
  double gamma = 0.95;
  int rollout_depth = 6;
  Budget budget;
  bool use_tree_reuse = false;
  bool use_mixmax = false;
  bool use_boltzmann = false;
  bool use_sp_uct = false;
  double q = 0.25;
  double beta = 0.5;
  double d = 10000.0;
  SpTerm sp_term = SpTerm::MeanLinear;
  std::uint64_t seed = 0;
  // Scale exploitation by the running score range of the current search.
  bool normalize = true;
  // Added to every backpropagated score. Test hook for argmax invariance.
  double score_shift = 0.0;
  // Keep a log of fast-expansion transfers in the search result.
  bool trace_transfers = false;

  bool operator==(const MctsConfig&) const = default;
};

enum class Agent : std::uint8_t { KBE, FE, MM, BR, SP };

std::string_view agent_name(Agent a);  // "KBE-MCTS", ...
std::optional<Agent> parse_agent(std::string_view name);  // "KBE" or "KBE-MCTS"

// Every agent uses transpositions and KBE; FE adds tree reuse, MM MixMax,
// BR Boltzmann rollouts and SP the SP-UCT term with Cp = 3.0.
MctsConfig preset(Agent a, Budget budget = {});

// Stable digest of every field except the seed.
std::uint64_t config_digest(const MctsConfig& cfg);

}  // namespace bugprobe::mcts
