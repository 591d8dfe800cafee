#include "bugprobe/mcts/config.hpp"

#include <array>
#include <charconv>
#include <cstring>

#include "bugprobe/hash.hpp"

namespace bugprobe::mcts {

namespace {
constexpr std::array<std::string_view, 5> kAgentNames = {
    "KBE-MCTS", "FE-MCTS", "MM-MCTS", "BR-MCTS", "SP-MCTS"};

std::uint64_t bits(double v) {
  std::uint64_t out = 0;
  std::memcpy(&out, &v, sizeof out);
  return out;
}
}  // namespace

std::string Budget::text() const {
  return std::to_string(amount) + (kind == Kind::Millis ? "ms" : "it");
}

std::optional<Budget> parse_budget(std::string_view text) {
  if (text.size() < 3) return std::nullopt;
  const auto suffix = text.substr(text.size() - 2);
  const auto digits = text.substr(0, text.size() - 2);
  std::uint64_t amount = 0;
  const auto [end, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), amount);
  if (ec != std::errc{} || end != digits.data() + digits.size() || amount == 0) {
    return std::nullopt;
  }
  if (suffix == "it") return Budget::iterations(amount);
  if (suffix == "ms") return Budget::millis(amount);
  return std::nullopt;
}

std::string_view agent_name(Agent a) {
  return kAgentNames[static_cast<std::size_t>(a)];
}

std::optional<Agent> parse_agent(std::string_view name) {
  for (std::size_t i = 0; i < kAgentNames.size(); ++i) {
    const auto full = kAgentNames[i];
    if (name == full || name == full.substr(0, full.find('-'))) {
      return static_cast<Agent>(i);
    }
  }
  return std::nullopt;
}

MctsConfig preset(Agent a, Budget budget) {
  MctsConfig cfg;
  cfg.budget = budget;
  switch (a) {
    case Agent::KBE:
      break;
    case Agent::FE:
      cfg.use_tree_reuse = true;
      break;
    case Agent::MM:
      cfg.use_mixmax = true;
      break;
    case Agent::BR:
      cfg.use_boltzmann = true;
      break;
    case Agent::SP:
      cfg.use_sp_uct = true;
      cfg.cp = 3.0;
      break;
  }
  return cfg;
}

std::uint64_t config_digest(const MctsConfig& cfg) {
  Hasher h(0xbb67ae8584caa73bULL);
  h.add(bits(cfg.cp));
  h.add(bits(cfg.gamma));
  h.add(static_cast<std::uint64_t>(cfg.rollout_depth));
  h.add(static_cast<std::uint64_t>(cfg.budget.kind));
  h.add(cfg.budget.amount);
  h.add((std::uint64_t{cfg.use_tree_reuse} << 0) | (std::uint64_t{cfg.use_mixmax} << 1) |
        (std::uint64_t{cfg.use_boltzmann} << 2) | (std::uint64_t{cfg.use_sp_uct} << 3) |
        (std::uint64_t{cfg.normalize} << 4));
  h.add(bits(cfg.q));
  h.add(bits(cfg.beta));
  h.add(bits(cfg.d));
  h.add(static_cast<std::uint64_t>(cfg.sp_term));
  h.add(bits(cfg.score_shift));
  return h.value();
}

}  // namespace bugprobe::mcts
