#include "bugprobe/engine/explore.hpp"

#include <algorithm>
#include <unordered_set>

#include "bugprobe/engine/stepper.hpp"
#include "bugprobe/error.hpp"
#include "bugprobe/hash.hpp"

namespace bugprobe::engine {

namespace {

struct Fingerprint {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  bool operator==(const Fingerprint&) const = default;
};

struct FingerprintHash {
  std::size_t operator()(const Fingerprint& f) const { return f.a; }
};

// Two independent seeded hashes over the tick-free state, ids included so
// that same-cell processing order is part of the identity.
Fingerprint fingerprint(const GameState& s) {
  Hasher h1(0x13198a2e03707344ULL);
  Hasher h2(0xa4093822299f31d0ULL);
  const auto add = [&](std::uint64_t w) {
    h1.add(w);
    h2.add(w);
  };
  add(s.sprites.size());
  for (const auto& sp : s.sprites) {
    add((std::uint64_t{sp.id} << 32) | (std::uint64_t{sp.cls} << 16));
    add((std::uint64_t{static_cast<std::uint16_t>(sp.cell.x)} << 16) |
        static_cast<std::uint16_t>(sp.cell.y));
  }
  add((static_cast<std::uint64_t>(s.orientation) << 8) |
      static_cast<std::uint64_t>(s.status));
  add(s.inventory.size());
  for (ClassId c : s.inventory) add(c);
  return {h1.value(), h2.value()};
}

}  // namespace

ExploreStats explore(const GameSpec& spec, const LevelMap& level,
                     const ExploreLimits& limits, const TransitionVisitor& visit) {
  ExploreStats stats;
  const int depth_limit =
      std::min<long long>(limits.max_depth, static_cast<long long>(episode_cap(level)));
  std::vector<GameState> frontier{initial_state(level, spec)};
  std::unordered_set<Fingerprint, FingerprintHash> seen{fingerprint(frontier[0])};
  std::vector<GameState> next;
  std::vector<InteractionEvent> events;
  for (int depth = 0; depth < depth_limit && !frontier.empty(); ++depth) {
    next.clear();
    for (const GameState& s : frontier) {
      if (!s.running()) continue;
      if (++stats.expanded > limits.max_expansions) {
        throw BudgetExceeded("state exploration passed " +
                             std::to_string(limits.max_expansions) +
                             " expansions at depth " + std::to_string(depth));
      }
      for (Action a : kAllActions) {
        GameState child = s;
        step_in_place(child, a, spec, events);
        visit(s, a, events);
        if (seen.insert(fingerprint(child)).second) next.push_back(std::move(child));
      }
    }
    stats.depth_reached = depth + 1;
    frontier.swap(next);
  }
  stats.distinct = seen.size();
  return stats;
}

}  // namespace bugprobe::engine
