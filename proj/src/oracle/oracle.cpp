#include "bugprobe/oracle/oracle.hpp"

#include <charconv>
#include <sstream>

#include "bugprobe/engine/explore.hpp"
#include "bugprobe/engine/stepper.hpp"
#include "bugprobe/error.hpp"
#include "bugprobe/text.hpp"

namespace bugprobe::oracle {

std::set<std::string> BugReport::witnessed() const {
  std::set<std::string> out;
  for (const auto& [id, tick] : first_witness_tick) out.insert(id);
  return out;
}

BugReport collect_witnesses(
    std::string trajectory_ref,
    const std::vector<std::vector<engine::InteractionEvent>>& per_step) {
  BugReport r;
  r.trajectory_ref = std::move(trajectory_ref);
  r.sequence_length = per_step.size();
  for (const auto& step : per_step) {
    for (const auto& e : step) {
      if (e.has_witness()) r.first_witness_tick.emplace(e.bug_witness, e.tick);
    }
  }
  return r;
}

BugReport replay_and_detect(const mcts::Trajectory& traj,
                            const engine::GameSpec& shipped,
                            const engine::LevelMap& level,
                            std::string trajectory_ref) {
  engine::GameState state = engine::initial_state(level, shipped);
  std::vector<std::vector<engine::InteractionEvent>> per_step;
  per_step.reserve(traj.actions.size());
  std::vector<engine::InteractionEvent> events;
  for (std::size_t i = 0; i < traj.actions.size(); ++i) {
    if (!state.running()) {
      throw TrajectoryMismatch("game ended at step " + std::to_string(i) + " of " +
                               std::to_string(traj.actions.size()));
    }
    engine::step_in_place(state, traj.actions[i], shipped, events);
    if (!traj.per_step_events.empty() &&
        (i >= traj.per_step_events.size() || traj.per_step_events[i] != events)) {
      throw TrajectoryMismatch("events diverge at step " + std::to_string(i));
    }
    per_step.push_back(events);
  }
  if (!traj.per_step_events.empty() &&
      traj.per_step_events.size() != per_step.size()) {
    throw TrajectoryMismatch("recorded events cover " +
                             std::to_string(traj.per_step_events.size()) +
                             " steps, replay " + std::to_string(per_step.size()));
  }
  if (traj.events_digest != 0 && mcts::digest_events(per_step) != traj.events_digest) {
    throw TrajectoryMismatch("event digest differs from the recorded trajectory");
  }
  return collect_witnesses(std::move(trajectory_ref), per_step);
}

std::set<std::string> reachable_bugs(const engine::GameSpec& shipped,
                                     const engine::LevelMap& level, int max_depth,
                                     std::size_t max_expansions) {
  std::set<std::string> found;
  engine::explore(shipped, level, {max_depth, max_expansions},
                  [&](const engine::GameState&, engine::Action,
                      const std::vector<engine::InteractionEvent>& events) {
                    for (const auto& e : events) {
                      if (e.has_witness()) found.insert(e.bug_witness);
                    }
                  });
  return found;
}

BugStats aggregate_bug_stats(const std::vector<BugReport>& reports,
                             const std::vector<std::string>& catalog) {
  if (catalog.empty()) throw EmptyCatalog("bug catalog is empty");
  const std::set<std::string> ids(catalog.begin(), catalog.end());
  const double n = static_cast<double>(ids.size());
  BugStats stats;
  std::set<std::string> all;
  for (const auto& r : reports) {
    std::size_t mine = 0;
    for (const auto& [id, tick] : r.first_witness_tick) {
      if (ids.count(id) == 0) continue;
      ++mine;
      all.insert(id);
    }
    stats.individual_pcts.push_back(100.0 * static_cast<double>(mine) / n);
  }
  stats.combined_pct = 100.0 * static_cast<double>(all.size()) / n;
  return stats;
}

std::string to_text(const BugReport& r) {
  std::string out = "trajectory=" + r.trajectory_ref +
                    "\tlength=" + std::to_string(r.sequence_length) + "\twitnessed=";
  bool first = true;
  for (const auto& [id, tick] : r.first_witness_tick) {
    if (!first) out += ',';
    first = false;
    out += id + '@' + std::to_string(tick);
  }
  return out;
}

std::string to_text(const std::vector<BugReport>& reports) {
  std::string out;
  for (const auto& r : reports) out += to_text(r) + '\n';
  return out;
}

std::vector<BugReport> parse_bug_reports(std::string_view text) {
  std::vector<BugReport> out;
  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int ln = static_cast<int>(li) + 1;
    std::string_view line = lines[li];
    if (line.empty()) continue;
    BugReport r;
    int fields = 0;
    while (!line.empty()) {
      const auto tab = line.find('\t');
      const auto field = line.substr(0, tab);
      line = tab == std::string_view::npos ? std::string_view{} : line.substr(tab + 1);
      const auto eq = field.find('=');
      if (eq == std::string_view::npos) throw SyntaxError(ln, 1, "expected KEY=VALUE");
      const auto key = field.substr(0, eq);
      const auto value = field.substr(eq + 1);
      if (key == "trajectory") {
        r.trajectory_ref = value;
      } else if (key == "length") {
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                       r.sequence_length);
        if (ec != std::errc{} || p != value.data() + value.size()) {
          throw SyntaxError(ln, 1, "bad length");
        }
      } else if (key == "witnessed") {
        std::string_view rest = value;
        while (!rest.empty()) {
          const auto comma = rest.find(',');
          const auto item = rest.substr(0, comma);
          rest = comma == std::string_view::npos ? std::string_view{}
                                                 : rest.substr(comma + 1);
          const auto at = item.rfind('@');
          if (at == std::string_view::npos || at == 0) {
            throw SyntaxError(ln, 1, "expected ID@TICK");
          }
          std::uint32_t tick = 0;
          const auto t = item.substr(at + 1);
          auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), tick);
          if (ec != std::errc{} || p != t.data() + t.size() || t.empty()) {
            throw SyntaxError(ln, 1, "bad tick");
          }
          r.first_witness_tick.emplace(std::string(item.substr(0, at)), tick);
        }
      } else {
        throw SyntaxError(ln, 1, "unknown field '" + std::string(key) + "'");
      }
      ++fields;
    }
    if (fields != 3) throw SyntaxError(ln, 1, "expected three fields");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace bugprobe::oracle
