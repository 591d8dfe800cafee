#include "bugprobe/mcts/trajectory.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "bugprobe/error.hpp"
#include "bugprobe/hash.hpp"
#include "bugprobe/text.hpp"

namespace bugprobe::mcts {

namespace {

constexpr std::string_view kMagic = "# bugprobe-trajectory v1";

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_u64(std::string_view s, int base, int line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw SyntaxError(line, 1, "bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::uint64_t digest_events(
    const std::vector<std::vector<engine::InteractionEvent>>& per_step) {
  Hasher h(0x3c6ef372fe94f82bULL);
  h.add(per_step.size());
  for (const auto& step : per_step) {
    h.add(step.size());
    for (const auto& e : step) {
      h.add(e.tick);
      h.add((std::uint64_t{e.actor} << 32) | (std::uint64_t{e.actee} << 16) |
            (static_cast<std::uint64_t>(e.effect) << 8) |
            static_cast<std::uint64_t>(e.trigger));
      h.add((std::uint64_t{static_cast<std::uint16_t>(e.cell.x)} << 16) |
            static_cast<std::uint16_t>(e.cell.y));
      h.add(e.bug_witness.size());
      for (char c : e.bug_witness) h.add(static_cast<unsigned char>(c));
    }
  }
  return h.value();
}

std::string to_text(const Trajectory& t) {
  std::ostringstream os;
  os << kMagic << '\n'
     << "game " << t.game_id << '\n'
     << "level " << t.level_id << '\n'
     << "agent " << t.agent << '\n'
     << "config " << hex(t.config_digest) << '\n'
     << "seed " << t.seed << '\n'
     << "length " << t.actions.size() << '\n'
     << "events " << hex(t.events_digest) << '\n'
     << "---\n";
  for (auto a : t.actions) os << engine::action_name(a) << '\n';
  return os.str();
}

Trajectory parse_trajectory(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != kMagic) {
    throw SyntaxError(1, 1, "missing trajectory header");
  }
  Trajectory t;
  std::size_t i = 1;
  std::uint64_t length = 0;
  for (; i < lines.size() && lines[i] != "---"; ++i) {
    const int ln = static_cast<int>(i) + 1;
    const auto sp = lines[i].find(' ');
    if (sp == std::string_view::npos) throw SyntaxError(ln, 1, "expected 'KEY VALUE'");
    const auto key = lines[i].substr(0, sp);
    const auto value = lines[i].substr(sp + 1);
    if (key == "game") {
      t.game_id = value;
    } else if (key == "level") {
      t.level_id = value;
    } else if (key == "agent") {
      t.agent = value;
    } else if (key == "config") {
      t.config_digest = parse_u64(value, 16, ln);
    } else if (key == "seed") {
      t.seed = parse_u64(value, 10, ln);
    } else if (key == "length") {
      length = parse_u64(value, 10, ln);
    } else if (key == "events") {
      t.events_digest = parse_u64(value, 16, ln);
    } else {
      throw SyntaxError(ln, 1, "unknown header key '" + std::string(key) + "'");
    }
  }
  if (i >= lines.size()) throw SyntaxError(static_cast<int>(i), 1, "missing '---'");
  for (++i; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto a = engine::parse_action(lines[i]);
    if (!a) {
      throw SyntaxError(static_cast<int>(i) + 1, 1,
                        "unknown action '" + std::string(lines[i]) + "'");
    }
    t.actions.push_back(*a);
  }
  if (t.actions.size() != length) {
    throw SyntaxError(static_cast<int>(lines.size()), 1,
                      "header length " + std::to_string(length) + " but " +
                          std::to_string(t.actions.size()) + " actions");
  }
  return t;
}

}  // namespace bugprobe::mcts
