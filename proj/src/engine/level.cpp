#include "bugprobe/engine/level.hpp"

#include "bugprobe/error.hpp"
#include "bugprobe/text.hpp"

namespace bugprobe::engine {

namespace {

const std::vector<ClassId>* classes_at(const GameSpec& spec, char ch) {
  static const std::vector<ClassId> kEmpty;
  if (ch == '.') return &kEmpty;
  const auto it = spec.level_mapping().find(ch);
  return it == spec.level_mapping().end() ? nullptr : &it->second;
}

}  // namespace

LevelMap parse_level(std::string_view text, std::string id,
                     const GameSpec& spec) {
  LevelMap level;
  level.id = std::move(id);
  for (auto line : split_lines(text)) {
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    if (line.empty()) continue;
    level.rows.emplace_back(line);
  }
  level.height = static_cast<int>(level.rows.size());
  level.width = level.rows.empty() ? 0 : static_cast<int>(level.rows[0].size());
  validate_level(level, spec);
  return level;
}

void validate_level(const LevelMap& level, const GameSpec& spec) {
  if (level.width <= 0 || level.height <= 0) {
    throw InvalidLevel("level " + level.id + " is empty");
  }
  if (level.width > 127 || level.height > 127) {
    throw InvalidLevel("level " + level.id + " exceeds 127 cells per side");
  }
  if (static_cast<int>(level.rows.size()) != level.height) {
    throw InvalidLevel("level " + level.id + ": row count differs from height");
  }
  int avatars = 0;
  for (int y = 0; y < level.height; ++y) {
    const auto& row = level.rows[static_cast<std::size_t>(y)];
    if (static_cast<int>(row.size()) != level.width) {
      throw InvalidLevel("level " + level.id + ": row " + std::to_string(y + 1) +
                         " has length " + std::to_string(row.size()) +
                         ", expected " + std::to_string(level.width));
    }
    for (int x = 0; x < level.width; ++x) {
      const char ch = row[static_cast<std::size_t>(x)];
      const auto* classes = classes_at(spec, ch);
      if (classes == nullptr) {
        throw InvalidLevel("level " + level.id + ": unmapped character '" +
                           std::string(1, ch) + "' at row " +
                           std::to_string(y + 1));
      }
      bool wall = false;
      for (ClassId c : *classes) {
        if (c == spec.avatar()) ++avatars;
        if (spec.kind(c) == SpriteKind::Wall) wall = true;
      }
      const bool border =
          x == 0 || y == 0 || x == level.width - 1 || y == level.height - 1;
      if (border && !wall) {
        throw InvalidLevel("level " + level.id + ": border cell (" +
                           std::to_string(x) + "," + std::to_string(y) +
                           ") is not a wall");
      }
    }
  }
  if (avatars != 1) {
    throw InvalidLevel("level " + level.id + ": expected exactly one avatar, found " +
                       std::to_string(avatars));
  }
}

std::string to_text(const LevelMap& level) {
  std::string out;
  for (const auto& row : level.rows) {
    out += row;
    out += '\n';
  }
  return out;
}

}  // namespace bugprobe::engine
