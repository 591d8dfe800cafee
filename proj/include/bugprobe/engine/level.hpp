#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bugprobe/engine/game_spec.hpp"

namespace bugprobe::engine {

// A plain ASCII grid, one row per line. '.' is an empty cell; every other
// character must appear in the spec's level mapping.
struct LevelMap {
  std::string id;
  int width = 0;
  int height = 0;
  std::vector<std::string> rows;

  char at(int x, int y) const {
    return rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
  }
};

// Parses and validates against `spec`. Throws InvalidLevel.
LevelMap parse_level(std::string_view text, std::string id,
                     const GameSpec& spec);

// Rows count, character mapping, a single avatar and a wall border.
void validate_level(const LevelMap& level, const GameSpec& spec);

std::string to_text(const LevelMap& level);

}  // namespace bugprobe::engine
