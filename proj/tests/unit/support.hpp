#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bugprobe/engine/game_spec.hpp"
#include "bugprobe/engine/level.hpp"
#include "bugprobe/engine/mutation.hpp"
#include "bugprobe/text.hpp"

namespace bugprobe::test {

inline std::string data_path(std::string_view rel) {
  return std::string(BUGPROBE_DATA_DIR) + "/" + std::string(rel);
}

struct Game {
  engine::GameSpec golden;
  std::vector<engine::BugMutation> catalog;
  engine::GameSpec shipped;

  engine::LevelMap level(int i) const {
    return engine::parse_level(
        read_file(dir + "/level" + std::to_string(i) + ".txt"), "level" + std::to_string(i),
        golden);
  }
  std::string dir;
};

inline Game load(std::string_view id) {
  Game g;
  g.dir = data_path("games/" + std::string(id));
  g.golden = engine::parse_game_spec(read_file(g.dir + "/game.txt"));
  g.catalog = engine::parse_mutation_catalog(read_file(g.dir + "/bugs.txt"), g.golden);
  g.shipped = engine::apply_mutations(g.golden, g.catalog);
  return g;
}

// Avatar, wall, key and door, with the bucket and fire of the water puzzle.
inline constexpr std::string_view kToySpec = R"(sprites:
  avatar avatar
  wall   wall
  key    key
  door   door
  bucket pushable
  fire   hazard
interactions:
  avatar wall   > blockMove
  avatar key    > collectItem key
  avatar door   > winIfCarrying key
  avatar fire   > destroyActor
  avatar bucket > pushActee
  bucket wall   > blockMove
  bucket fire   > destroyActee
terminations:
  count avatar 0 > lose
  touch door > win
levelmapping:
  w > wall
  k > key
  D > door
  b > bucket
  F > fire
  A > avatar
)";

inline engine::GameSpec toy_spec() { return engine::parse_game_spec(kToySpec); }

inline engine::LevelMap toy_level(std::string_view rows, const engine::GameSpec& spec) {
  return engine::parse_level(rows, "toy", spec);
}

}  // namespace bugprobe::test
