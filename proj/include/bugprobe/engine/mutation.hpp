#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bugprobe/engine/game_spec.hpp"

namespace bugprobe::engine {

enum class MutationKind : std::uint8_t {
  RemoveRule,
  AddRule,
  AlterRule,
  AlterTermination
};

std::string_view mutation_kind_name(MutationKind k);

// One injected bug, expressed relative to the golden spec.
//   removeRule:       `rule` names the golden rule to drop.
//   addRule:          `replacement` is inserted before golden rule `position`.
//   alterRule:        golden `rule` is replaced by `replacement` in place.
//   alterTermination: golden `termination` becomes `new_termination`.
struct BugMutation {
  std::string bug_id;
  MutationKind kind = MutationKind::RemoveRule;
  InteractionRule rule;
  InteractionRule replacement;
  std::size_t position = 0;
  TerminationRule termination;
  TerminationRule new_termination;
};

// Catalog file: one mutation per line, `bugId kind rule-spec`:
//   B1 removeRule avatar wall > blockMove
//   B2 addRule @0 avatar key use > destroyActee
//   B3 alterRule avatar door > winIfCarrying key => avatar door > overlapAllowed
//   B4 alterTermination count avatar 0 > lose => count avatar 0 > win
// Throws SyntaxError / UndeclaredClass / InvalidMutation (duplicate ids).
std::vector<BugMutation> parse_mutation_catalog(std::string_view text,
                                                const GameSpec& golden);
std::string to_text(const std::vector<BugMutation>& catalog,
                    const GameSpec& golden);

std::vector<std::string> bug_ids(const std::vector<BugMutation>& catalog);

// Builds the shipped spec. The result keeps the golden spec and per-rule
// attribution so the stepper can emit bug witnesses. An empty list returns a
// spec equal to `golden` with no mutation record.
// Throws ConflictingMutations when two mutations touch the same
// (actor, actee, trigger) slot or termination, InvalidMutation when a target is
// not in golden.
GameSpec apply_mutations(const GameSpec& golden,
                         const std::vector<BugMutation>& mutations);

// Inverse of apply_mutations, rebuilt from the shipped spec's delta record.
GameSpec revert_mutations(const GameSpec& shipped);

}  // namespace bugprobe::engine
