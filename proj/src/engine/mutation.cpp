#include "bugprobe/engine/mutation.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "bugprobe/error.hpp"
#include "bugprobe/text.hpp"

namespace bugprobe::engine {

namespace {

constexpr std::array<std::string_view, 4> kKindNames = {
    "removeRule", "addRule", "alterRule", "alterTermination"};

std::size_t find_rule(const GameSpec& golden, const InteractionRule& rule,
                      const std::string& bug) {
  const auto& rules = golden.interactions();
  const auto it = std::find(rules.begin(), rules.end(), rule);
  if (it == rules.end()) {
    throw InvalidMutation(bug + ": rule '" + rule_text(golden, rule) +
                          "' is not in the golden spec");
  }
  return static_cast<std::size_t>(it - rules.begin());
}

std::size_t find_termination(const GameSpec& golden, const TerminationRule& t,
                             const std::string& bug) {
  const auto& terms = golden.terminations();
  const auto it = std::find(terms.begin(), terms.end(), t);
  if (it == terms.end()) {
    throw InvalidMutation(bug + ": termination '" + termination_text(golden, t) +
                          "' is not in the golden spec");
  }
  return static_cast<std::size_t>(it - terms.begin());
}

// Splits `tokens` at the first "=>".
std::pair<std::span<const Token>, std::span<const Token>> split_arrow(
    std::span<const Token> tokens, int line) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].text == "=>") {
      return {tokens.subspan(0, i), tokens.subspan(i + 1)};
    }
  }
  throw SyntaxError(line, tokens.empty() ? 1 : tokens.front().col,
                    "expected 'OLD => NEW'");
}

}  // namespace

std::string_view mutation_kind_name(MutationKind k) {
  return kKindNames[static_cast<std::size_t>(k)];
}

std::vector<BugMutation> parse_mutation_catalog(std::string_view text,
                                                const GameSpec& golden) {
  std::vector<BugMutation> out;
  std::set<std::string> ids;
  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int line_no = static_cast<int>(li) + 1;
    std::string_view line = lines[li];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 3) {
      throw SyntaxError(line_no, tokens[0].col, "expected 'bugId kind rule-spec'");
    }
    BugMutation m;
    m.bug_id = tokens[0].text;
    if (!ids.insert(m.bug_id).second) {
      throw InvalidMutation("line " + std::to_string(line_no) +
                            ": duplicate bug id '" + m.bug_id + "'");
    }
    const auto kind_it =
        std::find(kKindNames.begin(), kKindNames.end(), tokens[1].text);
    if (kind_it == kKindNames.end()) {
      throw SyntaxError(line_no, tokens[1].col,
                        "unknown mutation kind '" + tokens[1].text + "'");
    }
    m.kind = static_cast<MutationKind>(kind_it - kKindNames.begin());
    std::span<const Token> body(tokens.data() + 2, tokens.size() - 2);
    const auto& classes = golden.sprites();
    switch (m.kind) {
      case MutationKind::RemoveRule:
        m.rule = parse_rule_tokens(body, classes, line_no);
        break;
      case MutationKind::AddRule: {
        const auto& pos = body.front().text;
        if (pos.size() < 2 || pos[0] != '@') {
          throw SyntaxError(line_no, body.front().col, "expected '@POSITION'");
        }
        auto [ptr, ec] = std::from_chars(pos.data() + 1, pos.data() + pos.size(),
                                         m.position);
        if (ec != std::errc{} || ptr != pos.data() + pos.size()) {
          throw SyntaxError(line_no, body.front().col, "bad position");
        }
        m.replacement = parse_rule_tokens(body.subspan(1), classes, line_no);
        break;
      }
      case MutationKind::AlterRule: {
        const auto [from, to] = split_arrow(body, line_no);
        m.rule = parse_rule_tokens(from, classes, line_no);
        m.replacement = parse_rule_tokens(to, classes, line_no);
        break;
      }
      case MutationKind::AlterTermination: {
        const auto [from, to] = split_arrow(body, line_no);
        m.termination = parse_termination_tokens(from, classes, line_no);
        m.new_termination = parse_termination_tokens(to, classes, line_no);
        break;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::string to_text(const std::vector<BugMutation>& catalog,
                    const GameSpec& golden) {
  std::ostringstream os;
  for (const auto& m : catalog) {
    os << m.bug_id << ' ' << mutation_kind_name(m.kind) << ' ';
    switch (m.kind) {
      case MutationKind::RemoveRule:
        os << rule_text(golden, m.rule);
        break;
      case MutationKind::AddRule:
        os << '@' << m.position << ' ' << rule_text(golden, m.replacement);
        break;
      case MutationKind::AlterRule:
        os << rule_text(golden, m.rule) << " => "
           << rule_text(golden, m.replacement);
        break;
      case MutationKind::AlterTermination:
        os << termination_text(golden, m.termination) << " => "
           << termination_text(golden, m.new_termination);
        break;
    }
    os << '\n';
  }
  return os.str();
}

std::vector<std::string> bug_ids(const std::vector<BugMutation>& catalog) {
  std::vector<std::string> ids;
  ids.reserve(catalog.size());
  for (const auto& m : catalog) ids.push_back(m.bug_id);
  return ids;
}

GameSpec apply_mutations(const GameSpec& golden,
                         const std::vector<BugMutation>& mutations) {
  if (mutations.empty()) {
    return GameSpec::create(golden.sprites(), golden.interactions(),
                            golden.terminations(), golden.level_mapping());
  }
  if (mutations.size() > 0x7FFF) throw InvalidMutation("too many mutations");
  const auto& grules = golden.interactions();
  const auto& gterms = golden.terminations();

  auto record = std::make_shared<MutationRecord>();
  record->golden = std::make_shared<const GameSpec>(golden);
  record->golden_rule_bug.assign(grules.size(), -1);
  record->golden_termination_bug.assign(gterms.size(), -1);

  // One owner per golden termination and per (actor, actee, trigger) slot, so
  // every mutation keeps a distinct first-match resolution to witness.
  std::map<std::size_t, std::string> term_owner;
  std::map<std::tuple<ClassId, ClassId, Trigger>, std::string> slot_owner;
  const auto slot_of = [](const InteractionRule& r) {
    return std::make_tuple(r.actor, r.actee, r.trigger);
  };
  std::set<std::string> seen_ids;
  std::vector<std::vector<std::size_t>> adds_before(grules.size() + 1);
  std::vector<std::size_t> alter_of(grules.size(), SIZE_MAX);
  std::vector<std::size_t> term_alter(gterms.size(), SIZE_MAX);

  const auto claim = [](auto& owners, const auto& key, const std::string& bug) {
    const auto [it, fresh] = owners.emplace(key, bug);
    if (!fresh) throw ConflictingMutations(it->second, bug);
  };

  for (std::size_t mi = 0; mi < mutations.size(); ++mi) {
    const auto& m = mutations[mi];
    if (!seen_ids.insert(m.bug_id).second) {
      throw InvalidMutation("duplicate bug id '" + m.bug_id + "'");
    }
    record->bug_ids.push_back(m.bug_id);
    const auto bug = static_cast<std::int16_t>(mi);
    switch (m.kind) {
      case MutationKind::RemoveRule:
      case MutationKind::AlterRule: {
        const std::size_t gi = find_rule(golden, m.rule, m.bug_id);
        claim(slot_owner, slot_of(m.rule), m.bug_id);
        if (m.kind == MutationKind::AlterRule &&
            slot_of(m.replacement) != slot_of(m.rule)) {
          claim(slot_owner, slot_of(m.replacement), m.bug_id);
        }
        record->golden_rule_bug[gi] = bug;
        if (m.kind == MutationKind::AlterRule) {
          alter_of[gi] = mi;
          record->rule_deltas.push_back(
              {bug, static_cast<int>(gi), m.rule, m.replacement});
        } else {
          record->rule_deltas.push_back(
              {bug, static_cast<int>(gi), m.rule, std::nullopt});
        }
        break;
      }
      case MutationKind::AddRule: {
        if (m.position > grules.size()) {
          throw InvalidMutation(m.bug_id + ": position @" +
                                std::to_string(m.position) + " past the end");
        }
        claim(slot_owner, slot_of(m.replacement), m.bug_id);
        adds_before[m.position].push_back(mi);
        record->rule_deltas.push_back({bug, -1, std::nullopt, m.replacement});
        break;
      }
      case MutationKind::AlterTermination: {
        const std::size_t ti = find_termination(golden, m.termination, m.bug_id);
        claim(term_owner, ti, m.bug_id);
        term_alter[ti] = mi;
        record->golden_termination_bug[ti] = bug;
        record->termination_deltas.push_back(
            {bug, ti, m.termination, m.new_termination});
        break;
      }
    }
  }

  std::vector<InteractionRule> rules;
  for (std::size_t gi = 0; gi <= grules.size(); ++gi) {
    for (std::size_t mi : adds_before[gi]) {
      rules.push_back(mutations[mi].replacement);
      record->rule_origin.push_back(static_cast<std::int16_t>(mi));
    }
    if (gi == grules.size()) break;
    if (alter_of[gi] != SIZE_MAX) {
      rules.push_back(mutations[alter_of[gi]].replacement);
      record->rule_origin.push_back(static_cast<std::int16_t>(alter_of[gi]));
    } else if (record->golden_rule_bug[gi] < 0) {
      rules.push_back(grules[gi]);
      record->rule_origin.push_back(-1);
    }
  }
  std::vector<TerminationRule> terms;
  for (std::size_t ti = 0; ti < gterms.size(); ++ti) {
    if (term_alter[ti] != SIZE_MAX) {
      terms.push_back(mutations[term_alter[ti]].new_termination);
      record->termination_origin.push_back(static_cast<std::int16_t>(term_alter[ti]));
    } else {
      terms.push_back(gterms[ti]);
      record->termination_origin.push_back(-1);
    }
  }
  return GameSpec::create(golden.sprites(), std::move(rules), std::move(terms),
                          golden.level_mapping(), std::move(record));
}

GameSpec revert_mutations(const GameSpec& shipped) {
  const MutationRecord* record = shipped.mutations();
  if (record == nullptr) {
    return GameSpec::create(shipped.sprites(), shipped.interactions(),
                            shipped.terminations(), shipped.level_mapping());
  }
  std::map<std::int16_t, const RuleDelta*> delta_of;
  std::map<int, InteractionRule> placed;  // golden index -> rule
  for (const auto& d : record->rule_deltas) {
    delta_of[d.bug] = &d;
    if (d.golden_index >= 0) placed.emplace(d.golden_index, *d.golden_rule);
  }
  // Untouched shipped rules fill the remaining golden slots in order.
  std::vector<InteractionRule> untouched;
  for (std::size_t i = 0; i < shipped.interactions().size(); ++i) {
    if (record->rule_origin[i] < 0) untouched.push_back(shipped.interactions()[i]);
  }
  std::vector<InteractionRule> rules;
  const std::size_t total = untouched.size() + placed.size();
  std::size_t next = 0;
  for (std::size_t gi = 0; gi < total; ++gi) {
    if (const auto it = placed.find(static_cast<int>(gi)); it != placed.end()) {
      rules.push_back(it->second);
    } else {
      rules.push_back(untouched.at(next++));
    }
  }
  std::vector<TerminationRule> terms = shipped.terminations();
  for (const auto& d : record->termination_deltas) terms[d.index] = d.golden_rule;
  return GameSpec::create(shipped.sprites(), std::move(rules), std::move(terms),
                          shipped.level_mapping());
}

}  // namespace bugprobe::engine
