#include "bugprobe/testmodel/goal.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bugprobe/error.hpp"
#include "bugprobe/text.hpp"

namespace bugprobe::testmodel {

namespace {

std::int64_t parse_int(std::string_view s, std::string_view what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InvalidSpec("bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

double parse_real(std::string_view s, std::string_view what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw InvalidSpec("bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

// Shortest text that parses back to the same double.
std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  Rational r;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    r.num = parse_int(text.substr(0, slash), "criterion");
    r.den = parse_int(text.substr(slash + 1), "criterion");
  } else if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 9) {
      throw InvalidSpec("bad criterion '" + std::string(text) + "'");
    }
    const std::int64_t whole =
        dot == 0 ? 0 : parse_int(text.substr(0, dot), "criterion");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    r.num = whole * scale + parse_int(frac, "criterion");
    r.den = scale;
  } else {
    r.num = parse_int(text, "criterion");
    r.den = 1;
  }
  if (r.den <= 0 || r.num <= 0 || r.num > r.den) {
    throw InvalidSpec("criterion '" + std::string(text) + "' outside (0, 1]");
  }
  const std::int64_t g = std::gcd(r.num, r.den);
  r.num /= g;
  r.den /= g;
  return r;
}

std::string to_text(const Rational& r) {
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + '/' + std::to_string(r.den);
}

Matcher parse_matcher(std::string_view text, const engine::GameSpec& spec) {
  const auto parts = split(text, '/');
  if (parts.size() < 3 || parts.size() > 4 ||
      (parts.size() == 4 && parts[3] != "each")) {
    throw InvalidSpec("matcher '" + std::string(text) +
                      "' is not ACTOR/ACTEE/EFFECT[/each]");
  }
  Matcher m;
  const auto cls = [&](std::string_view name, bool allow_empty) -> std::optional<ClassId> {
    if (name == "*") return std::nullopt;
    if (allow_empty && name == "empty") return engine::kNoClass;
    if (auto c = spec.find_class(name)) return *c;
    throw UndeclaredClass(std::string(name), 0);
  };
  m.actor = cls(parts[0], false);
  m.actee = cls(parts[1], true);
  if (parts[2] == "use") {
    m.any_use = true;
  } else if (parts[2] != "*") {
    const auto e = engine::parse_effect(parts[2]);
    if (!e) throw InvalidSpec("unknown effect '" + std::string(parts[2]) + "'");
    m.effect = *e;
  }
  m.per_instance = parts.size() == 4;
  if (m.per_instance && !m.actee) {
    throw InvalidSpec("per-instance matcher '" + std::string(text) +
                      "' needs a concrete actee");
  }
  return m;
}

std::string to_text(const Matcher& m, const engine::GameSpec& spec) {
  std::string out;
  out += m.actor ? std::string(spec.class_name(*m.actor)) : "*";
  out += '/';
  out += m.actee ? std::string(spec.class_name(*m.actee)) : "*";
  out += '/';
  if (m.any_use) {
    out += "use";
  } else {
    out += m.effect ? std::string(engine::effect_name(*m.effect)) : "*";
  }
  if (m.per_instance) out += "/each";
  return out;
}

std::vector<GoalSequence> parse_goal_file(std::string_view text,
                                          const engine::GameSpec& spec) {
  std::vector<GoalSequence> out;
  GoalSequence* seq = nullptr;
  TestGoal* goal = nullptr;
  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int line_no = static_cast<int>(li) + 1;
    const auto tokens = engine::tokenize(strip_comment(lines[li]));
    if (tokens.empty()) continue;
    const std::string& head = tokens[0].text;
    const auto fail = [&](const std::string& what) {
      throw SyntaxError(line_no, tokens[0].col, what);
    };
    try {
      if (head == "sequence") {
        if (goal != nullptr) fail("'sequence' inside an open goal");
        if (tokens.size() != 2) fail("expected 'sequence NAME'");
        out.push_back(GoalSequence{});
        seq = &out.back();
        seq->name = tokens[1].text;
      } else if (head == "goal") {
        if (seq == nullptr) fail("'goal' before any 'sequence'");
        if (goal != nullptr) fail("nested 'goal'");
        if (tokens.size() > 2) fail("expected 'goal [DAMPENING]'");
        seq->goals.push_back(TestGoal{});
        goal = &seq->goals.back();
        if (tokens.size() == 2) {
          goal->dampening = parse_real(tokens[1].text, "dampening");
          if (goal->dampening < 0 || goal->dampening > 1) {
            fail("dampening outside [0, 1]");
          }
        }
      } else if (head == "feature") {
        if (goal == nullptr) fail("'feature' outside a goal");
        if (tokens.size() != 4) fail("expected 'feature MATCHER WEIGHT CRITERION'");
        Feature f;
        f.matcher = parse_matcher(tokens[1].text, spec);
        f.weight = parse_real(tokens[2].text, "weight");
        f.criterion = parse_rational(tokens[3].text);
        goal->features.push_back(f);
      } else if (head == "end") {
        if (goal == nullptr) fail("'end' without 'goal'");
        if (goal->features.empty()) fail("goal has no features");
        goal = nullptr;
      } else {
        fail("unknown directive '" + head + "'");
      }
    } catch (const UndeclaredClass& e) {
      throw UndeclaredClass(e.name(), line_no);
    } catch (const InvalidSpec& e) {
      throw SyntaxError(line_no, tokens[0].col, e.what());
    }
  }
  if (goal != nullptr) throw SyntaxError(static_cast<int>(lines.size()), 1, "unterminated goal");
  for (const auto& s : out) {
    if (s.goals.empty()) throw InvalidSpec("sequence '" + s.name + "' has no goals");
  }
  return out;
}

std::string to_text(const std::vector<GoalSequence>& seqs,
                    const engine::GameSpec& spec) {
  std::ostringstream os;
  for (const auto& s : seqs) {
    os << "sequence " << s.name << '\n';
    for (const auto& g : s.goals) {
      os << "goal " << format_real(g.dampening) << '\n';
      for (const auto& f : g.features) {
        os << "  feature " << to_text(f.matcher, spec) << ' '
           << format_real(f.weight) << ' ' << to_text(f.criterion) << '\n';
      }
      os << "end\n";
    }
  }
  return os.str();
}

}  // namespace bugprobe::testmodel
