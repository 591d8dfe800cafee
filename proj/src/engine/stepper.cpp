#include "bugprobe/engine/stepper.hpp"

#include <algorithm>

#include "bugprobe/error.hpp"

namespace bugprobe::engine {

namespace {

struct Offset {
  int dx = 0;
  int dy = 0;
};

Offset offset(Orientation o) {
  switch (o) {
    case Orientation::Up:
      return {0, -1};
    case Orientation::Down:
      return {0, 1};
    case Orientation::Left:
      return {-1, 0};
    case Orientation::Right:
      return {1, 0};
  }
  return {};
}

// Sprites removed mid-step keep their slot with cls == kNoClass until the
// step finishes, so indices stay valid through push chains.
class Stepper {
 public:
  Stepper(GameState& state, const GameSpec& spec,
          std::vector<InteractionEvent>& events)
      : s_(state), spec_(spec), events_(events) {}

  void run(Action action) {
    const int avatar = s_.avatar_index(spec_);
    if (avatar >= 0) {
      const auto idx = static_cast<std::size_t>(avatar);
      switch (action) {
        case Action::Up:
        case Action::Down:
        case Action::Left:
        case Action::Right: {
          s_.orientation = static_cast<Orientation>(action);
          const Offset d = offset(s_.orientation);
          move(idx, d.dx, d.dy, 0);
          break;
        }
        case Action::Use:
          attack(idx);
          break;
        case Action::Nil:
          break;
      }
    }
    std::erase_if(s_.sprites,
                  [](const SpriteInstance& sp) { return sp.cls == kNoClass; });
    if (s_.running()) check_terminations();
    ++s_.tick;
  }

 private:
  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < s_.width && c.y < s_.height;
  }

  void collect_targets(Cell cell, std::size_t self) {
    targets_.clear();
    for (std::size_t i = 0; i < s_.sprites.size(); ++i) {
      if (i != self && s_.sprites[i].cls != kNoClass && s_.sprites[i].cell == cell) {
        targets_.push_back(i);
      }
    }
  }

  void emit(ClassId actor, ClassId actee, Effect effect, Trigger trigger,
            Cell cell, std::int16_t witness) {
    InteractionEvent e;
    e.tick = s_.tick;
    e.actor = actor;
    e.actee = actee;
    e.effect = effect;
    e.trigger = trigger;
    e.cell = cell;
    if (witness >= 0) e.bug_witness = spec_.bug_id(witness);
    events_.push_back(std::move(e));
  }

  void give(ClassId item) {
    s_.inventory.insert(
        std::upper_bound(s_.inventory.begin(), s_.inventory.end(), item), item);
  }

  bool move(std::size_t actor, int dx, int dy, int depth) {
    const Cell from = s_.sprites[actor].cell;
    const Cell to{static_cast<std::int16_t>(from.x + dx),
                  static_cast<std::int16_t>(from.y + dy)};
    if (!in_bounds(to)) return false;
    const ClassId actor_cls = s_.sprites[actor].cls;
    const bool is_avatar = actor_cls == spec_.avatar();
    collect_targets(to, actor);
    if (targets_.empty()) {
      if (is_avatar) emit(actor_cls, kNoClass, Effect::Move, Trigger::Move, to, -1);
      s_.sprites[actor].cell = to;
      return true;
    }
    // Recursive pushes reuse targets_, so iterate over a copy.
    const std::vector<std::size_t> here = targets_;
    bool blocked = false;
    for (std::size_t t : here) {
      const ClassId actee_cls = s_.sprites[t].cls;
      if (actee_cls == kNoClass) continue;
      const RuleResolution res =
          spec_.resolve(actor_cls, actee_cls, Trigger::Move);
      if (res.rule == nullptr) {
        if (res.witness >= 0) {
          emit(actor_cls, actee_cls, Effect::OverlapAllowed, Trigger::Move, to,
               res.witness);
        }
        continue;
      }
      const InteractionRule& rule = *res.rule;
      switch (rule.effect) {
        case Effect::BlockMove:
          emit(actor_cls, actee_cls, rule.effect, Trigger::Move, to, res.witness);
          blocked = true;
          break;
        case Effect::DestroyActee:
          emit(actor_cls, actee_cls, rule.effect, Trigger::Move, to, res.witness);
          s_.sprites[t].cls = kNoClass;
          break;
        case Effect::DestroyActor:
          emit(actor_cls, actee_cls, rule.effect, Trigger::Move, to, res.witness);
          s_.sprites[actor].cls = kNoClass;
          return false;
        case Effect::PushActee:
          emit(actor_cls, actee_cls, rule.effect, Trigger::Move, to, res.witness);
          if (depth >= static_cast<int>(s_.sprites.size()) ||
              !move(t, dx, dy, depth + 1)) {
            blocked = true;
          }
          break;
        case Effect::TransformActee:
          // The moving sprite merges into the transformed actee.
          emit(actor_cls, actee_cls, rule.effect, Trigger::Move, to, res.witness);
          s_.sprites[t].cls = rule.arg;
          s_.sprites[actor].cls = kNoClass;
          return false;
        case Effect::CollectItem:
          emit(actor_cls, actee_cls, rule.effect, Trigger::Move, to, res.witness);
          s_.sprites[t].cls = kNoClass;
          if (is_avatar) give(rule.arg);
          break;
        case Effect::OverlapAllowed:
          emit(actor_cls, actee_cls, rule.effect, Trigger::Move, to, res.witness);
          break;
        case Effect::WinIfCarrying:
          if (s_.carrying(rule.arg)) {
            emit(actor_cls, actee_cls, rule.effect, Trigger::Move, to, res.witness);
            s_.status = Status::Win;
          } else {
            emit(actor_cls, actee_cls, Effect::BlockMove, Trigger::Move, to,
                 res.witness);
            blocked = true;
          }
          break;
        default:
          break;
      }
      if (blocked) break;
    }
    if (blocked || s_.sprites[actor].cls == kNoClass) return false;
    s_.sprites[actor].cell = to;
    return true;
  }

  void attack(std::size_t avatar) {
    const Offset d = offset(s_.orientation);
    const Cell from = s_.sprites[avatar].cell;
    const Cell to{static_cast<std::int16_t>(from.x + d.dx),
                  static_cast<std::int16_t>(from.y + d.dy)};
    if (!in_bounds(to)) return;
    const ClassId actor_cls = s_.sprites[avatar].cls;
    collect_targets(to, avatar);
    const std::vector<std::size_t> here = targets_;
    for (std::size_t t : here) {
      const ClassId actee_cls = s_.sprites[t].cls;
      if (actee_cls == kNoClass) continue;
      const RuleResolution res = spec_.resolve(actor_cls, actee_cls, Trigger::Use);
      if (res.rule == nullptr) {
        emit(actor_cls, actee_cls, Effect::Use, Trigger::Use, to, res.witness);
        continue;
      }
      const InteractionRule& rule = *res.rule;
      Effect shown = rule.effect;
      switch (rule.effect) {
        case Effect::DestroyActee:
          s_.sprites[t].cls = kNoClass;
          break;
        case Effect::DestroyActor:
          emit(actor_cls, actee_cls, shown, Trigger::Use, to, res.witness);
          s_.sprites[avatar].cls = kNoClass;
          return;
        case Effect::PushActee:
          emit(actor_cls, actee_cls, shown, Trigger::Use, to, res.witness);
          move(t, d.dx, d.dy, 1);
          continue;
        case Effect::TransformActee:
          s_.sprites[t].cls = rule.arg;
          break;
        case Effect::CollectItem:
          s_.sprites[t].cls = kNoClass;
          give(rule.arg);
          break;
        case Effect::WinIfCarrying:
          if (s_.carrying(rule.arg)) {
            s_.status = Status::Win;
          } else {
            shown = Effect::Use;
          }
          break;
        default:
          break;
      }
      emit(actor_cls, actee_cls, shown, Trigger::Use, to, res.witness);
    }
  }

  // Index of the first termination in `rules` whose predicate holds, or -1.
  int first_termination(const std::vector<TerminationRule>& rules) const {
    const int avatar = s_.avatar_index(spec_);
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const auto& t = rules[i];
      bool holds = false;
      if (t.predicate == Predicate::Count) {
        holds = s_.count(t.cls) <= static_cast<std::size_t>(t.count);
      } else if (avatar >= 0) {
        const Cell at = s_.sprites[static_cast<std::size_t>(avatar)].cell;
        holds = std::any_of(s_.sprites.begin(), s_.sprites.end(),
                            [&](const SpriteInstance& sp) {
                              return sp.cls == t.cls && sp.cell == at &&
                                     sp.cls != spec_.avatar();
                            });
      }
      if (holds) return static_cast<int>(i);
    }
    return -1;
  }

  void check_terminations() {
    const int shipped = first_termination(spec_.terminations());
    int golden = shipped;
    std::int16_t witness = -1;
    if (const MutationRecord* m = spec_.mutations()) {
      golden = first_termination(m->golden->terminations());
      const auto outcome = [](const std::vector<TerminationRule>& rules, int i) {
        return i < 0 ? -1 : static_cast<int>(rules[static_cast<std::size_t>(i)].outcome);
      };
      if (outcome(spec_.terminations(), shipped) !=
          outcome(m->golden->terminations(), golden)) {
        if (shipped >= 0 &&
            m->termination_origin[static_cast<std::size_t>(shipped)] >= 0) {
          witness = m->termination_origin[static_cast<std::size_t>(shipped)];
        } else if (golden >= 0) {
          witness = m->golden_termination_bug[static_cast<std::size_t>(golden)];
        }
      }
    }
    const int avatar = s_.avatar_index(spec_);
    const Cell at =
        avatar >= 0 ? s_.sprites[static_cast<std::size_t>(avatar)].cell : kNoCell;
    if (shipped >= 0) {
      const auto& t = spec_.terminations()[static_cast<std::size_t>(shipped)];
      s_.status = t.outcome == Outcome::Win ? Status::Win : Status::Lose;
      emit(spec_.avatar(), t.cls,
           t.outcome == Outcome::Win ? Effect::Win : Effect::Lose, Trigger::Move,
           at, witness);
    } else if (witness >= 0) {
      const auto& t =
          spec_.mutations()->golden->terminations()[static_cast<std::size_t>(golden)];
      emit(spec_.avatar(), t.cls, Effect::Continue, Trigger::Move, at, witness);
    }
  }

  GameState& s_;
  const GameSpec& spec_;
  std::vector<InteractionEvent>& events_;
  std::vector<std::size_t> targets_;
};

}  // namespace

void step_in_place(GameState& state, Action action, const GameSpec& spec,
                   std::vector<InteractionEvent>& events) {
  if (!state.running()) {
    throw SteppedTerminalState("step called on a finished game (tick " +
                               std::to_string(state.tick) + ")");
  }
  events.clear();
  Stepper(state, spec, events).run(action);
}

std::pair<GameState, std::vector<InteractionEvent>> step(const GameState& state,
                                                         Action action,
                                                         const GameSpec& spec) {
  std::pair<GameState, std::vector<InteractionEvent>> out{state, {}};
  step_in_place(out.first, action, spec, out.second);
  return out;
}

std::vector<Action> legal_actions(const GameState& state) {
  if (!state.running()) return {};
  return {kAllActions.begin(), kAllActions.end()};
}

}  // namespace bugprobe::engine
