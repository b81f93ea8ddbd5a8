#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "anbp/deduction.hpp"
#include "anbp/model.hpp"

namespace anbp {

struct SearchConfig {
  int sessions = 1;  // 1 or 2
  int intruder_depth = 2;
  long max_states = 500000;
  /// Roles the intruder plays. Unset: the first declared role (the
  /// pseudonymous client in the shipped fixtures). An explicit empty set
  /// leaves every role honest.
  std::optional<std::set<std::string>> intruder_roles;
  int workers = 1;
};

struct TraceStep {
  int index = 0;
  bool is_send = true;        // emission by an honest role; false = delivery
  bool from_intruder = false; // delivered message was produced by the intruder
  std::string actor;          // "M@0", "C2@1", or "INTRUDER"
  int session = 0;
  int action_index = 0;
  ChannelKind channel;
  Term message;
  SourceSpan span;  // span of the originating action
};

struct AttackTrace {
  Goal goal;
  int goal_index = -1;
  int sessions = 1;
  std::set<std::string> intruder_roles;
  std::vector<TraceStep> steps;
};

struct Verdict {
  enum class Kind { Safe, Attack, Inconclusive };
  Kind kind = Kind::Safe;
  SearchConfig bound;
  long states_explored = 0;
  std::optional<AttackTrace> trace;  // present iff kind == Attack

  bool safe() const { return kind == Kind::Safe; }
  bool attack() const { return kind == Kind::Attack; }
};

struct GoalVerdict {
  Goal goal;
  Verdict verdict;
};

struct CheckResult {
  std::vector<GoalVerdict> per_goal;  // spec goal order
  long states_explored = 0;
  bool budget_exhausted = false;
  bool pseudonym_invariant_held = true;

  bool any_attack() const;
  bool any_inconclusive() const;
  /// First attack in exploration order (shortest trace, ties by goal order).
  const AttackTrace* first_attack() const;
};

/// Observes every reached state; used by invariant tests. With workers > 1
/// the observer runs concurrently from several threads.
using StateObserver = std::function<void(const Knowledge& intruder)>;

/// Bounded exploration of honest-step interleavings and intruder injections
/// with channel-aware semantics; reports a per-goal verdict. Deterministic
/// for a fixed config: iterative-deepening DFS, honest steps before intruder
/// injections at equal depth, and the lowest trace in exploration order wins
/// for any worker count.
CheckResult check_goals(const ProtocolSpec& spec, const SearchConfig& cfg,
                        const StateObserver& observer = {});

/// Single verdict: the first attack found, else Inconclusive if the state
/// budget ran out, else Safe at the configured bound.
Verdict check(const ProtocolSpec& spec, const SearchConfig& cfg);

struct ReplayError : std::runtime_error {
  int step_index;  // -1: trace-level problem
  ReplayError(std::string msg, int step)
      : std::runtime_error(std::move(msg)), step_index(step) {}
};

/// Deterministically re-executes a trace produced by check() on the same
/// spec, re-checking that every intruder-sent message is derivable from the
/// intruder knowledge at that point. Returns the same Attack verdict or
/// throws ReplayError naming the inapplicable step.
Verdict replay(const ProtocolSpec& spec, const AttackTrace& trace);

/// Line-delimited structured-text trace format: one step per line with
/// index, actor, direction, channel token, session, action, source span and
/// the canonical term rendering.
std::string serialize_trace(const AttackTrace& trace);
AttackTrace parse_trace(std::string_view text, const ProtocolSpec& spec);

}  // namespace anbp
