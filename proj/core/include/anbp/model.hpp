#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anbp/term.hpp"

namespace anbp {

struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
  std::string to_string() const;
};

/// The four channel kinds: insecure `->`, authentic `*->`, confidential
/// `->*`, secure `*->*`. Pseudonymity is a property of an endpoint, not of
/// the channel itself, and is only meaningful on authentic channels.
struct ChannelKind {
  bool confidential = false;
  bool authentic = false;

  static ChannelKind insecure() { return {false, false}; }
  static ChannelKind authentic_only() { return {false, true}; }
  static ChannelKind confidential_only() { return {true, false}; }
  static ChannelKind secure() { return {true, true}; }

  const char* token() const;
  static std::optional<ChannelKind> from_token(std::string_view tok);
  friend bool operator==(const ChannelKind&, const ChannelKind&) = default;
};

struct ActionStep {
  std::string sender;
  std::optional<std::string> sender_pseudonym;
  ChannelKind channel;
  std::string receiver;
  std::optional<std::string> receiver_pseudonym;
  Term message;
  SourceSpan span;

  bool equivalent(const ActionStep& other) const;  // ignores spans
};

struct Goal {
  enum class Kind { WeakAuth, StrongAuth, Secrecy };
  Kind kind = Kind::WeakAuth;
  std::string authenticator;  // auth goals
  std::string peer;           // auth goals
  Term payload;
  std::vector<std::string> among;  // secrecy
  SourceSpan span;

  bool equivalent(const Goal& other) const;  // ignores spans
  std::string to_string() const;
};

/// In-memory form of an AnB-style narration: roles, declared symbols, macro
/// definitions, per-role initial knowledge, channel-typed actions, goals.
struct ProtocolSpec {
  std::string name;
  std::vector<std::string> roles;
  std::vector<FunctionSymbol> functions;
  /// Declared atom sorts (Agent, Number, PublicKey, Function) keyed by name.
  std::map<std::string, std::string> sorts;
  /// Macro table in declaration order.
  std::vector<std::pair<std::string, Term>> definitions;
  /// Initial knowledge per role, in role declaration order.
  std::map<std::string, std::vector<Term>> knowledge;
  std::vector<ActionStep> actions;
  std::vector<Goal> goals;

  bool has_definition(const std::string& name) const;
  const Term* find_definition(const std::string& name) const;
  bool is_role(const std::string& name) const;

  /// Structural equality ignoring source spans.
  bool equivalent(const ProtocolSpec& other) const;
};

struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised by expand() when the macro table is cyclic; names the cycle.
struct DefinitionCycleError : ModelError {
  std::vector<std::string> cycle;
  explicit DefinitionCycleError(std::vector<std::string> names);
};

/// Substitutes every macro away. A macro whose body is a tuple is spliced
/// flat when referenced as a tuple component, mirroring comma-level textual
/// expansion; referenced anywhere else the body is inserted as-is.
/// Idempotent on macro-free specs.
ProtocolSpec expand(const ProtocolSpec& spec);
Term expand_term(const ProtocolSpec& spec, const Term& t);

struct Violation {
  int action_index = -1;  // -1: spec-level problem
  Term missing;
  std::string detail;
  std::string to_string() const;
};

/// Static executability check on an expanded spec: every sender can compose
/// its message from evolving knowledge (with fresh values minted at first
/// use), every receiver can bind what it must later use. Violations are
/// data, not faults.
std::vector<Violation> validate(const ProtocolSpec& spec);

/// Which role mints each fresh symbol, and at which action it first appears.
struct FreshInfo {
  std::string minted_by;
  int first_action = -1;
};
std::map<std::string, FreshInfo> freshness(const ProtocolSpec& expanded);

}  // namespace anbp
