#pragma once

#include <functional>
#include <set>
#include <vector>

#include "anbp/term.hpp"

namespace anbp {

/// An agent's (typically the intruder's) knowledge: a set of ground facts
/// plus the function symbols it can apply. Immutable snapshots are cheap to
/// copy; the engine itself is pure and reentrant.
class Knowledge {
 public:
  Knowledge() = default;
  static Knowledge of(std::initializer_list<Term> facts);

  void add(Term fact);
  void add_function(FunctionSymbol fn);

  bool contains(const Term& t) const { return facts_.count(t) != 0; }
  bool knows_function(const FunctionSymbol& fn) const { return functions_.count(fn) != 0; }

  const TermSet& facts() const { return facts_; }
  const std::set<FunctionSymbol>& functions() const { return functions_; }

  friend bool operator==(const Knowledge& a, const Knowledge& b) {
    return a.facts_ == b.facts_ && a.functions_ == b.functions_;
  }

 private:
  TermSet facts_;
  std::set<FunctionSymbol> functions_;
};

/// Least fixpoint of the decomposition rules: pairs are split, signature
/// payloads and embedded verification keys are extracted. Function
/// applications are never inverted (hashing stays one-way) and private keys
/// are never extracted.
Knowledge analyze(const Knowledge& k);

/// True iff `goal` (ground) is in the composition closure of analyze(k):
/// pairing, applying known public functions, and signing with held private
/// keys. PrivKey terms are derivable only when held verbatim.
bool derives(const Knowledge& k, const Term& goal);

/// Streaming form of instantiate(): invokes `sink` once per substitution, in
/// a deterministic order possibly with duplicates. Returning false from the
/// sink stops the enumeration early.
void instantiate_each(const Knowledge& k, const Term& tmpl, int depth,
                      const std::function<bool(const Substitution&)>& sink);

/// All substitutions grounding `tmpl` with terms the knowledge can produce.
/// A production either replays a known fact (matching binds template
/// variables at no cost) or composes a new constructor, and every newly
/// composed constructor costs one level of the depth budget; a flattened
/// tuple spine counts as a single constructor. The list is duplicate-free
/// and deterministic in order.
std::vector<Substitution> instantiate(const Knowledge& k, const Term& tmpl, int depth);

}  // namespace anbp
