#pragma once

// Independent brute-force derivability oracle used to cross-check the
// production engine. It shares no code with anbp::derives: decomposition is
// a worklist saturation, composition is a breadth-first fixpoint over the
// goal's subterm universe. Slow and simple on purpose.

#include <set>

#include "anbp/deduction.hpp"
#include "anbp/term.hpp"

namespace oracle {

inline std::set<anbp::Term> decompose_closure(const std::set<anbp::Term>& facts) {
  std::set<anbp::Term> out = facts;
  bool changed = true;
  while (changed) {
    changed = false;
    std::set<anbp::Term> next = out;
    for (const anbp::Term& t : out) {
      switch (t.kind()) {
        case anbp::TermKind::Pair:
          next.insert(t.left());
          next.insert(t.right());
          break;
        case anbp::TermKind::Signed:
          next.insert(t.payload());
          if (t.key().is(anbp::TermKind::PrivKey)) next.insert(t.key().inner());
          break;
        default:
          break;
      }
    }
    if (next.size() != out.size()) {
      out = std::move(next);
      changed = true;
    }
  }
  return out;
}

inline bool oracle_derives(const anbp::Knowledge& k, const anbp::Term& goal) {
  std::set<anbp::Term> have = decompose_closure(
      std::set<anbp::Term>(k.facts().begin(), k.facts().end()));
  // Composition can only ever help through terms that sit inside the goal.
  std::set<anbp::Term> universe;
  for (const anbp::Term& s : anbp::subterms(goal)) universe.insert(s);

  bool changed = true;
  while (changed) {
    changed = false;
    for (const anbp::Term& cand : universe) {
      if (have.count(cand)) continue;
      bool got = false;
      switch (cand.kind()) {
        case anbp::TermKind::Pair:
          got = have.count(cand.left()) && have.count(cand.right());
          break;
        case anbp::TermKind::Apply: {
          const anbp::FunctionSymbol& fn = cand.function();
          if (fn.is_public && k.knows_function(fn)) {
            got = true;
            for (const anbp::Term& a : cand.args())
              if (!have.count(a)) got = false;
          }
          break;
        }
        case anbp::TermKind::Signed:
          got = have.count(cand.key()) && have.count(cand.payload());
          break;
        default:
          break;  // atoms and private keys are never composed
      }
      if (got) {
        have.insert(cand);
        changed = true;
      }
    }
  }
  return have.count(goal) != 0;
}

}  // namespace oracle
