#include "anbp/deduction.hpp"

#include <cassert>

namespace anbp {

Knowledge Knowledge::of(std::initializer_list<Term> facts) {
  Knowledge k;
  for (const Term& t : facts) k.add(t);
  return k;
}

void Knowledge::add(Term fact) {
  assert(fact.is_ground());
  facts_.insert(std::move(fact));
}

void Knowledge::add_function(FunctionSymbol fn) { functions_.insert(std::move(fn)); }

Knowledge analyze(const Knowledge& k) {
  Knowledge out = k;
  std::vector<Term> work(k.facts().begin(), k.facts().end());
  auto push = [&](const Term& t) {
    if (!out.contains(t)) {
      out.add(t);
      work.push_back(t);
    }
  };
  while (!work.empty()) {
    Term cur = work.back();
    work.pop_back();
    switch (cur.kind()) {
      case TermKind::Pair:
        push(cur.left());
        push(cur.right());
        break;
      case TermKind::Signed:
        push(cur.payload());
        // The verification key is visible term structure; the private key
        // itself stays out of reach.
        if (cur.key().is(TermKind::PrivKey)) push(cur.key().inner());
        break;
      default:
        break;  // Apply args stay opaque; PrivKey is never opened
    }
  }
  return out;
}

namespace {

bool derivable(const Knowledge& analyzed, const Term& goal) {
  if (analyzed.contains(goal)) return true;
  switch (goal.kind()) {
    case TermKind::Pair:
      return derivable(analyzed, goal.left()) && derivable(analyzed, goal.right());
    case TermKind::Apply: {
      const FunctionSymbol& fn = goal.function();
      if (!fn.is_public || !analyzed.knows_function(fn)) return false;
      for (const Term& a : goal.args())
        if (!derivable(analyzed, a)) return false;
      return true;
    }
    case TermKind::Signed:
      return derivable(analyzed, goal.key()) && derivable(analyzed, goal.payload());
    default:
      return false;  // atoms and private keys must be held verbatim
  }
}

// Candidate pool for filling an untyped bare variable by composition.
// Tuple candidates are restricted to binary pairs and the pool is capped at
// a fixed size; both limits are deterministic.
constexpr size_t kMaxComposedPool = 100000;

std::vector<Term> composed_terms(const Knowledge& analyzed, int depth) {
  TermSet level(analyzed.facts());
  TermSet composed;
  for (int d = 0; d < depth && composed.size() < kMaxComposedPool; ++d) {
    TermSet next = level;
    auto emit = [&](Term t) {
      if (!analyzed.contains(t)) composed.insert(t);
      next.insert(std::move(t));
    };
    std::vector<Term> base(level.begin(), level.end());
    for (const Term& a : base) {
      for (const Term& b : base) emit(Term::pair(a, b));
      for (const FunctionSymbol& fn : analyzed.functions()) {
        if (!fn.is_public || fn.arity != 1) continue;
        emit(Term::apply(fn, {a}));
      }
      if (a.is(TermKind::PrivKey))
        for (const Term& m : base) emit(Term::signed_by(a, m));
      if (composed.size() >= kMaxComposedPool) break;
    }
    // Functions of arity != 1 are rare in this algebra; cover arity 2.
    for (const FunctionSymbol& fn : analyzed.functions()) {
      if (!fn.is_public || fn.arity != 2) continue;
      for (const Term& a : base) {
        for (const Term& b : base) emit(Term::apply(fn, {a, b}));
        if (composed.size() >= kMaxComposedPool) break;
      }
    }
    level = std::move(next);
  }
  return {composed.begin(), composed.end()};
}

using Cont = std::function<bool(const Substitution&)>;

class Producer {
 public:
  explicit Producer(const Knowledge& analyzed) : k_(analyzed) {}

  // Enumerates substitutions making the pattern producible; calls `emit` per
  // candidate and returns false once emit has requested a stop.
  bool produce(const Term& pat0, int budget, const Substitution& s, const Cont& emit) {
    Term pat = s.apply(pat0);
    // Replay: match the whole subtree against a known fact, cost 0. This is
    // what lets unforgeable signed blobs be re-sent and lets hash(X) bind X
    // against a known hash even though the preimage is not derivable.
    for (const Term& f : k_.facts()) {
      if (auto m = match(pat, f, s)) {
        if (!emit(*m)) return false;
      }
    }
    if (budget <= 0) return true;
    switch (pat.kind()) {
      case TermKind::Pair:
        return produce_seq(pat.flatten(), 0, budget - 1, s, emit);
      case TermKind::Apply: {
        const FunctionSymbol& fn = pat.function();
        if (!fn.is_public || !k_.knows_function(fn)) return true;
        return produce_seq(pat.args(), 0, budget - 1, s, emit);
      }
      case TermKind::Signed:
        return produce_seq({pat.key(), pat.payload()}, 0, budget - 1, s, emit);
      case TermKind::Variable: {
        if (!pat.sort().empty()) return true;  // typed holes hold atoms only
        for (const Term& t : composed_terms(k_, budget)) {
          Substitution s2 = s;
          if (!s2.bind(pat, t)) continue;
          if (!emit(s2)) return false;
        }
        return true;
      }
      default:
        return true;  // atoms and private keys cannot be composed
    }
  }

 private:
  bool produce_seq(const std::vector<Term>& parts, size_t idx, int budget,
                   const Substitution& s, const Cont& emit) {
    if (idx == parts.size()) return emit(s);
    return produce(parts[idx], budget, s, [&](const Substitution& s2) {
      return produce_seq(parts, idx + 1, budget, s2, emit);
    });
  }

  const Knowledge& k_;
};

}  // namespace

bool derives(const Knowledge& k, const Term& goal) {
  assert(goal.is_ground());
  return derivable(analyze(k), goal);
}

void instantiate_each(const Knowledge& k, const Term& tmpl, int depth,
                      const std::function<bool(const Substitution&)>& sink) {
  Knowledge analyzed = analyze(k);
  Producer p(analyzed);
  p.produce(tmpl, depth, Substitution{}, [&](const Substitution& s) {
    return s.apply(tmpl).is_ground() ? sink(s) : true;
  });
}

std::vector<Substitution> instantiate(const Knowledge& k, const Term& tmpl, int depth) {
  std::vector<Substitution> out;
  std::set<Substitution> seen;
  instantiate_each(k, tmpl, depth, [&](const Substitution& s) {
    if (seen.insert(s).second) out.push_back(s);
    return true;
  });
  return out;
}

}  // namespace anbp
