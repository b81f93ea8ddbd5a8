#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace anbp {

/// Uninterpreted function symbol (hash, trNA, sk, ...). There is deliberately
/// no symbol for key inversion: private keys are a structural term constructor
/// and can never be produced by applying a function.
struct FunctionSymbol {
  std::string label;
  unsigned arity = 1;
  bool is_public = true;

  friend bool operator==(const FunctionSymbol& a, const FunctionSymbol& b) {
    return a.label == b.label && a.arity == b.arity;
  }
  friend bool operator<(const FunctionSymbol& a, const FunctionSymbol& b) {
    return a.label != b.label ? a.label < b.label : a.arity < b.arity;
  }
};

enum class TermKind {
  Fresh,     // session-scoped nonce / freshly generated value
  Agent,     // agent name
  Constant,  // global constant
  Variable,  // placeholder in templates, never in ground knowledge
  Pair,      // right-associative pairing; n-tuples are right-nested pairs
  Apply,     // function application
  Signed,    // transparent digital signature: payload is structurally visible
  PrivKey,   // private key of a verification key; free constructor, no rewrite
};

/// Immutable symbolic message term. Values share structure and are safe to
/// copy and hand to concurrent workers.
class Term {
 public:
  /// Default-constructs the empty constant; container plumbing only.
  Term();

  static Term agent(std::string label);
  static Term constant(std::string label, std::string sort = "");
  static Term fresh(std::string label, int session, std::string sort = "");
  static Term variable(std::string label, std::string sort = "");
  static Term pair(Term left, Term right);
  /// Right-nests parts into a pair spine; a single part is returned as-is.
  static Term tuple(std::vector<Term> parts);
  static Term apply(FunctionSymbol fn, std::vector<Term> args);
  static Term signed_by(Term key, Term payload);
  static Term private_key_of(Term verification_key);

  TermKind kind() const { return node_->kind; }
  bool is(TermKind k) const { return node_->kind == k; }
  bool is_atom() const;

  const std::string& label() const;  // Fresh/Agent/Constant/Variable
  int session() const;               // Fresh
  /// Sort tag for atoms and variables ("Agent", "Number", "PublicKey", ...;
  /// empty = untyped). Composite terms report the empty sort.
  const std::string& sort() const;

  const Term& left() const;   // Pair
  const Term& right() const;  // Pair
  const FunctionSymbol& function() const;
  const std::vector<Term>& args() const;  // Apply
  const Term& key() const;                // Signed
  const Term& payload() const;            // Signed
  const Term& inner() const;              // PrivKey

  bool is_ground() const { return node_->ground; }

  /// Components of the right-nested pair spine; non-pairs yield {*this}.
  std::vector<Term> flatten() const;

  int compare(const Term& other) const;
  friend bool operator==(const Term& a, const Term& b) { return a.compare(b) == 0; }
  friend bool operator!=(const Term& a, const Term& b) { return a.compare(b) != 0; }
  friend bool operator<(const Term& a, const Term& b) { return a.compare(b) < 0; }

  /// Canonical textual rendering: `name`, `name#session`, `f(t1,...,tn)`,
  /// `(t1, t2, ...)`, `sign(inv(k), t)`, `hash(t)`.
  std::string to_string() const;

  struct Node {
    TermKind kind = TermKind::Constant;
    std::string label;  // atoms
    int session = 0;    // Fresh
    std::string sort;   // atoms and variables
    FunctionSymbol fn;  // Apply
    std::vector<Term> children;
    bool ground = true;
  };

 private:
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

using TermSet = std::set<Term>;

/// Transitive closure of structural children, including the term itself.
TermSet subterms(const Term& t);

/// Idempotent substitution from variable labels to terms with occurs check.
class Substitution {
 public:
  Substitution() = default;

  /// Binds var (a Variable term) to value. Fails on occurs-check violation or
  /// sort clash. Maintains idempotency: existing bindings are rewritten.
  bool bind(const Term& var, Term value);

  Term apply(const Term& t) const;
  const Term* lookup(const std::string& var_label) const;

  bool empty() const { return bindings_.empty(); }
  size_t size() const { return bindings_.size(); }
  auto begin() const { return bindings_.begin(); }
  auto end() const { return bindings_.end(); }

  /// apply(compose(first, then), t) == then.apply(first.apply(t)).
  static Substitution compose(const Substitution& first, const Substitution& then);

  int compare(const Substitution& other) const;
  friend bool operator==(const Substitution& a, const Substitution& b) { return a.compare(b) == 0; }
  friend bool operator<(const Substitution& a, const Substitution& b) { return a.compare(b) < 0; }

  std::string to_string() const;

 private:
  std::map<std::string, Term> bindings_;
};

/// Most general unifier of two terms in the free algebra, or nullopt on
/// symbol clash / occurs-check failure.
std::optional<Substitution> unify(const Term& a, const Term& b);
std::optional<Substitution> unify(const Term& a, const Term& b, Substitution seed);

/// One-sided matching: only variables of `pattern` may bind.
std::optional<Substitution> match(const Term& pattern, const Term& ground);
std::optional<Substitution> match(const Term& pattern, const Term& ground, Substitution seed);

/// Can a sort-tagged variable hold this value? Untyped variables hold
/// anything; typed variables hold atoms of the same sort only.
bool sort_admits(const std::string& var_sort, const Term& value);

struct TermParseError : std::runtime_error {
  size_t position;
  TermParseError(std::string msg, size_t pos)
      : std::runtime_error(std::move(msg)), position(pos) {}
};

/// Maps a bare name in canonical text to the atom it denotes. `session` is
/// >= 0 when the name carried a `#session` suffix.
using SymbolResolver = std::function<Term(const std::string& label, int session)>;

/// Parses the canonical textual rendering back into a term. The default
/// resolver produces untyped constants (and fresh values for `name#i`).
Term parse_term(std::string_view text, const SymbolResolver& resolver = {});

}  // namespace anbp
