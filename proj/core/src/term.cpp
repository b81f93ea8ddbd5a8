#include "anbp/term.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <sstream>

namespace anbp {

namespace {

std::shared_ptr<Term::Node> new_node(TermKind k) {
  auto n = std::make_shared<Term::Node>();
  n->kind = k;
  return n;
}

bool all_ground(const std::vector<Term>& ts) {
  return std::all_of(ts.begin(), ts.end(), [](const Term& t) { return t.is_ground(); });
}

int kind_rank(TermKind k) { return static_cast<int>(k); }

}  // namespace

Term::Term() {
  static const std::shared_ptr<const Node> empty = [] {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::Constant;
    return n;
  }();
  node_ = empty;
}

Term Term::agent(std::string label) {
  auto n = new_node(TermKind::Agent);
  n->label = std::move(label);
  n->sort = "Agent";
  return Term(std::move(n));
}

Term Term::constant(std::string label, std::string sort) {
  auto n = new_node(TermKind::Constant);
  n->label = std::move(label);
  n->sort = std::move(sort);
  return Term(std::move(n));
}

Term Term::fresh(std::string label, int session, std::string sort) {
  auto n = new_node(TermKind::Fresh);
  n->label = std::move(label);
  n->session = session;
  n->sort = std::move(sort);
  return Term(std::move(n));
}

Term Term::variable(std::string label, std::string sort) {
  auto n = new_node(TermKind::Variable);
  n->label = std::move(label);
  n->sort = std::move(sort);
  n->ground = false;
  return Term(std::move(n));
}

Term Term::pair(Term left, Term right) {
  auto n = new_node(TermKind::Pair);
  n->ground = left.is_ground() && right.is_ground();
  n->children = {std::move(left), std::move(right)};
  return Term(std::move(n));
}

Term Term::tuple(std::vector<Term> parts) {
  if (parts.empty()) throw std::invalid_argument("Term::tuple: empty");
  Term acc = parts.back();
  for (size_t i = parts.size() - 1; i-- > 0;) acc = pair(parts[i], std::move(acc));
  return acc;
}

Term Term::apply(FunctionSymbol fn, std::vector<Term> args) {
  if (args.size() != fn.arity) throw std::invalid_argument("Term::apply: arity mismatch for " + fn.label);
  auto n = new_node(TermKind::Apply);
  n->fn = std::move(fn);
  n->ground = all_ground(args);
  n->children = std::move(args);
  return Term(std::move(n));
}

Term Term::signed_by(Term key, Term payload) {
  auto n = new_node(TermKind::Signed);
  n->ground = key.is_ground() && payload.is_ground();
  n->children = {std::move(key), std::move(payload)};
  return Term(std::move(n));
}

Term Term::private_key_of(Term verification_key) {
  auto n = new_node(TermKind::PrivKey);
  n->ground = verification_key.is_ground();
  n->children = {std::move(verification_key)};
  return Term(std::move(n));
}

bool Term::is_atom() const {
  switch (node_->kind) {
    case TermKind::Fresh:
    case TermKind::Agent:
    case TermKind::Constant:
    case TermKind::Variable:
      return true;
    default:
      return false;
  }
}

const std::string& Term::label() const { return node_->label; }
int Term::session() const { return node_->session; }

const std::string& Term::sort() const {
  static const std::string empty;
  return is_atom() ? node_->sort : empty;
}

const Term& Term::left() const { return node_->children[0]; }
const Term& Term::right() const { return node_->children[1]; }
const FunctionSymbol& Term::function() const { return node_->fn; }
const std::vector<Term>& Term::args() const { return node_->children; }
const Term& Term::key() const { return node_->children[0]; }
const Term& Term::payload() const { return node_->children[1]; }
const Term& Term::inner() const { return node_->children[0]; }

std::vector<Term> Term::flatten() const {
  std::vector<Term> out;
  const Term* cur = this;
  while (cur->is(TermKind::Pair)) {
    out.push_back(cur->left());
    cur = &cur->right();
  }
  out.push_back(*cur);
  return out;
}

int Term::compare(const Term& other) const {
  if (node_ == other.node_) return 0;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind) return kind_rank(a.kind) < kind_rank(b.kind) ? -1 : 1;
  switch (a.kind) {
    case TermKind::Fresh:
      if (int c = a.label.compare(b.label)) return c;
      if (a.session != b.session) return a.session < b.session ? -1 : 1;
      return a.sort.compare(b.sort);
    case TermKind::Agent:
      return a.label.compare(b.label);
    case TermKind::Constant:
    case TermKind::Variable:
      if (int c = a.label.compare(b.label)) return c;
      return a.sort.compare(b.sort);
    case TermKind::Apply:
      if (int c = a.fn.label.compare(b.fn.label)) return c;
      if (a.fn.arity != b.fn.arity) return a.fn.arity < b.fn.arity ? -1 : 1;
      break;
    default:
      break;
  }
  if (a.children.size() != b.children.size())
    return a.children.size() < b.children.size() ? -1 : 1;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (int c = a.children[i].compare(b.children[i])) return c;
  return 0;
}

namespace {

void render(const Term& t, std::ostream& os) {
  switch (t.kind()) {
    case TermKind::Fresh:
      os << t.label() << '#' << t.session();
      return;
    case TermKind::Agent:
    case TermKind::Constant:
    case TermKind::Variable:
      os << t.label();
      return;
    case TermKind::Pair: {
      os << '(';
      auto parts = t.flatten();
      for (size_t i = 0; i < parts.size(); ++i) {
        if (i) os << ", ";
        render(parts[i], os);
      }
      os << ')';
      return;
    }
    case TermKind::Apply: {
      os << t.function().label << '(';
      const auto& as = t.args();
      for (size_t i = 0; i < as.size(); ++i) {
        if (i) os << ", ";
        render(as[i], os);
      }
      os << ')';
      return;
    }
    case TermKind::Signed:
      os << "sign(";
      render(t.key(), os);
      os << ", ";
      render(t.payload(), os);
      os << ')';
      return;
    case TermKind::PrivKey:
      os << "inv(";
      render(t.inner(), os);
      os << ')';
      return;
  }
}

}  // namespace

std::string Term::to_string() const {
  std::ostringstream os;
  render(*this, os);
  return os.str();
}

TermSet subterms(const Term& t) {
  TermSet out;
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term cur = stack.back();
    stack.pop_back();
    if (!out.insert(cur).second) continue;
    switch (cur.kind()) {
      case TermKind::Pair:
        stack.push_back(cur.left());
        stack.push_back(cur.right());
        break;
      case TermKind::Apply:
        for (const Term& a : cur.args()) stack.push_back(a);
        break;
      case TermKind::Signed:
        stack.push_back(cur.key());
        stack.push_back(cur.payload());
        break;
      case TermKind::PrivKey:
        stack.push_back(cur.inner());
        break;
      default:
        break;
    }
  }
  return out;
}

namespace {

bool occurs(const std::string& var_label, const Term& t) {
  if (t.is(TermKind::Variable)) return t.label() == var_label;
  if (t.is_ground()) return false;
  switch (t.kind()) {
    case TermKind::Pair:
      return occurs(var_label, t.left()) || occurs(var_label, t.right());
    case TermKind::Apply:
      for (const Term& a : t.args())
        if (occurs(var_label, a)) return true;
      return false;
    case TermKind::Signed:
      return occurs(var_label, t.key()) || occurs(var_label, t.payload());
    case TermKind::PrivKey:
      return occurs(var_label, t.inner());
    default:
      return false;
  }
}

Term substitute_one(const Term& t, const std::string& var_label, const Term& value) {
  if (t.is_ground()) return t;
  switch (t.kind()) {
    case TermKind::Variable:
      return t.label() == var_label ? value : t;
    case TermKind::Pair:
      return Term::pair(substitute_one(t.left(), var_label, value),
                        substitute_one(t.right(), var_label, value));
    case TermKind::Apply: {
      std::vector<Term> as;
      as.reserve(t.args().size());
      for (const Term& a : t.args()) as.push_back(substitute_one(a, var_label, value));
      return Term::apply(t.function(), std::move(as));
    }
    case TermKind::Signed:
      return Term::signed_by(substitute_one(t.key(), var_label, value),
                             substitute_one(t.payload(), var_label, value));
    case TermKind::PrivKey:
      return Term::private_key_of(substitute_one(t.inner(), var_label, value));
    default:
      return t;
  }
}

}  // namespace

bool sort_admits(const std::string& var_sort, const Term& value) {
  if (var_sort.empty()) return true;
  if (value.is(TermKind::Variable))
    return value.sort().empty() || value.sort() == var_sort;
  return value.is_atom() && value.sort() == var_sort;
}

bool Substitution::bind(const Term& var, Term value) {
  assert(var.is(TermKind::Variable));
  Term resolved = apply(value);
  if (resolved.is(TermKind::Variable) && resolved.label() == var.label()) return true;
  if (occurs(var.label(), resolved)) return false;
  if (!sort_admits(var.sort(), resolved)) return false;
  for (auto& [v, t] : bindings_) t = substitute_one(t, var.label(), resolved);
  bindings_.insert_or_assign(var.label(), std::move(resolved));
  return true;
}

Term Substitution::apply(const Term& t) const {
  if (t.is_ground() || bindings_.empty()) return t;
  switch (t.kind()) {
    case TermKind::Variable: {
      auto it = bindings_.find(t.label());
      return it == bindings_.end() ? t : it->second;
    }
    case TermKind::Pair:
      return Term::pair(apply(t.left()), apply(t.right()));
    case TermKind::Apply: {
      std::vector<Term> as;
      as.reserve(t.args().size());
      for (const Term& a : t.args()) as.push_back(apply(a));
      return Term::apply(t.function(), std::move(as));
    }
    case TermKind::Signed:
      return Term::signed_by(apply(t.key()), apply(t.payload()));
    case TermKind::PrivKey:
      return Term::private_key_of(apply(t.inner()));
    default:
      return t;
  }
}

const Term* Substitution::lookup(const std::string& var_label) const {
  auto it = bindings_.find(var_label);
  return it == bindings_.end() ? nullptr : &it->second;
}

Substitution Substitution::compose(const Substitution& first, const Substitution& then) {
  Substitution out = then;
  for (const auto& [v, t] : first.bindings_) out.bindings_.insert_or_assign(v, then.apply(t));
  return out;
}

int Substitution::compare(const Substitution& other) const {
  auto a = bindings_.begin();
  auto b = other.bindings_.begin();
  for (; a != bindings_.end() && b != other.bindings_.end(); ++a, ++b) {
    if (int c = a->first.compare(b->first)) return c;
    if (int c = a->second.compare(b->second)) return c;
  }
  if (a != bindings_.end()) return 1;
  if (b != other.bindings_.end()) return -1;
  return 0;
}

std::string Substitution::to_string() const {
  std::ostringstream os;
  os << '{';
  bool sep = false;
  for (const auto& [v, t] : bindings_) {
    if (sep) os << ", ";
    os << v << " -> " << t.to_string();
    sep = true;
  }
  os << '}';
  return os.str();
}

namespace {

bool unify_into(const Term& a, const Term& b, Substitution& s) {
  Term x = s.apply(a);
  Term y = s.apply(b);
  if (x == y) return true;
  if (x.is(TermKind::Variable)) return s.bind(x, y);
  if (y.is(TermKind::Variable)) return s.bind(y, x);
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case TermKind::Pair:
      return unify_into(x.left(), y.left(), s) && unify_into(x.right(), y.right(), s);
    case TermKind::Apply:
      if (!(x.function() == y.function())) return false;
      for (size_t i = 0; i < x.args().size(); ++i)
        if (!unify_into(x.args()[i], y.args()[i], s)) return false;
      return true;
    case TermKind::Signed:
      return unify_into(x.key(), y.key(), s) && unify_into(x.payload(), y.payload(), s);
    case TermKind::PrivKey:
      return unify_into(x.inner(), y.inner(), s);
    default:
      return false;  // distinct atoms
  }
}

bool match_into(const Term& pattern, const Term& ground, Substitution& s) {
  Term p = s.apply(pattern);
  if (p.is(TermKind::Variable)) return s.bind(p, ground);
  if (p.kind() != ground.kind()) return false;
  switch (p.kind()) {
    case TermKind::Pair:
      return match_into(p.left(), ground.left(), s) && match_into(p.right(), ground.right(), s);
    case TermKind::Apply:
      if (!(p.function() == ground.function())) return false;
      for (size_t i = 0; i < p.args().size(); ++i)
        if (!match_into(p.args()[i], ground.args()[i], s)) return false;
      return true;
    case TermKind::Signed:
      return match_into(p.key(), ground.key(), s) && match_into(p.payload(), ground.payload(), s);
    case TermKind::PrivKey:
      return match_into(p.inner(), ground.inner(), s);
    default:
      return p == ground;
  }
}

}  // namespace

std::optional<Substitution> unify(const Term& a, const Term& b) {
  return unify(a, b, Substitution{});
}

std::optional<Substitution> unify(const Term& a, const Term& b, Substitution seed) {
  if (!unify_into(a, b, seed)) return std::nullopt;
  return seed;
}

std::optional<Substitution> match(const Term& pattern, const Term& ground) {
  return match(pattern, ground, Substitution{});
}

std::optional<Substitution> match(const Term& pattern, const Term& ground, Substitution seed) {
  if (!match_into(pattern, ground, seed)) return std::nullopt;
  return seed;
}

// ---------------------------------------------------------------------------
// Canonical term text parsing

namespace {

struct TermParser {
  std::string_view text;
  size_t pos = 0;
  const SymbolResolver& resolve;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& msg) { throw TermParseError(msg, pos); }

  bool peek(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  void expect(char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }

  static bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string read_name() {
    skip_ws();
    if (pos >= text.size() || !name_start(text[pos])) fail("expected name");
    size_t start = pos;
    while (pos < text.size() && name_char(text[pos])) ++pos;
    return std::string(text.substr(start, pos - start));
  }

  int read_session() {
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) fail("expected session index after '#'");
    return std::stoi(std::string(text.substr(start, pos - start)));
  }

  Term parse() {
    skip_ws();
    if (peek('(')) {
      ++pos;
      std::vector<Term> parts{parse()};
      while (peek(',')) {
        ++pos;
        parts.push_back(parse());
      }
      expect(')');
      return Term::tuple(std::move(parts));
    }
    std::string name = read_name();
    if (peek('(')) {
      ++pos;
      std::vector<Term> args{parse()};
      while (peek(',')) {
        ++pos;
        args.push_back(parse());
      }
      expect(')');
      if (name == "inv") {
        if (args.size() != 1) fail("inv takes one argument");
        return Term::private_key_of(std::move(args[0]));
      }
      if (name == "sign") {
        if (args.size() != 2) fail("sign takes two arguments");
        return Term::signed_by(std::move(args[0]), std::move(args[1]));
      }
      unsigned arity = static_cast<unsigned>(args.size());
      return Term::apply(FunctionSymbol{name, arity, true}, std::move(args));
    }
    int session = -1;
    if (pos < text.size() && text[pos] == '#') {
      ++pos;
      session = read_session();
    }
    if (resolve) return resolve(name, session);
    return session >= 0 ? Term::fresh(name, session) : Term::constant(name);
  }
};

}  // namespace

Term parse_term(std::string_view text, const SymbolResolver& resolver) {
  TermParser p{text, 0, resolver};
  Term t = p.parse();
  p.skip_ws();
  if (p.pos != text.size()) throw TermParseError("trailing input after term", p.pos);
  return t;
}

}  // namespace anbp
