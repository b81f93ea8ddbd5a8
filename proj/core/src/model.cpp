#include "anbp/model.hpp"

#include <algorithm>
#include <sstream>

namespace anbp {

std::string SourceSpan::to_string() const {
  std::ostringstream os;
  os << line << ':' << column << ':' << length;
  return os.str();
}

const char* ChannelKind::token() const {
  if (confidential && authentic) return "*->*";
  if (confidential) return "->*";
  if (authentic) return "*->";
  return "->";
}

std::optional<ChannelKind> ChannelKind::from_token(std::string_view tok) {
  if (tok == "->") return insecure();
  if (tok == "*->") return authentic_only();
  if (tok == "->*") return confidential_only();
  if (tok == "*->*") return secure();
  return std::nullopt;
}

bool ActionStep::equivalent(const ActionStep& other) const {
  return sender == other.sender && sender_pseudonym == other.sender_pseudonym &&
         channel == other.channel && receiver == other.receiver &&
         receiver_pseudonym == other.receiver_pseudonym && message == other.message;
}

bool Goal::equivalent(const Goal& other) const {
  return kind == other.kind && authenticator == other.authenticator && peer == other.peer &&
         payload == other.payload && among == other.among;
}

std::string Goal::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::WeakAuth:
      os << authenticator << " weakly authenticates " << peer << " on " << payload.to_string();
      break;
    case Kind::StrongAuth:
      os << authenticator << " authenticates " << peer << " on " << payload.to_string();
      break;
    case Kind::Secrecy: {
      os << payload.to_string() << " secret between ";
      for (size_t i = 0; i < among.size(); ++i) {
        if (i) os << ", ";
        os << among[i];
      }
      break;
    }
  }
  return os.str();
}

bool ProtocolSpec::has_definition(const std::string& n) const {
  return find_definition(n) != nullptr;
}

const Term* ProtocolSpec::find_definition(const std::string& n) const {
  for (const auto& [name, body] : definitions)
    if (name == n) return &body;
  return nullptr;
}

bool ProtocolSpec::is_role(const std::string& n) const {
  return std::find(roles.begin(), roles.end(), n) != roles.end();
}

bool ProtocolSpec::equivalent(const ProtocolSpec& other) const {
  if (name != other.name || roles != other.roles || sorts != other.sorts ||
      knowledge != other.knowledge || definitions != other.definitions)
    return false;
  if (!(functions == other.functions)) return false;
  if (actions.size() != other.actions.size() || goals.size() != other.goals.size()) return false;
  for (size_t i = 0; i < actions.size(); ++i)
    if (!actions[i].equivalent(other.actions[i])) return false;
  for (size_t i = 0; i < goals.size(); ++i)
    if (!goals[i].equivalent(other.goals[i])) return false;
  return true;
}

DefinitionCycleError::DefinitionCycleError(std::vector<std::string> names)
    : ModelError([&names] {
        std::string msg = "cyclic definitions: ";
        for (size_t i = 0; i < names.size(); ++i) {
          if (i) msg += " -> ";
          msg += names[i];
        }
        return msg;
      }()),
      cycle(std::move(names)) {}

// ---------------------------------------------------------------------------
// Macro expansion

namespace {

class Expander {
 public:
  explicit Expander(const ProtocolSpec& spec) : spec_(spec) {}

  Term expand(const Term& t) {
    if (t.is_ground() && !contains_ref(t)) return t;
    switch (t.kind()) {
      case TermKind::Variable:
      case TermKind::Constant:
        if (spec_.has_definition(t.label())) return body_of(t.label());
        return t;
      case TermKind::Pair: {
        std::vector<Term> out;
        for (const Term& part : t.flatten()) {
          bool is_ref = part.is_atom() && spec_.has_definition(part.label());
          Term e = expand(part);
          // Comma-level splicing: a macro that stands for a tuple flattens
          // into the surrounding tuple; literal nested tuples stay nested.
          if (is_ref && e.is(TermKind::Pair))
            for (const Term& c : e.flatten()) out.push_back(c);
          else
            out.push_back(e);
        }
        return Term::tuple(std::move(out));
      }
      case TermKind::Apply: {
        std::vector<Term> as;
        as.reserve(t.args().size());
        for (const Term& a : t.args()) as.push_back(expand(a));
        return Term::apply(t.function(), std::move(as));
      }
      case TermKind::Signed:
        return Term::signed_by(expand(t.key()), expand(t.payload()));
      case TermKind::PrivKey:
        return Term::private_key_of(expand(t.inner()));
      default:
        return t;
    }
  }

 private:
  bool contains_ref(const Term& t) const {
    if (t.is_atom()) return t.kind() != TermKind::Agent && spec_.has_definition(t.label());
    switch (t.kind()) {
      case TermKind::Pair:
        return contains_ref(t.left()) || contains_ref(t.right());
      case TermKind::Apply:
        return std::any_of(t.args().begin(), t.args().end(),
                           [&](const Term& a) { return contains_ref(a); });
      case TermKind::Signed:
        return contains_ref(t.key()) || contains_ref(t.payload());
      case TermKind::PrivKey:
        return contains_ref(t.inner());
      default:
        return false;
    }
  }

  const Term& body_of(const std::string& name) {
    auto it = memo_.find(name);
    if (it != memo_.end()) return it->second;
    if (std::find(visiting_.begin(), visiting_.end(), name) != visiting_.end()) {
      auto at = std::find(visiting_.begin(), visiting_.end(), name);
      std::vector<std::string> cycle(at, visiting_.end());
      cycle.push_back(name);
      throw DefinitionCycleError(std::move(cycle));
    }
    visiting_.push_back(name);
    Term expanded = expand(*spec_.find_definition(name));
    visiting_.pop_back();
    return memo_.emplace(name, std::move(expanded)).first->second;
  }

  const ProtocolSpec& spec_;
  std::map<std::string, Term> memo_;
  std::vector<std::string> visiting_;
};

}  // namespace

Term expand_term(const ProtocolSpec& spec, const Term& t) {
  Expander e(spec);
  return e.expand(t);
}

ProtocolSpec expand(const ProtocolSpec& spec) {
  ProtocolSpec out = spec;
  Expander e(spec);
  for (auto& [role, terms] : out.knowledge)
    for (Term& t : terms) t = e.expand(t);
  for (ActionStep& a : out.actions) a.message = e.expand(a.message);
  for (Goal& g : out.goals) g.payload = e.expand(g.payload);
  out.definitions.clear();
  return out;
}

// ---------------------------------------------------------------------------
// Static executability

std::string Violation::to_string() const {
  std::ostringstream os;
  if (action_index >= 0) os << "action " << (action_index + 1) << ": ";
  os << detail << ": " << missing.to_string();
  return os.str();
}

namespace {

// Template-level view of one role's evolving knowledge.
struct RoleView {
  TermSet known;
  std::set<std::string> functions;
};

struct ExecSim {
  const ProtocolSpec& spec;
  std::map<std::string, RoleView> views;
  std::map<std::string, FreshInfo> fresh;
  std::set<std::string> in_initial_knowledge;

  explicit ExecSim(const ProtocolSpec& s) : spec(s) {
    for (const std::string& r : s.roles) views.emplace(r, RoleView{});
    for (const auto& [role, terms] : s.knowledge) {
      RoleView& v = views[role];
      for (const Term& t : terms) {
        if (t.is_atom() && t.sort() == "Function") {
          v.functions.insert(t.label());
        } else {
          v.known.insert(t);
        }
        for (const Term& sub : subterms(t))
          if (sub.is_atom()) in_initial_knowledge.insert(sub.label());
      }
    }
  }

  bool mintable(const std::string& role, const Term& var) const {
    (void)role;
    if (!var.is(TermKind::Variable)) return false;
    if (in_initial_knowledge.count(var.label())) return false;
    if (fresh.count(var.label())) return false;  // already minted elsewhere
    const std::string& sort = var.sort();
    return sort != "Agent" && sort != "Function";
  }

  void mint(const std::string& role, const Term& var, int action_index) {
    fresh[var.label()] = FreshInfo{role, action_index};
    RoleView& v = views[role];
    v.known.insert(var);
    if (var.sort() == "PublicKey") v.known.insert(Term::private_key_of(var));
  }

  bool composable(const std::string& role, const Term& t, int action_index) {
    RoleView& v = views[role];
    if (v.known.count(t)) return true;
    switch (t.kind()) {
      case TermKind::Variable:
        if (mintable(role, t)) {
          mint(role, t, action_index);
          return true;
        }
        return false;
      case TermKind::Pair:
        return composable(role, t.left(), action_index) &&
               composable(role, t.right(), action_index);
      case TermKind::Apply: {
        const FunctionSymbol& fn = t.function();
        if (!fn.is_public || !v.functions.count(fn.label)) return false;
        return std::all_of(t.args().begin(), t.args().end(), [&](const Term& a) {
          return composable(role, a, action_index);
        });
      }
      case TermKind::Signed:
        return composable(role, t.key(), action_index) &&
               composable(role, t.payload(), action_index);
      case TermKind::PrivKey: {
        // Minting a fresh public key grants the matching private key.
        const Term& pub = t.inner();
        if (pub.is(TermKind::Variable) && pub.sort() == "PublicKey" && mintable(role, pub))
          mint(role, pub, action_index);
        return views[role].known.count(t) > 0;
      }
      default:
        return false;  // constants and agent names must be known
    }
  }

  void collect_failures(const std::string& role, const Term& t, int action_index,
                        std::vector<Term>& out) {
    if (composable(role, t, action_index)) return;
    if (t.is(TermKind::Pair)) {
      for (const Term& part : t.flatten()) collect_failures(role, part, action_index, out);
      return;
    }
    out.push_back(t);
  }

  // What the receiver can see and later reuse: tuple components, signature
  // payloads and embedded verification keys. Function application arguments
  // stay opaque (hashes are matched, never inverted).
  void learn(const std::string& role, const Term& t) {
    RoleView& v = views[role];
    v.known.insert(t);
    switch (t.kind()) {
      case TermKind::Pair:
        learn(role, t.left());
        learn(role, t.right());
        break;
      case TermKind::Signed:
        learn(role, t.payload());
        if (t.key().is(TermKind::PrivKey)) learn(role, t.key().inner());
        break;
      case TermKind::PrivKey:
        learn(role, t.inner());
        break;
      default:
        break;
    }
  }
};

}  // namespace

std::map<std::string, FreshInfo> freshness(const ProtocolSpec& expanded) {
  ExecSim sim(expanded);
  for (size_t i = 0; i < expanded.actions.size(); ++i) {
    const ActionStep& a = expanded.actions[i];
    sim.composable(a.sender, a.message, static_cast<int>(i));
    sim.learn(a.receiver, a.message);
  }
  return sim.fresh;
}

std::vector<Violation> validate(const ProtocolSpec& spec0) {
  ProtocolSpec spec = spec0.definitions.empty() ? spec0 : expand(spec0);
  std::vector<Violation> out;
  ExecSim sim(spec);

  for (size_t i = 0; i < spec.actions.size(); ++i) {
    const ActionStep& a = spec.actions[i];
    std::vector<Term> failures;
    sim.collect_failures(a.sender, a.message, static_cast<int>(i), failures);
    for (const Term& f : failures)
      out.push_back(Violation{static_cast<int>(i), f,
                              a.sender + " cannot compose this term"});
    sim.learn(a.receiver, a.message);
  }

  // Goal payloads must name terms that occur in the actions.
  TermSet action_subterms;
  for (const ActionStep& a : spec.actions)
    for (const Term& s : subterms(a.message)) action_subterms.insert(s);
  for (const Goal& g : spec.goals) {
    for (const Term& s : subterms(g.payload)) {
      if (s.is(TermKind::Variable) && !action_subterms.count(s))
        out.push_back(Violation{-1, s, "goal payload names a term absent from every action"});
    }
  }
  return out;
}

}  // namespace anbp
