#include "anbp/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace anbp {
namespace dsl {

namespace {

enum class Tok {
  Name,
  Colon,
  Define,  // :=
  Comma,
  Semi,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Arrow,  // one of -> *-> ->* *->*
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

const std::set<std::string> kSectionWords = {"Types", "Definitions", "Knowledge", "Actions",
                                             "Goals"};
const std::set<std::string> kKindWords = {"Agent", "Number", "Function", "PublicKey"};
const std::set<std::string> kReserved = {"Protocol", "Types",  "Definitions", "Knowledge",
                                         "Actions",  "Goals",  "Agent",       "Number",
                                         "Function", "PublicKey", "weakly",   "authenticates",
                                         "on",       "secret", "between",     "inv",
                                         "sign"};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }
  const Token& peek2() {
    if (!next_) next_ = lex();
    return *next_;
  }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    if (next_) {
      current_ = *next_;
      next_.reset();
    } else {
      current_ = lex();
    }
  }

  char cur() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void bump() {
    if (pos_ >= text_.size()) return;
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  Token lex() {
    for (;;) {
      while (std::isspace(static_cast<unsigned char>(cur()))) bump();
      if (cur() == '#') {
        while (cur() != '\n' && cur() != '\0') bump();
        continue;
      }
      break;
    }
    SourceSpan at{line_, col_, 1};
    char c = cur();
    if (c == '\0') return Token{Tok::End, "", at};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (std::isalnum(static_cast<unsigned char>(cur())) || cur() == '_') bump();
      std::string name(text_.substr(start, pos_ - start));
      at.length = static_cast<int>(name.size());
      return Token{Tok::Name, std::move(name), at};
    }
    switch (c) {
      case ',':
        bump();
        return Token{Tok::Comma, ",", at};
      case ';':
        bump();
        return Token{Tok::Semi, ";", at};
      case '(':
        bump();
        return Token{Tok::LParen, "(", at};
      case ')':
        bump();
        return Token{Tok::RParen, ")", at};
      case '[':
        bump();
        return Token{Tok::LBracket, "[", at};
      case ']':
        bump();
        return Token{Tok::RBracket, "]", at};
      case ':':
        bump();
        if (cur() == '=') {
          bump();
          at.length = 2;
          return Token{Tok::Define, ":=", at};
        }
        return Token{Tok::Colon, ":", at};
      case '*':
      case '-': {
        size_t start = pos_;
        if (cur() == '*') bump();
        if (cur() == '-') bump();
        if (cur() == '>') bump();
        if (cur() == '*') bump();
        std::string tok(text_.substr(start, pos_ - start));
        at.length = static_cast<int>(tok.size());
        if (ChannelKind::from_token(tok)) return Token{Tok::Arrow, std::move(tok), at};
        throw ParseError("malformed channel arrow '" + tok + "'", at,
                         {"->", "*->", "->*", "*->*"});
      }
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", at);
    }
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_;
  std::optional<Token> next_;
};

// Raw identifiers keep their first-occurrence span so semantic errors can
// point at the source; atoms are resolved against declarations afterwards.
struct Parser {
  explicit Parser(std::string_view text) : lex(text) {}

  Lexer lex;
  ProtocolSpec spec;
  std::vector<std::pair<std::string, SourceSpan>> atom_occurrences;
  std::set<std::string> declared_functions;
  std::map<std::string, unsigned> function_arity;
  std::map<std::string, SourceSpan> function_first_use;

  [[noreturn]] void fail(const Token& t, std::vector<std::string> expected) {
    std::ostringstream msg;
    msg << "syntax error at '" << (t.kind == Tok::End ? "end of input" : t.text) << "', expected ";
    for (size_t i = 0; i < expected.size(); ++i) {
      if (i) msg << " | ";
      msg << expected[i];
    }
    throw ParseError(msg.str(), t.span, std::move(expected));
  }

  [[noreturn]] void semantic_fail(const std::string& msg, SourceSpan span) {
    throw ParseError(msg, span, {}, true);
  }

  Token expect(Tok kind, const std::string& what) {
    if (lex.peek().kind != kind) fail(lex.peek(), {what});
    return lex.take();
  }

  Token expect_word(const std::string& word) {
    if (lex.peek().kind != Tok::Name || lex.peek().text != word) fail(lex.peek(), {word});
    return lex.take();
  }

  bool at_word(const std::string& word) {
    return lex.peek().kind == Tok::Name && lex.peek().text == word;
  }

  std::string expect_identifier(const std::string& what) {
    if (lex.peek().kind != Tok::Name) fail(lex.peek(), {what});
    Token t = lex.take();
    if (kReserved.count(t.text))
      semantic_fail("reserved word '" + t.text + "' used as " + what, t.span);
    return t.text;
  }

  bool at_section_header() {
    return lex.peek().kind == Tok::Name && kSectionWords.count(lex.peek().text) &&
           lex.peek2().kind == Tok::Colon;
  }

  // term := NAME | NAME "(" terms ")" | "(" terms ")" | inv/sign applications
  Term parse_term() {
    const Token& t = lex.peek();
    if (t.kind == Tok::LParen) {
      lex.take();
      std::vector<Term> parts{parse_term()};
      while (lex.peek().kind == Tok::Comma) {
        lex.take();
        parts.push_back(parse_term());
      }
      expect(Tok::RParen, ")");
      return Term::tuple(std::move(parts));
    }
    if (t.kind != Tok::Name) fail(t, {"term"});
    Token name = lex.take();
    // Only declared functions (and the built-in inv/sign forms) take
    // arguments; after any other name, '(' starts a new construct. This is
    // what disambiguates a goal payload from the parenthesized term opening
    // the next goal.
    bool applicable =
        name.text == "inv" || name.text == "sign" || declared_functions.count(name.text) != 0;
    if (applicable && lex.peek().kind == Tok::LParen) {
      lex.take();
      std::vector<Term> args{parse_term()};
      while (lex.peek().kind == Tok::Comma) {
        lex.take();
        args.push_back(parse_term());
      }
      Token close = expect(Tok::RParen, ")");
      if (name.text == "inv") {
        if (args.size() != 1) semantic_fail("inv takes exactly one argument", name.span);
        return Term::private_key_of(std::move(args[0]));
      }
      if (name.text == "sign") {
        if (args.size() != 2) semantic_fail("sign takes exactly two arguments", name.span);
        return Term::signed_by(std::move(args[0]), std::move(args[1]));
      }
      unsigned arity = static_cast<unsigned>(args.size());
      auto [it, fresh] = function_arity.emplace(name.text, arity);
      if (!fresh && it->second != arity)
        semantic_fail("function '" + name.text + "' used with inconsistent arity", name.span);
      function_first_use.emplace(name.text, name.span);
      (void)close;
      return Term::apply(FunctionSymbol{name.text, arity, true}, std::move(args));
    }
    if (kReserved.count(name.text))
      semantic_fail("reserved word '" + name.text + "' used as identifier", name.span);
    atom_occurrences.emplace_back(name.text, name.span);
    // Placeholder atom; resolved against declarations once all sections are in.
    return Term::variable(name.text);
  }

  void parse_types() {
    bool any = false;
    while (lex.peek().kind == Tok::Name && kKindWords.count(lex.peek().text) &&
           !at_section_header()) {
      std::string kind = lex.take().text;
      for (;;) {
        Token name = expect(Tok::Name, "name");
        if (kReserved.count(name.text))
          semantic_fail("reserved word '" + name.text + "' declared as a symbol", name.span);
        if (spec.sorts.count(name.text))
          semantic_fail("duplicate declaration of '" + name.text + "'", name.span);
        spec.sorts[name.text] = kind;
        if (kind == "Agent") spec.roles.push_back(name.text);
        if (kind == "Function") declared_functions.insert(name.text);
        if (lex.peek().kind != Tok::Comma) break;
        lex.take();
      }
      expect(Tok::Semi, ";");
      any = true;
    }
    if (!any) fail(lex.peek(), {"Agent", "Number", "Function", "PublicKey"});
  }

  void parse_definitions() {
    while (lex.peek().kind == Tok::Name && !at_section_header()) {
      Token name = lex.take();
      if (kReserved.count(name.text))
        semantic_fail("reserved word '" + name.text + "' used as definition name", name.span);
      if (spec.has_definition(name.text))
        semantic_fail("duplicate definition of '" + name.text + "'", name.span);
      if (spec.sorts.count(name.text))
        semantic_fail("definition '" + name.text + "' collides with a declared symbol",
                      name.span);
      expect(Tok::Define, ":=");
      Term body = parse_term();
      expect(Tok::Semi, ";");
      spec.definitions.emplace_back(name.text, std::move(body));
    }
  }

  void parse_knowledge() {
    bool any = false;
    while (lex.peek().kind == Tok::Name && !at_section_header()) {
      Token role = lex.take();
      expect(Tok::Colon, ":");
      std::vector<Term> terms{parse_term()};
      while (lex.peek().kind == Tok::Comma) {
        lex.take();
        terms.push_back(parse_term());
      }
      expect(Tok::Semi, ";");
      auto [it, fresh] = spec.knowledge.emplace(role.text, std::move(terms));
      if (!fresh) semantic_fail("duplicate knowledge section for '" + role.text + "'", role.span);
      knowledge_spans.emplace(role.text, role.span);
      any = true;
    }
    if (!any) fail(lex.peek(), {"role name"});
  }

  struct Endpoint {
    std::string role;
    bool pseudonymous = false;
    SourceSpan span;
  };

  Endpoint parse_endpoint() {
    if (lex.peek().kind == Tok::LBracket) {
      Token open = lex.take();
      Token name = expect(Tok::Name, "role name");
      expect(Tok::RBracket, "]");
      return Endpoint{name.text, true, open.span};
    }
    Token name = expect(Tok::Name, "role name");
    return Endpoint{name.text, false, name.span};
  }

  void parse_actions() {
    bool any = false;
    while ((lex.peek().kind == Tok::Name || lex.peek().kind == Tok::LBracket) &&
           !at_section_header()) {
      Endpoint from = parse_endpoint();
      Token arrow = expect(Tok::Arrow, "channel arrow");
      Endpoint to = parse_endpoint();
      expect(Tok::Colon, ":");
      Term msg = parse_term();
      ActionStep step;
      step.sender = from.role;
      if (from.pseudonymous) step.sender_pseudonym = from.role;
      step.channel = *ChannelKind::from_token(arrow.text);
      step.receiver = to.role;
      if (to.pseudonymous) step.receiver_pseudonym = to.role;
      step.message = std::move(msg);
      step.span = from.span;
      if (step.sender == step.receiver)
        semantic_fail("action sends from '" + step.sender + "' to itself", from.span);
      endpoint_spans.push_back({from.span, to.span});
      spec.actions.push_back(std::move(step));
      any = true;
    }
    if (!any) fail(lex.peek(), {"action"});
  }

  void parse_goals() {
    bool any = false;
    while (lex.peek().kind == Tok::Name || lex.peek().kind == Tok::LParen) {
      if (at_section_header()) break;
      SourceSpan at = lex.peek().span;
      Term first = parse_term();
      Goal g;
      g.span = at;
      if (at_word("secret")) {
        lex.take();
        expect_word("between");
        g.kind = Goal::Kind::Secrecy;
        g.payload = std::move(first);
        g.among.push_back(expect_identifier("role name"));
        while (lex.peek().kind == Tok::Comma) {
          lex.take();
          g.among.push_back(expect_identifier("role name"));
        }
        goal_role_spans.push_back(at);
      } else {
        if (!first.is(TermKind::Variable))
          semantic_fail("authentication goal must start with a role name", at);
        g.authenticator = first.label();
        if (at_word("weakly")) {
          lex.take();
          expect_word("authenticates");
          g.kind = Goal::Kind::WeakAuth;
        } else if (at_word("authenticates")) {
          lex.take();
          g.kind = Goal::Kind::StrongAuth;
        } else {
          fail(lex.peek(), {"weakly", "authenticates", "secret"});
        }
        g.peer = expect_identifier("role name");
        expect_word("on");
        g.payload = parse_term();
        goal_role_spans.push_back(at);
      }
      spec.goals.push_back(std::move(g));
      any = true;
    }
    if (!any) fail(lex.peek(), {"goal"});
  }

  ProtocolSpec parse() {
    if (!at_word("Protocol")) fail(lex.peek(), {"Protocol:"});
    lex.take();
    expect(Tok::Colon, ":");
    spec.name = expect_identifier("protocol name");
    while (lex.peek().kind != Tok::End) {
      if (!at_section_header())
        fail(lex.peek(), {"Types:", "Definitions:", "Knowledge:", "Actions:", "Goals:"});
      std::string section = lex.take().text;
      expect(Tok::Colon, ":");
      if (section == "Types")
        parse_types();
      else if (section == "Definitions")
        parse_definitions();
      else if (section == "Knowledge")
        parse_knowledge();
      else if (section == "Actions")
        parse_actions();
      else
        parse_goals();
    }
    resolve();
    return std::move(spec);
  }

  // -- late resolution against declarations --------------------------------

  std::map<std::string, SourceSpan> knowledge_spans;
  std::vector<std::pair<SourceSpan, SourceSpan>> endpoint_spans;
  std::vector<SourceSpan> goal_role_spans;

  Term resolve_atom(const std::string& label, const std::set<std::string>& in_knowledge) {
    if (spec.has_definition(label)) return Term::variable(label);
    auto it = spec.sorts.find(label);
    if (it == spec.sorts.end()) return Term::variable(label);  // caught earlier
    const std::string& sort = it->second;
    if (sort == "Agent") return Term::variable(label, "Agent");
    if (sort == "Function") return Term::constant(label, "Function");
    if (in_knowledge.count(label)) return Term::constant(label, sort);
    return Term::variable(label, sort);
  }

  Term resolve_term(const Term& t, const std::set<std::string>& in_knowledge) {
    switch (t.kind()) {
      case TermKind::Variable:
        return resolve_atom(t.label(), in_knowledge);
      case TermKind::Pair:
        return Term::pair(resolve_term(t.left(), in_knowledge),
                          resolve_term(t.right(), in_knowledge));
      case TermKind::Apply: {
        std::vector<Term> as;
        for (const Term& a : t.args()) as.push_back(resolve_term(a, in_knowledge));
        return Term::apply(t.function(), std::move(as));
      }
      case TermKind::Signed:
        return Term::signed_by(resolve_term(t.key(), in_knowledge),
                               resolve_term(t.payload(), in_knowledge));
      case TermKind::PrivKey:
        return Term::private_key_of(resolve_term(t.inner(), in_knowledge));
      default:
        return t;
    }
  }

  void resolve() {
    // Unknown identifiers: anything that is neither declared nor defined.
    for (const auto& [label, span] : atom_occurrences) {
      if (!spec.sorts.count(label) && !spec.has_definition(label))
        semantic_fail("unknown identifier '" + label + "'", span);
    }
    // Function uses must be declared as Function.
    for (const auto& [label, span] : function_first_use) {
      auto it = spec.sorts.find(label);
      if (it == spec.sorts.end() || it->second != "Function")
        semantic_fail("'" + label + "' is applied as a function but not declared Function",
                      span);
    }
    for (const auto& [label, arity] : function_arity)
      spec.functions.push_back(FunctionSymbol{label, arity, true});

    // Names mentioned anywhere in initial knowledge become global constants
    // (when not agents or functions); everything else declared is a
    // template variable, minted fresh at first use by its sender.
    std::set<std::string> in_knowledge;
    for (const auto& [role, terms] : spec.knowledge) {
      if (!spec.is_role(role)) {
        semantic_fail("knowledge listed for undeclared role '" + role + "'",
                      knowledge_spans.at(role));
      }
      for (const Term& t : terms)
        for (const Term& s : subterms(t))
          if (s.is(TermKind::Variable)) in_knowledge.insert(s.label());
    }

    for (auto& [role, terms] : spec.knowledge)
      for (Term& t : terms) t = resolve_term(t, in_knowledge);
    for (auto& [name, body] : spec.definitions) body = resolve_term(body, in_knowledge);
    size_t ai = 0;
    for (ActionStep& a : spec.actions) {
      if (!spec.is_role(a.sender))
        semantic_fail("'" + a.sender + "' is not a declared Agent", endpoint_spans[ai].first);
      if (!spec.is_role(a.receiver))
        semantic_fail("'" + a.receiver + "' is not a declared Agent", endpoint_spans[ai].second);
      a.message = resolve_term(a.message, in_knowledge);
      ++ai;
    }
    size_t gi = 0;
    for (Goal& g : spec.goals) {
      SourceSpan at = goal_role_spans[gi++];
      if (g.kind == Goal::Kind::Secrecy) {
        for (const std::string& r : g.among)
          if (!spec.is_role(r)) semantic_fail("'" + r + "' is not a declared Agent", at);
      } else {
        if (!spec.is_role(g.authenticator))
          semantic_fail("'" + g.authenticator + "' is not a declared Agent", at);
        if (!spec.is_role(g.peer))
          semantic_fail("'" + g.peer + "' is not a declared Agent", at);
      }
      g.payload = resolve_term(g.payload, in_knowledge);
    }
  }
};

}  // namespace

ProtocolSpec parse(std::string_view text) {
  Parser p(text);
  return p.parse();
}

std::string print(const ProtocolSpec& spec) {
  std::ostringstream os;
  os << "Protocol: " << spec.name << "\n";

  os << "\nTypes:\n";
  const char* kinds[] = {"Agent", "Number", "Function", "PublicKey"};
  for (const char* kind : kinds) {
    std::vector<std::string> names;
    if (std::string(kind) == "Agent") {
      names = spec.roles;
    } else {
      for (const auto& [name, sort] : spec.sorts)
        if (sort == kind) names.push_back(name);
    }
    if (names.empty()) continue;
    os << "  " << kind << ' ';
    for (size_t i = 0; i < names.size(); ++i) {
      if (i) os << ", ";
      os << names[i];
    }
    os << ";\n";
  }

  if (!spec.definitions.empty()) {
    os << "\nDefinitions:\n";
    for (const auto& [name, body] : spec.definitions)
      os << "  " << name << " := " << body.to_string() << ";\n";
  }

  os << "\nKnowledge:\n";
  for (const std::string& role : spec.roles) {
    auto it = spec.knowledge.find(role);
    if (it == spec.knowledge.end()) continue;
    os << "  " << role << ": ";
    for (size_t i = 0; i < it->second.size(); ++i) {
      if (i) os << ", ";
      os << it->second[i].to_string();
    }
    os << ";\n";
  }

  os << "\nActions:\n";
  for (const ActionStep& a : spec.actions) {
    os << "  ";
    if (a.sender_pseudonym)
      os << '[' << a.sender << ']';
    else
      os << a.sender;
    os << ' ' << a.channel.token() << ' ';
    if (a.receiver_pseudonym)
      os << '[' << a.receiver << ']';
    else
      os << a.receiver;
    os << ": " << a.message.to_string() << "\n";
  }

  if (!spec.goals.empty()) {
    os << "\nGoals:\n";
    for (const Goal& g : spec.goals) os << "  " << g.to_string() << "\n";
  }
  return os.str();
}

}  // namespace dsl
}  // namespace anbp
