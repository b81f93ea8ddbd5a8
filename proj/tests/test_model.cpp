#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anbp/dsl.hpp"
#include "anbp/model.hpp"
#include "support/fixtures.hpp"

using namespace anbp;

namespace {

ProtocolSpec load(const std::string& name) {
  return dsl::parse(testutil::load_fixture(name));
}

const char* kFixtures[] = {"bip70_baseline.anbp", "bip70_endorsed.anbp",
                           "bip70_merchant_bound.anbp", "bip70_endorsed_no_endorsement.anbp"};

Term var(const char* label, const char* sort) { return Term::variable(label, sort); }

}  // namespace

TEST_CASE("all shipped fixtures validate cleanly") {
  for (const char* f : kFixtures) {
    CAPTURE(f);
    ProtocolSpec spec = load(f);
    std::vector<Violation> violations = validate(spec);
    for (const Violation& v : violations) MESSAGE(v.to_string());
    CHECK(violations.empty());
  }
}

TEST_CASE("expanding the request macro yields the signed seven-field tuple") {
  ProtocolSpec spec = load("bip70_baseline.anbp");
  ProtocolSpec flat = expand(spec);

  FunctionSymbol hash{"hash", 1, true};
  FunctionSymbol sk{"sk", 1, true};
  Term expected = Term::signed_by(
      Term::private_key_of(Term::apply(sk, {var("M", "Agent")})),
      Term::tuple({Term::apply(hash, {var("B_M", "PublicKey")}), var("beta", "Number"),
                   Term::constant("t1", "Number"), Term::constant("t2", "Number"),
                   var("m_M", "Number"), var("u_M", "Number"), var("z_M", "Number")}));
  CHECK(flat.actions[1].message == expected);
}

TEST_CASE("expanding the input list splices the per-customer signatures") {
  ProtocolSpec spec = load("bip70_baseline.anbp");
  Term pi = expand_term(spec, Term::variable("pi"));
  std::vector<Term> inputs = pi.flatten();
  REQUIRE(inputs.size() == 2);
  for (const Term& in : inputs) {
    REQUIRE(in.is(TermKind::Signed));
    // each one: sign(inv(B_Ci), (hash(T_Ci), B_Ci))
    CHECK(in.key().is(TermKind::PrivKey));
    std::vector<Term> payload = in.payload().flatten();
    REQUIRE(payload.size() == 2);
    CHECK(payload[0].is(TermKind::Apply));
    CHECK(payload[0].function().label == "hash");
    CHECK(payload[1] == in.key().inner());
  }
}

TEST_CASE("expand is idempotent and identity without definitions") {
  ProtocolSpec spec = load("bip70_endorsed.anbp");
  ProtocolSpec once = expand(spec);
  ProtocolSpec twice = expand(once);
  CHECK(once.equivalent(twice));

  ProtocolSpec plain = dsl::parse(
      "Protocol: P\n"
      "Types:\n Agent A, B;\n Number x;\n"
      "Knowledge:\n A: A, B;\n B: A, B;\n"
      "Actions:\n A *->* B: x\n"
      "Goals:\n x secret between A, B\n");
  CHECK(expand(plain).equivalent(plain));
}

TEST_CASE("cyclic definitions are reported with the cycle") {
  ProtocolSpec spec = dsl::parse(
      "Protocol: C\n"
      "Types:\n Agent A, B;\n Number x;\n Function f;\n"
      "Definitions:\n p := (x, q);\n q := f(p);\n"
      "Knowledge:\n A: A, B, f;\n B: A, B, f;\n"
      "Actions:\n A *->* B: p\n"
      "Goals:\n x secret between A, B\n");
  CHECK_THROWS_AS((void)expand(spec), DefinitionCycleError);
  try {
    (void)expand(spec);
  } catch (const DefinitionCycleError& e) {
    CHECK(e.cycle.size() >= 2);
    CHECK(std::string(e.what()).find("p") != std::string::npos);
    CHECK(std::string(e.what()).find("q") != std::string::npos);
  }
}

TEST_CASE("senders cannot use values they never learned") {
  // B tries to forward the signed request without ever receiving it.
  ProtocolSpec spec = dsl::parse(
      "Protocol: Bad\n"
      "Types:\n Agent A, B;\n Number x, z;\n Function sk;\n"
      "Definitions:\n rho := sign(inv(sk(A)), (x, z));\n"
      "Knowledge:\n A: A, B, sk, inv(sk(A));\n B: A, B, sk;\n"
      "Actions:\n B *->* A: rho\n"
      "Goals:\n z secret between A, B\n");
  std::vector<Violation> violations = validate(spec);
  REQUIRE(violations.size() >= 1);
  CHECK(violations[0].action_index == 0);
  CHECK(violations[0].missing.is(TermKind::Signed));  // the whole blob is out of reach
}

TEST_CASE("receivers match hashes of unknown values opaquely") {
  ProtocolSpec spec = dsl::parse(
      "Protocol: Opaque\n"
      "Types:\n Agent A, B;\n Number x, y;\n Function hash;\n"
      "Knowledge:\n A: A, B, hash;\n B: A, B, hash;\n"
      "Actions:\n A *->* B: (y, hash(x))\n"
      "Goals:\n y secret between A, B\n");
  CHECK(validate(spec).empty());
}

TEST_CASE("goal payloads name terms that occur in the expanded actions") {
  for (const char* f : kFixtures) {
    CAPTURE(f);
    ProtocolSpec flat = expand(load(f));
    TermSet in_actions;
    for (const ActionStep& a : flat.actions)
      for (const Term& s : subterms(a.message)) in_actions.insert(s);
    for (const Goal& g : flat.goals)
      for (const Term& s : subterms(g.payload))
        if (s.is(TermKind::Variable)) CHECK(in_actions.count(s) == 1);
  }
}

TEST_CASE("freshness assigns minters in action order") {
  ProtocolSpec flat = expand(load("bip70_baseline.anbp"));
  std::map<std::string, FreshInfo> fresh = freshness(flat);
  CHECK(fresh.at("B_M").minted_by == "M");
  CHECK(fresh.at("B_M").first_action == 1);
  CHECK(fresh.at("z_M").minted_by == "M");
  CHECK(fresh.at("R_C1").minted_by == "C1");
  CHECK(fresh.at("R_C1").first_action == 2);
  CHECK(fresh.at("R_C2").minted_by == "C2");
  CHECK(fresh.at("beta_C2").minted_by == "C2");
  CHECK(fresh.at("beta_C1").minted_by == "C1");
  CHECK(fresh.at("beta_C1").first_action == 4);
  CHECK(fresh.at("ack_M").minted_by == "M");
  CHECK(fresh.at("ack_M").first_action == 5);
  CHECK_FALSE(fresh.count("paynow"));  // constants are not fresh
  CHECK_FALSE(fresh.count("t1"));
}

TEST_CASE("channel kinds map to the four arrow tokens") {
  CHECK(std::string(ChannelKind::insecure().token()) == "->");
  CHECK(std::string(ChannelKind::authentic_only().token()) == "*->");
  CHECK(std::string(ChannelKind::confidential_only().token()) == "->*");
  CHECK(std::string(ChannelKind::secure().token()) == "*->*");
  for (const char* tok : {"->", "*->", "->*", "*->*"}) {
    auto ck = ChannelKind::from_token(tok);
    REQUIRE(ck);
    CHECK(std::string(ck->token()) == tok);
  }
  CHECK_FALSE(ChannelKind::from_token("=>"));
}
