#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "anbp/deduction.hpp"
#include "support/closure_oracle.hpp"

using namespace anbp;

namespace {

FunctionSymbol fn_hash{"hash", 1, true};
FunctionSymbol fn_sk{"sk", 1, true};

Term a() { return Term::constant("a"); }
Term b() { return Term::constant("b"); }
Term n() { return Term::constant("n"); }
Term k1() { return Term::constant("k1"); }
Term m() { return Term::constant("m"); }
Term hash(Term t) { return Term::apply(fn_hash, {std::move(t)}); }
Term sk_M() { return Term::apply(fn_sk, {Term::agent("M")}); }

Knowledge with_functions(Knowledge k) {
  k.add_function(fn_hash);
  k.add_function(fn_sk);
  return k;
}

}  // namespace

TEST_CASE("analyze decomposes pairs and signatures but not hashes") {
  Knowledge k1a = analyze(Knowledge::of({Term::pair(a(), b())}));
  CHECK(k1a.contains(Term::pair(a(), b())));
  CHECK(k1a.contains(a()));
  CHECK(k1a.contains(b()));
  CHECK(k1a.facts().size() == 3);

  // A signature reveals its payload and which key verifies it, never the
  // signing key itself.
  Term blob = Term::signed_by(Term::private_key_of(sk_M()), n());
  Knowledge k2 = analyze(Knowledge::of({blob}));
  CHECK(k2.contains(n()));
  CHECK(k2.contains(sk_M()));
  CHECK_FALSE(k2.contains(Term::private_key_of(sk_M())));

  Knowledge k3 = analyze(Knowledge::of({hash(n())}));
  CHECK(k3.facts() == TermSet{hash(n())});
}

TEST_CASE("derives composition rules") {
  CHECK(derives(Knowledge::of({a()}), a()));

  // Signing needs the private key, holding the public part is not enough.
  Knowledge pub = Knowledge::of({k1(), m()});
  CHECK_FALSE(derives(pub, Term::signed_by(Term::private_key_of(k1()), m())));

  Knowledge priv = Knowledge::of({Term::private_key_of(k1()), m()});
  CHECK(derives(priv, Term::signed_by(Term::private_key_of(k1()), m())));

  Knowledge fns = with_functions(Knowledge::of({a(), b()}));
  CHECK(derives(fns, Term::pair(hash(a()), b())));
  CHECK_FALSE(derives(fns, hash(n())));  // n unknown
}

TEST_CASE("instantiate: depth 0 is known facts") {
  Knowledge k = Knowledge::of({a(), b()});
  std::vector<Substitution> subs = instantiate(k, Term::variable("X"), 0);
  REQUIRE(subs.size() == 2);
  CHECK(*subs[0].lookup("X") == a());
  CHECK(*subs[1].lookup("X") == b());
}

TEST_CASE("instantiate: depth 1 composes a pair") {
  Knowledge k = Knowledge::of({a()});
  std::vector<Substitution> subs = instantiate(k, Term::pair(Term::variable("X"), Term::variable("Y")), 1);
  bool found = false;
  for (const Substitution& s : subs)
    if (*s.lookup("X") == a() && *s.lookup("Y") == a()) found = true;
  CHECK(found);
  CHECK(instantiate(k, Term::pair(Term::variable("X"), Term::variable("Y")), 0).empty());
}

TEST_CASE("instantiate: matching against knowledge reaches under hashes") {
  Knowledge k = with_functions(Knowledge::of({hash(n())}));
  std::vector<Substitution> subs = instantiate(k, hash(Term::variable("X")), 0);
  REQUIRE(subs.size() == 1);
  CHECK(*subs[0].lookup("X") == n());
  CHECK_FALSE(derives(k, n()));  // the binding does not make the preimage derivable
}

TEST_CASE("instantiate replays unforgeable signed blobs") {
  Term blob = Term::signed_by(Term::private_key_of(sk_M()),
                              Term::pair(Term::fresh("r", 0, "Number"), b()));
  Knowledge k = Knowledge::of({blob});
  Term pattern = Term::signed_by(Term::private_key_of(sk_M()),
                                 Term::pair(Term::variable("R", "Number"), b()));
  std::vector<Substitution> subs = instantiate(k, pattern, 2);
  REQUIRE(subs.size() == 1);
  CHECK(*subs[0].lookup("R") == Term::fresh("r", 0, "Number"));
}

TEST_CASE("derives agrees with the closure oracle on random inputs") {
  std::mt19937 rng(2024);
  auto pick = [&](int n_) { return std::uniform_int_distribution<int>(0, n_ - 1)(rng); };
  std::vector<Term> pool = {a(),
                            b(),
                            n(),
                            k1(),
                            Term::private_key_of(k1()),
                            hash(a()),
                            Term::pair(a(), hash(b())),
                            Term::signed_by(Term::private_key_of(k1()), Term::pair(a(), n())),
                            Term::pair(Term::pair(a(), b()), n())};
  std::function<Term(int)> goal_gen = [&](int depth) -> Term {
    if (depth == 0) return pool[pick(4)];
    switch (pick(4)) {
      case 0:
        return pool[pick(static_cast<int>(pool.size()))];
      case 1:
        return Term::pair(goal_gen(depth - 1), goal_gen(depth - 1));
      case 2:
        return hash(goal_gen(depth - 1));
      default:
        return Term::signed_by(Term::private_key_of(k1()), goal_gen(depth - 1));
    }
  };
  for (int i = 0; i < 2000; ++i) {
    Knowledge k;
    int facts = pick(6);
    for (int j = 0; j < facts; ++j) k.add(pool[pick(static_cast<int>(pool.size()))]);
    k.add_function(fn_hash);
    Term goal = goal_gen(3);
    CAPTURE(goal.to_string());
    CHECK(derives(k, goal) == oracle::oracle_derives(k, goal));
  }
}

TEST_CASE("derives is monotone in the knowledge") {
  std::mt19937 rng(5);
  auto pick = [&](int n_) { return std::uniform_int_distribution<int>(0, n_ - 1)(rng); };
  std::vector<Term> pool = {a(), b(), n(), k1(), Term::private_key_of(k1()), hash(a()),
                            Term::pair(a(), b())};
  for (int i = 0; i < 500; ++i) {
    Knowledge small = with_functions(Knowledge{});
    Knowledge big = with_functions(Knowledge{});
    for (const Term& t : pool) {
      bool in_small = pick(2) == 0;
      if (in_small) small.add(t);
      if (in_small || pick(2) == 0) big.add(t);
    }
    Term goal = pool[pick(static_cast<int>(pool.size()))];
    if (pick(2) == 0) goal = Term::pair(goal, pool[pick(static_cast<int>(pool.size()))]);
    if (derives(small, goal)) CHECK(derives(big, goal));
  }
}

TEST_CASE("private keys are never derivable unless held") {
  std::vector<Term> candidates = {k1(), sk_M(), hash(a()), Term::pair(a(), b())};
  Knowledge k = with_functions(Knowledge::of({a(), b(), k1(), sk_M(), hash(a())}));
  for (const Term& c : candidates) CHECK_FALSE(derives(k, Term::private_key_of(c)));

  // Even analyzing a signature only exposes the verification key.
  Knowledge k2 = Knowledge::of({Term::signed_by(Term::private_key_of(k1()), m())});
  CHECK_FALSE(derives(k2, Term::private_key_of(k1())));
}

TEST_CASE("instantiate lists are duplicate-free and deterministic") {
  Knowledge k = with_functions(Knowledge::of({a(), b(), Term::pair(a(), b())}));
  Term pattern = Term::pair(Term::variable("X"), Term::variable("Y"));
  std::vector<Substitution> first = instantiate(k, pattern, 2);
  std::vector<Substitution> second = instantiate(k, pattern, 2);
  CHECK(first == second);
  std::set<Substitution> dedup(first.begin(), first.end());
  CHECK(dedup.size() == first.size());
}
