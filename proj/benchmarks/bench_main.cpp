#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "anbp/bip70/crypto.hpp"
#include "anbp/deduction.hpp"
#include "anbp/dsl.hpp"
#include "anbp/search.hpp"

namespace {

std::string load_fixture(const char* name) {
  std::ifstream in(std::string(ANBP_FIXTURE_DIR) + "/" + name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string& baseline_text() {
  static const std::string text = load_fixture("bip70_baseline.anbp");
  return text;
}

anbp::ProtocolSpec baseline_expanded() {
  return anbp::expand(anbp::dsl::parse(baseline_text()));
}

anbp::Knowledge sample_knowledge() {
  using anbp::Term;
  anbp::FunctionSymbol hash{"hash", 1, true};
  anbp::Knowledge k;
  k.add_function(hash);
  Term key = Term::constant("k");
  k.add(Term::constant("a"));
  k.add(Term::constant("b"));
  k.add(Term::private_key_of(key));
  k.add(Term::apply(hash, {Term::constant("a")}));
  k.add(Term::signed_by(Term::private_key_of(key),
                        Term::pair(Term::constant("a"), Term::constant("b"))));
  return k;
}

void BM_ParseBaseline(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(anbp::dsl::parse(baseline_text()));
}
BENCHMARK(BM_ParseBaseline);

void BM_ExpandBaseline(benchmark::State& state) {
  anbp::ProtocolSpec spec = anbp::dsl::parse(baseline_text());
  for (auto _ : state) benchmark::DoNotOptimize(anbp::expand(spec));
}
BENCHMARK(BM_ExpandBaseline);

void BM_Unify(benchmark::State& state) {
  using anbp::Term;
  anbp::FunctionSymbol hash{"hash", 1, true};
  Term lhs = Term::signed_by(
      Term::private_key_of(Term::variable("K")),
      Term::tuple({Term::apply(hash, {Term::variable("X")}), Term::variable("Y"),
                   Term::constant("c")}));
  Term rhs = Term::signed_by(
      Term::private_key_of(Term::constant("k")),
      Term::tuple({Term::apply(hash, {Term::constant("a")}), Term::pair(Term::constant("a"),
                   Term::constant("b")), Term::constant("c")}));
  for (auto _ : state) benchmark::DoNotOptimize(anbp::unify(lhs, rhs));
}
BENCHMARK(BM_Unify);

void BM_Analyze(benchmark::State& state) {
  anbp::Knowledge k = sample_knowledge();
  for (auto _ : state) benchmark::DoNotOptimize(anbp::analyze(k));
}
BENCHMARK(BM_Analyze);

void BM_Derives(benchmark::State& state) {
  using anbp::Term;
  anbp::Knowledge k = sample_knowledge();
  Term goal = Term::signed_by(Term::private_key_of(Term::constant("k")),
                              Term::pair(Term::constant("b"), Term::constant("a")));
  for (auto _ : state) benchmark::DoNotOptimize(anbp::derives(k, goal));
}
BENCHMARK(BM_Derives);

void BM_Instantiate(benchmark::State& state) {
  using anbp::Term;
  anbp::Knowledge k = sample_knowledge();
  Term pattern = Term::pair(Term::variable("X"), Term::variable("Y"));
  for (auto _ : state) benchmark::DoNotOptimize(anbp::instantiate(k, pattern, 2));
}
BENCHMARK(BM_Instantiate);

void BM_CheckBaseline(benchmark::State& state) {
  anbp::ProtocolSpec spec = baseline_expanded();
  anbp::SearchConfig cfg;
  cfg.sessions = 1;
  for (auto _ : state) benchmark::DoNotOptimize(anbp::check(spec, cfg));
}
BENCHMARK(BM_CheckBaseline);

void BM_CheckEndorsed(benchmark::State& state) {
  anbp::ProtocolSpec spec = anbp::expand(anbp::dsl::parse(load_fixture("bip70_endorsed.anbp")));
  anbp::SearchConfig cfg;
  cfg.sessions = 1;
  for (auto _ : state) benchmark::DoNotOptimize(anbp::check(spec, cfg));
}
BENCHMARK(BM_CheckEndorsed);

void BM_SignVerify(benchmark::State& state, const char* backend_name) {
  auto backend = anbp::bip70::make_backend(backend_name);
  anbp::bip70::Rng rng(5);
  anbp::bip70::KeyPair kp = backend->generate(rng);
  anbp::bip70::Bytes msg = rng.bytes(128);
  for (auto _ : state) {
    anbp::bip70::Bytes sig = backend->sign(kp.secret_key, msg);
    benchmark::DoNotOptimize(backend->verify(kp.public_key, msg, sig));
  }
}
BENCHMARK_CAPTURE(BM_SignVerify, ed25519, "ed25519");
BENCHMARK_CAPTURE(BM_SignVerify, toy, "toy");

}  // namespace

BENCHMARK_MAIN();
