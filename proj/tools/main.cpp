#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "anbp/bip70/bench.hpp"
#include "anbp/bip70/scenario.hpp"
#include "anbp/dsl.hpp"
#include "anbp/search.hpp"

namespace {

// 0 = safe / scenario clean, 1 = usage or input error, 2 = attack found or
// deniability, 3 = inconclusive (state budget).
enum ExitCode { kOk = 0, kError = 1, kAttack = 2, kInconclusive = 3 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

anbp::ProtocolSpec load_model(const std::string& path) {
  std::string text = read_file(path);
  try {
    return anbp::dsl::parse(text);
  } catch (const anbp::dsl::ParseError& e) {
    std::ostringstream msg;
    msg << path << ':' << e.span.line << ':' << e.span.column << ": "
        << (e.semantic ? "error: " : "syntax error: ") << e.what();
    throw std::runtime_error(msg.str());
  }
}

const char* verdict_name(const anbp::Verdict& v) {
  switch (v.kind) {
    case anbp::Verdict::Kind::Safe:
      return "safe";
    case anbp::Verdict::Kind::Attack:
      return "attack";
    case anbp::Verdict::Kind::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

int run_check(const std::string& path, int sessions, int depth, long max_states,
              const std::vector<std::string>& corrupt, int workers,
              const std::string& trace_out) {
  anbp::ProtocolSpec spec = load_model(path);
  std::vector<anbp::Violation> violations = anbp::validate(spec);
  if (!violations.empty()) {
    for (const anbp::Violation& v : violations)
      std::cerr << path << ": validation: " << v.to_string() << "\n";
    return kError;
  }
  anbp::ProtocolSpec expanded = anbp::expand(spec);

  anbp::SearchConfig cfg;
  cfg.sessions = sessions;
  cfg.intruder_depth = depth;
  cfg.max_states = max_states;
  cfg.workers = workers;
  if (!corrupt.empty()) {
    std::set<std::string> roles;
    for (const std::string& r : corrupt)
      if (r != "none") roles.insert(r);
    cfg.intruder_roles = roles;
  }

  anbp::CheckResult res = anbp::check_goals(expanded, cfg);
  std::cout << "check model=" << path << " sessions=" << cfg.sessions
            << " depth=" << cfg.intruder_depth << " states=" << res.states_explored << "\n";
  for (size_t gi = 0; gi < res.per_goal.size(); ++gi) {
    const anbp::GoalVerdict& gv = res.per_goal[gi];
    std::cout << "goal " << gi << " verdict=" << verdict_name(gv.verdict) << " :: "
              << gv.goal.to_string() << "\n";
  }
  const anbp::AttackTrace* first = res.first_attack();
  if (first) {
    std::string serialized = anbp::serialize_trace(*first);
    std::cout << serialized;
    if (!trace_out.empty()) {
      std::ofstream out(trace_out, std::ios::binary);
      if (!out) {
        std::cerr << "cannot write " << trace_out << "\n";
        return kError;
      }
      out << serialized;
    }
    std::cout << "result attack\n";
    return kAttack;
  }
  if (res.any_inconclusive()) {
    std::cout << "result inconclusive\n";
    return kInconclusive;
  }
  std::cout << "result safe\n";
  return kOk;
}

int run_replay(const std::string& trace_path, const std::string& model_path) {
  anbp::ProtocolSpec spec = load_model(model_path);
  std::string text = read_file(trace_path);
  anbp::AttackTrace trace = anbp::parse_trace(text, spec);
  anbp::Verdict v = anbp::replay(spec, trace);
  std::cout << "replay model=" << model_path << " steps=" << trace.steps.size() << "\n";
  std::cout << "goal " << trace.goal_index << " verdict=" << verdict_name(v) << " :: "
            << trace.goal.to_string() << "\n";
  std::cout << "result attack\n";
  return kAttack;
}

int run_scenario(const std::string& protocol, const std::string& wallet,
                 const std::string& backend_name, uint64_t seed) {
  std::optional<anbp::bip70::Variant> variant = anbp::bip70::variant_from(protocol);
  if (!variant) {
    std::cerr << "unknown protocol variant '" << protocol << "'\n";
    return kError;
  }
  if (wallet != "honest" && wallet != "malicious") {
    std::cerr << "unknown wallet mode '" << wallet << "'\n";
    return kError;
  }
  auto backend = anbp::bip70::make_backend(backend_name);
  if (!backend) {
    std::cerr << "unknown backend '" << backend_name << "'\n";
    return kError;
  }
  anbp::bip70::ScenarioOptions opts;
  opts.seed = seed;
  anbp::bip70::ScenarioReport report = anbp::bip70::run_silkroad_scenario(
      *variant, wallet == "honest" ? anbp::bip70::WalletMode::Honest
                                   : anbp::bip70::WalletMode::Malicious,
      *backend, opts);
  std::cout << report.to_text();
  return report.deniability ? kAttack : kOk;
}

int run_bench(int iterations, const std::string& backend_name) {
  auto backend = anbp::bip70::make_backend(backend_name);
  if (!backend) {
    std::cerr << "unknown backend '" << backend_name << "'\n";
    return kError;
  }
  if (iterations < 100)
    std::cerr << "warning: fewer than 100 iterations, means will be noisy\n";
  anbp::bip70::BenchTable table = anbp::bip70::bench(iterations, *backend);
  std::cout << table.to_text();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic analyzer and executable model for the BIP70 payment protocol"};
  app.require_subcommand(1);

  // check
  std::string model_path;
  int sessions = 1;
  int depth = 2;
  long max_states = 500000;
  std::vector<std::string> corrupt;
  int workers = 1;
  std::string trace_out;
  CLI::App* check = app.add_subcommand("check", "Bounded model check of a protocol file");
  check->add_option("model", model_path, "protocol file (.anbp)")->required();
  check->add_option("--sessions", sessions, "parallel sessions (1 or 2)")
      ->check(CLI::Range(1, 2));
  check->add_option("--depth", depth, "intruder composition depth")->check(CLI::Range(0, 64));
  check->add_option("--max-states", max_states, "state budget");
  check->add_option("--corrupt", corrupt,
                    "role(s) the intruder plays; 'none' leaves all roles honest");
  check->add_option("--workers", workers, "worker threads")->check(CLI::Range(1, 64));
  check->add_option("--trace-out", trace_out, "write the attack trace to this file");

  // replay
  std::string trace_path, replay_model;
  CLI::App* rep = app.add_subcommand("replay", "Re-execute a recorded attack trace");
  rep->add_option("trace", trace_path, "trace file")->required();
  rep->add_option("model", replay_model, "protocol file (.anbp)")->required();

  // scenario
  std::string protocol = "baseline";
  std::string wallet = "malicious";
  std::string scenario_backend = "ed25519";
  uint64_t seed = 7;
  CLI::App* scen = app.add_subcommand("scenario", "Run the concrete refund-routing scenario");
  scen->add_option("--protocol", protocol, "baseline | endorsed | merchant-bound");
  scen->add_option("--wallet", wallet, "honest | malicious");
  scen->add_option("--backend", scenario_backend, "signature backend");
  scen->add_option("--seed", seed, "deterministic key-generation seed");

  // bench
  int iterations = 100;
  std::string bench_backend = "ed25519";
  CLI::App* ben = app.add_subcommand("bench", "Time the protocol step analogues");
  ben->add_option("--iterations", iterations, "iterations per step")->check(CLI::Range(1, 1000000));
  ben->add_option("--backend", bench_backend, "signature backend");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  try {
    if (check->parsed())
      return run_check(model_path, sessions, depth, max_states, corrupt, workers, trace_out);
    if (rep->parsed()) return run_replay(trace_path, replay_model);
    if (scen->parsed()) return run_scenario(protocol, wallet, scenario_backend, seed);
    if (ben->parsed()) return run_bench(iterations, bench_backend);
  } catch (const anbp::ReplayError& e) {
    std::cerr << "replay error";
    if (e.step_index >= 0) std::cerr << " at step " << e.step_index;
    std::cerr << ": " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
