#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "support/fixtures.hpp"
#include "support/subprocess.hpp"

using testutil::CmdResult;
using testutil::run_cli;

namespace {

std::string fx(const char* name) { return testutil::fixture_path(name); }

// Minimal consumer for the line-oriented output: verifies machine
// parseability by actually parsing it back.
std::map<int, std::string> parse_goal_verdicts(const std::string& out) {
  std::map<int, std::string> verdicts;
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("goal ", 0) != 0) continue;
    std::istringstream ls(line);
    std::string word, verdict_field;
    int idx;
    ls >> word >> idx >> verdict_field;
    REQUIRE(verdict_field.rfind("verdict=", 0) == 0);
    verdicts[idx] = verdict_field.substr(8);
  }
  return verdicts;
}

std::string result_line(const std::string& out) {
  std::istringstream in(out);
  std::string line, last;
  while (std::getline(in, line))
    if (line.rfind("result ", 0) == 0) last = line;
  return last;
}

}  // namespace

TEST_CASE("check: baseline exits 2 with per-goal verdicts") {
  CmdResult r = run_cli("check " + fx("bip70_baseline.anbp") + " --sessions 1");
  CHECK(r.exit_code == 2);
  std::map<int, std::string> verdicts = parse_goal_verdicts(r.out);
  REQUIRE(verdicts.size() == 3);
  CHECK(verdicts[0] == "safe");
  CHECK(verdicts[1] == "attack");
  CHECK(verdicts[2] == "attack");
  CHECK(result_line(r.out) == "result attack");
}

TEST_CASE("check: endorsed and merchant-bound exit 0") {
  for (const char* f : {"bip70_endorsed.anbp", "bip70_merchant_bound.anbp"}) {
    CAPTURE(f);
    CmdResult r = run_cli("check " + fx(f) + " --sessions 1");
    CHECK(r.exit_code == 0);
    for (const auto& [idx, verdict] : parse_goal_verdicts(r.out)) CHECK(verdict == "safe");
    CHECK(result_line(r.out) == "result safe");
  }
}

TEST_CASE("check: a missing file exits 1") {
  CmdResult r = run_cli("check /nonexistent/model.anbp");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("cannot open") != std::string::npos);
}

TEST_CASE("check: parse errors carry the source position") {
  std::string bad = "/tmp/anbp_bad_model.anbp";
  {
    std::ofstream out(bad);
    out << "Protocol: X\nTypes:\n  Agent A B;\n";
  }
  CmdResult r = run_cli("check " + bad);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find(bad + ":3:") != std::string::npos);
  std::remove(bad.c_str());
}

TEST_CASE("check plus replay round-trips through the trace file") {
  std::string trace = "/tmp/anbp_cli_trace.txt";
  CmdResult c =
      run_cli("check " + fx("bip70_baseline.anbp") + " --trace-out " + trace);
  REQUIRE(c.exit_code == 2);
  CmdResult r = run_cli("replay " + trace + " " + fx("bip70_baseline.anbp"));
  CHECK(r.exit_code == 2);
  CHECK(result_line(r.out) == "result attack");

  // Replaying against the wrong model fails loudly.
  CmdResult wrong = run_cli("replay " + trace + " " + fx("bip70_endorsed.anbp"));
  CHECK(wrong.exit_code == 1);
  std::remove(trace.c_str());
}

TEST_CASE("check: inconclusive exits 3") {
  CmdResult r = run_cli("check " + fx("bip70_endorsed.anbp") + " --max-states 5");
  CHECK(r.exit_code == 3);
  CHECK(result_line(r.out) == "result inconclusive");
}

TEST_CASE("check: honest cast via --corrupt none") {
  CmdResult r = run_cli("check " + fx("bip70_baseline.anbp") + " --corrupt none");
  CHECK(r.exit_code == 0);
  CHECK(result_line(r.out) == "result safe");
}

TEST_CASE("check: --workers does not change the verdict or trace") {
  CmdResult one = run_cli("check " + fx("bip70_baseline.anbp") + " --workers 1");
  CmdResult two = run_cli("check " + fx("bip70_baseline.anbp") + " --workers 2");
  CHECK(one.exit_code == 2);
  CHECK(two.exit_code == 2);
  CHECK(one.out == two.out);
}

TEST_CASE("scenario exit codes follow deniability") {
  CmdResult baseline = run_cli("scenario --protocol baseline --wallet malicious --backend toy");
  CHECK(baseline.exit_code == 2);
  CHECK(baseline.out.find("deniability true") != std::string::npos);

  CmdResult endorsed = run_cli("scenario --protocol endorsed --wallet malicious --backend toy");
  CHECK(endorsed.exit_code == 0);
  CHECK(endorsed.out.find("audit proven") != std::string::npos);

  CmdResult honest = run_cli("scenario --protocol endorsed --wallet honest --backend toy");
  CHECK(honest.exit_code == 0);
  CHECK(honest.out.find("outcome=attack_blocked") != std::string::npos);

  CmdResult mb = run_cli("scenario --protocol merchant-bound --wallet malicious --backend toy");
  CHECK(mb.exit_code == 0);
  CHECK(mb.out.find("deniability false") != std::string::npos);

  CmdResult unknown = run_cli("scenario --protocol sidechannel");
  CHECK(unknown.exit_code == 1);
}

TEST_CASE("bench emits labelled rows and handles odd inputs") {
  CmdResult r = run_cli("bench --iterations 5 --backend toy");
  CHECK(r.exit_code == 0);
  int rows = 0;
  std::istringstream in(r.out);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("row step=", 0) == 0) ++rows;
  CHECK(rows >= 6);
  CHECK(r.err.find("warning") != std::string::npos);  // iterations < 100

  CmdResult one = run_cli("bench --iterations 1 --backend toy");
  CHECK(one.exit_code == 0);

  CmdResult bad = run_cli("bench --backend unknownium");
  CHECK(bad.exit_code == 1);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("check").exit_code == 1);
}
