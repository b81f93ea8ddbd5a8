#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace testutil {

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Runs the CLI binary with the given argument string, capturing both
/// streams and the exit code.
inline CmdResult run_cli(const std::string& args) {
  static int counter = 0;
  std::string tag = std::to_string(getpid()) + "_" + std::to_string(counter++);
  std::string out_path = "/tmp/anbp_test_out_" + tag;
  std::string err_path = "/tmp/anbp_test_err_" + tag;
  std::string cmd =
      std::string(ANBP_CLI_PATH) + " " + args + " > " + out_path + " 2> " + err_path;
  int raw = std::system(cmd.c_str());
  CmdResult res;
  res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  res.out = slurp(out_path);
  res.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return res;
}

}  // namespace testutil
