#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testutil {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture_path(const std::string& name) {
  return std::string(ANBP_FIXTURE_DIR) + "/" + name;
}

inline std::string load_fixture(const std::string& name) {
  return read_file(fixture_path(name));
}

}  // namespace testutil
