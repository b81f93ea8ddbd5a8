#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testutil {

/// Emits small random, always-valid protocol texts for round-trip checks.
struct SpecGen {
  std::mt19937 rng;
  explicit SpecGen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  std::string gen() {
    int n_roles = 2 + pick(2);
    std::vector<std::string> roles;
    for (int i = 0; i < n_roles; ++i) roles.push_back("A" + std::to_string(i));
    int n_nums = 2 + pick(4);
    std::vector<std::string> nums;
    for (int i = 0; i < n_nums; ++i) nums.push_back("n" + std::to_string(i));
    std::vector<std::string> fns = {"f", "g"};

    std::ostringstream os;
    os << "Protocol: G" << pick(1000) << "\n";
    os << "Types:\n  Agent ";
    for (size_t i = 0; i < roles.size(); ++i) os << (i ? ", " : "") << roles[i];
    os << ";\n  Number ";
    for (size_t i = 0; i < nums.size(); ++i) os << (i ? ", " : "") << nums[i];
    os << ";\n  Function f, g;\n  PublicKey kp;\n";

    int n_defs = pick(3);
    if (n_defs > 0) {
      os << "Definitions:\n";
      for (int i = 0; i < n_defs; ++i)
        os << "  d" << i << " := (" << nums[pick(static_cast<int>(nums.size()))] << ", "
           << fns[pick(2)] << "(" << nums[pick(static_cast<int>(nums.size()))] << "));\n";
    }

    os << "Knowledge:\n";
    for (const std::string& r : roles) {
      os << "  " << r << ": ";
      for (size_t i = 0; i < roles.size(); ++i) os << (i ? ", " : "") << roles[i];
      os << ", f, g, " << nums[0] << ";\n";
    }

    os << "Actions:\n";
    int n_actions = 1 + pick(4);
    for (int i = 0; i < n_actions; ++i) {
      int s = pick(n_roles);
      int r = (s + 1 + pick(n_roles - 1)) % n_roles;
      const char* arrows[] = {"->", "*->", "->*", "*->*"};
      bool pseu = pick(3) == 0;
      os << "  " << (pseu ? "[" : "") << roles[s] << (pseu ? "]" : "") << " " << arrows[pick(4)]
         << " " << roles[r] << ": ";
      std::string msg = "(" + nums[pick(static_cast<int>(nums.size()))] + ", " + fns[pick(2)] +
                        "(" + nums[pick(static_cast<int>(nums.size()))] + ")";
      if (n_defs > 0 && pick(2) == 0) msg += ", d" + std::to_string(pick(n_defs));
      msg += ")";
      os << msg << "\n";
    }

    os << "Goals:\n";
    os << "  " << roles[0] << " weakly authenticates " << roles[1] << " on "
       << nums[pick(static_cast<int>(nums.size()))] << "\n";
    if (pick(2) == 0)
      os << "  " << roles[1] << " authenticates " << roles[0] << " on (" << nums[0] << ", "
         << nums[1] << ")\n";
    os << "  (" << nums[0] << ", " << nums[1] << ") secret between " << roles[0] << ", "
       << roles[1] << "\n";
    return os.str();
  }
};

}  // namespace testutil
