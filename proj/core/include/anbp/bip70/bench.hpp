#pragma once

#include <string>
#include <vector>

#include "anbp/bip70/protocol.hpp"

namespace anbp {
namespace bip70 {

struct BenchRow {
  std::string step;   // "2", "3", "4a", "4b", "5", "6", "7", "8", "9"
  std::string label;
  double mean_ms = 0.0;
  bool comparable = true;  // step 5 is wallet-database bookkeeping, placeholder only
};

struct BenchTable {
  std::string backend;
  int iterations = 0;
  std::vector<BenchRow> rows;

  const BenchRow* row(const std::string& step) const;
  double customer_total_ms() const;   // steps 2, 3, 4a, 6
  double merchant_added_ms() const;   // steps 8 + 9
  double endorsement_ratio() const;   // step 6 / customer total
  std::string to_text() const;        // one record per line
};

/// Times each protocol step analogue over `iterations` runs (>= 1) on
/// pre-built inputs and reports mean durations.
BenchTable bench(int iterations, const SignatureBackend& backend, uint64_t seed = 9);

}  // namespace bip70
}  // namespace anbp
