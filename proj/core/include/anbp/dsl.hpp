#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "anbp/model.hpp"

namespace anbp {
namespace dsl {

/// First error encountered while reading a protocol file. Syntax errors carry
/// the expected-token set; semantic errors name the offending identifier.
struct ParseError : std::runtime_error {
  SourceSpan span;
  std::vector<std::string> expected;  // empty for semantic errors
  bool semantic = false;

  ParseError(std::string msg, SourceSpan s, std::vector<std::string> exp = {},
             bool is_semantic = false)
      : std::runtime_error(std::move(msg)),
        span(s),
        expected(std::move(exp)),
        semantic(is_semantic) {}
};

/// Parses the `.anbp` protocol dialect. Comments run from '#' to end of line.
/// Throws ParseError on the first syntax or semantic problem.
ProtocolSpec parse(std::string_view text);

/// Canonical rendering; parse(print(s)) is structurally equal to s.
std::string print(const ProtocolSpec& spec);

}  // namespace dsl
}  // namespace anbp
