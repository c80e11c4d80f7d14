#pragma once

#include <string>
#include <vector>

namespace holonomy {

struct SelfTestLine {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Exact-arithmetic identities across all modules; each passes only with a
/// residual that is identically zero. Random inputs use a fixed seed.
std::vector<SelfTestLine> run_selftest();
std::string format_selftest(const std::vector<SelfTestLine>& lines);

}  // namespace holonomy
