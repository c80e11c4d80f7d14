#pragma once

#include <iosfwd>

namespace holonomy {

/// Runs one command; returns 0 on success, 2 on validation errors and 1 on
/// computation errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace holonomy
