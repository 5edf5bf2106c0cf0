#pragma once

/// @file selftest.hpp
/// @brief Fast invariant checks exposed through the `selftest` subcommand.

#include <iosfwd>

namespace shearflow {

/// Prints one "PASS name" / "FAIL name: detail" line per check and returns
/// the number of failures.
int run_selftest(std::ostream& out);

} // namespace shearflow
