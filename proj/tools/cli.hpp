#pragma once

#include <iosfwd>

namespace garma::cli {

// exit codes
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kNumeric = 2;
inline constexpr int kNotConverged = 3;

/// Parses argv and dispatches one of fit, forecast, simulate, study.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace garma::cli
