#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cure {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  exit_ok = 0,
  exit_config = 1,       ///< parse or configuration error
  exit_degenerate = 2,   ///< degenerate sample refused
  exit_unsupported = 3,  ///< model outside the exact computation's scope
  exit_numeric = 4,      ///< quadrature did not converge
};

/// Runs `cure-followup <args...>` (program name excluded). Reports go to
/// `out` unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cure
