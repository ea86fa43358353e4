#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rankspectra::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitStudyAbort = 4;

/// Runs the command line `args` (args[0] is the program name). Reports go
/// to `out` unless an output path is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankspectra::cli
