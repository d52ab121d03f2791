#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gsr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

// Default output directory when --output is not given.
inline constexpr const char* kOutputDirEnv = "GSR_OUTPUT_DIR";

// args excludes the program name. Summary lines go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gsr::cli
