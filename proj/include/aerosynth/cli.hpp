#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aerosynth::cli {

enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kConfigParse = 2,
  kIo = 3,
  kValidationFailed = 4,
  kGenerationFailed = 5,
};

/// Worker-count override read when --workers is absent.
inline constexpr const char* kWorkersEnv = "AEROSYNTH_WORKERS";

/// `args` excludes the program name. Messages go to `out` and `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace aerosynth::cli
