#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "madlab/config.hpp"

namespace madlab {

// Exit codes of the madlab binary.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitIo = 2,
    kExitInternal = 3,
};

inline constexpr const char* kSeedEnvVar = "MADLAB_SEED";

// Named simulation setups. `full` switches to the long-run parameters.
RunSpec preset_run(const std::string& name, bool full);
std::vector<std::string> preset_names();

// Entry point of the madlab binary; never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace madlab
