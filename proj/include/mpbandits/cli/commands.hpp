#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mpbandits::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitOutput = 4,
  kExitResource = 5,
  kExitVerifyFailed = 6,
};

/// Entry point shared by the executable and the tests; args excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpbandits::cli
