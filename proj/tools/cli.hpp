#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fwlab {

enum ExitCode { kExitPass = 0, kExitGateFail = 1, kExitConfigError = 2, kExitResourceError = 3 };

/// Command-line front end; argv[0] is the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fwlab
