#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace netmirror::cli {

enum ExitCode { ok = 0, usage = 1, data = 2, oracle = 3 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netmirror::cli
