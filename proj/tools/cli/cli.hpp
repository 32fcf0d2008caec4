#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fragkit::cli {

enum ExitCode : int { ok = 0, usage_error = 1, validation_failed = 2 };

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// args excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fragkit::cli
