#pragma once

#include <string_view>

namespace fragkit {

std::string_view version();

/// Identifier embedded in every JSON report.
std::string_view build_id();

}  // namespace fragkit
