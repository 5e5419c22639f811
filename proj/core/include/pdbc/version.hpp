#pragma once

#include <string_view>

namespace pdbc {

// git-describe style version string captured at configure time.
std::string_view version();

}  // namespace pdbc
