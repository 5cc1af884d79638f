#pragma once

#define EXSET_VERSION_MAJOR 0
#define EXSET_VERSION_MINOR 1
#define EXSET_VERSION_PATCH 0

namespace exset {

inline constexpr const char* version_string() { return "0.1.0"; }

}  // namespace exset
