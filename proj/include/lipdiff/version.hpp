#pragma once

namespace lipdiff {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lipdiff
