#pragma once

namespace reefforge {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace reefforge
