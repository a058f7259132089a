#pragma once

namespace wallforge {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace wallforge
