#pragma once

namespace ies {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ies
