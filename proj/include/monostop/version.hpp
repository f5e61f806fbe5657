#pragma once

namespace monostop {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace monostop
