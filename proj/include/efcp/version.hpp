#pragma once

namespace efcp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace efcp
