#pragma once

namespace csbm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace csbm
