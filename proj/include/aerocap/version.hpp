#pragma once

namespace aerocap {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace aerocap
