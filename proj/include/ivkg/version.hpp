#pragma once

namespace ivkg {

inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr int kFormatVersion = 1;

}  // namespace ivkg
