#pragma once

namespace pcm {

inline constexpr const char* kToolName = "pcmsim";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace pcm
