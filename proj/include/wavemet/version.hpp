#pragma once

namespace wavemet {

inline constexpr const char* kToolName = "wavemet";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace wavemet
