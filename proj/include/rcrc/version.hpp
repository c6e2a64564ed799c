#pragma once

namespace rcrc {

inline constexpr const char* kToolName = "rcrc-forge";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace rcrc
