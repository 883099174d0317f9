#pragma once

namespace cnids {

inline constexpr const char* kToolName = "consensus-nids";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace cnids
