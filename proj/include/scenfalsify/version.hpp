#pragma once

namespace scenfalsify {
inline constexpr const char* kVersion = "0.1.0";
}  // namespace scenfalsify
