#pragma once

namespace sublin {

inline constexpr const char* kLibraryVersion = "0.1.0";
/// Bumped whenever a CSV or file layout changes.
inline constexpr int kSchemaVersion = 1;

}  // namespace sublin
