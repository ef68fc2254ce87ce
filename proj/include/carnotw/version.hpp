#pragma once

namespace carnotw {

inline constexpr const char* kVersion = "1.0.0";

// Bumped whenever the on-disk JSON/CSV layouts change.
inline constexpr int kGroupFormatVersion = 1;
inline constexpr int kNormFormatVersion = 1;
inline constexpr int kMeasureFormatVersion = 1;
inline constexpr int kIsometryFormatVersion = 1;
inline constexpr int kCurveFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

}  // namespace carnotw
