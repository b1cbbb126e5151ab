#pragma once

#include <cmath>
#include <string>

namespace cuspzero {

// Real segments of the fundamental domain boundary:
//   Delta1: z = iy, Delta2: z = 1/2 + iy, Delta3: z = e^(i theta), theta in [pi/2, 2pi/3].
enum class SegmentTag { Delta1, Delta2, Delta3 };

inline std::string segment_name(SegmentTag s) {
  switch (s) {
    case SegmentTag::Delta1: return "delta1";
    case SegmentTag::Delta2: return "delta2";
    case SegmentTag::Delta3: return "delta3";
  }
  return "?";
}

inline bool parse_segment(const std::string& name, SegmentTag& out) {
  if (name == "delta1" || name == "1") out = SegmentTag::Delta1;
  else if (name == "delta2" || name == "2") out = SegmentTag::Delta2;
  else if (name == "delta3" || name == "3") out = SegmentTag::Delta3;
  else return false;
  return true;
}

inline constexpr double kSqrt3Half = 0.86602540378443864676;
inline constexpr double kArcLo = M_PI / 2;
inline constexpr double kArcHi = 2 * M_PI / 3;

}  // namespace cuspzero
