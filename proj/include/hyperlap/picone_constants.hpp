#ifndef HYPERLAP_PICONE_CONSTANTS_HPP
#define HYPERLAP_PICONE_CONSTANTS_HPP

#include <cstdint>

// Written by tools/calibrate_picone; mirrored in data/picone_calibration.json.
namespace hyperlap::picone_calibration {

inline constexpr double kConstantBelow2 = 0.25;
inline constexpr double kConstantFrom2 = 0.5;
inline constexpr std::uint64_t kSeed = 20240601ULL;
inline constexpr double kMargin = 2.0;

} // namespace hyperlap::picone_calibration

#endif
