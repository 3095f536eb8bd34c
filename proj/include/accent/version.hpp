#pragma once

namespace accent {

inline constexpr const char* kVersionString = "1.0.0";
/// Bumped whenever the model text format changes incompatibly.
inline constexpr int kModelFormatVersion = 1;
/// Bumped whenever the feature CSV layout changes incompatibly.
inline constexpr int kFeatureFormatVersion = 1;

}  // namespace accent
