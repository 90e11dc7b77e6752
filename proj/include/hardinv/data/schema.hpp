#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace hardinv {

inline constexpr std::size_t kFeatureCount = 13;

/// Column order of the steel heat-treatment table.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "tempering_time_s", "tempering_temp_C", "C", "Mn", "P", "S", "Si", "Ni", "Cr", "Mo", "V", "Al", "Cu"};
inline constexpr std::string_view kTargetName = "hardness_HRC";

inline constexpr std::size_t kTimeColumn = 0;
inline constexpr std::size_t kTemperatureColumn = 1;
inline constexpr std::size_t kFirstElementColumn = 2;

inline constexpr double kMinHardness = 0.0;
inline constexpr double kMaxHardness = 70.0;

}  // namespace hardinv
