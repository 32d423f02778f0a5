#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "orbitsiege/time_grid.hpp"

namespace orbitsiege {

/// Mean orbital elements as carried by a NORAD two-line element set.
/// Eccentricity is kept for completeness; propagation treats orbits as circular
/// and rejects anything above kMaxEccentricity.
struct TleElements {
  double inclination_deg = 0.0;
  double raan_deg = 0.0;
  double eccentricity = 0.0;
  double arg_perigee_deg = 0.0;
  double mean_anomaly_deg = 0.0;
  double mean_motion_rev_per_day = 15.0;
  UtcTime epoch{};
  std::string name;

  bool operator==(const TleElements&) const = default;
};

inline constexpr double kMaxEccentricity = 0.05;

// Modulo-10 checksum over the first 68 columns: digits count their value,
// '-' counts one, everything else zero.
int tle_checksum(std::string_view line);

// Throws BadLayout or BadChecksum. `name` is the optional title line.
TleElements parse_tle(std::string_view line1, std::string_view line2,
                      std::string_view name = {});

// Throws ValidationError (field "orbit") when an element is out of range.
void validate_elements(const TleElements& e);

double period_seconds(const TleElements& e);
double semi_major_axis_m(const TleElements& e);

}  // namespace orbitsiege
