#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "orbitsiege/scenario.hpp"

namespace orbitsiege {

inline constexpr double kEarthMu = 3.986004418e14;       // m^3/s^2
inline constexpr double kEarthRadiusM = 6'371'000.0;     // spherical Earth
inline constexpr double kEarthRotationRadPerSec = 7.2921150e-5;
inline constexpr double kMaxElementAgeSeconds = 31.0 * 86400.0;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const;
};

// Earth-fixed position plus its spherical latitude/longitude/altitude.
struct GeoState {
  Vec3 ecef;
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  double altitude_m = 0.0;
};

GeoState geo_from_ecef(const Vec3& ecef);

// Greenwich mean sidereal angle in radians, [0, 2*pi).
double gmst_rad(UtcTime t);

// Inertial (true-equator, mean-equinox) position from circular two-body motion.
// Throws StaleElements when |t - epoch| exceeds 31 days.
Vec3 propagate_inertial(const TleElements& e, UtcTime t);
// Rotates the inertial position into the Earth-fixed frame by GMST.
GeoState propagate(const TleElements& e, UtcTime t);

Vec3 rotate_z(const Vec3& v, double angle_rad);
Vec3 station_ecef(const GroundStationSpec& station);

// Angle above the station's local horizontal plane, degrees in [-90, 90].
double elevation_deg(const GeoState& sat, const GroundStationSpec& station);
double slant_range_m(const GeoState& sat, const GroundStationSpec& station);
// Slant range implied by an elevation on a spherical Earth for a satellite at
// orbital radius `sat_radius_m`.
double slant_range_from_elevation(double elevation_deg, double sat_radius_m,
                                  double station_altitude_m);

struct ContactWindow {
  Slot slot = 0;
  std::string satellite_id;
  std::string station_id;
  double elevation_deg = 0.0;

  bool operator==(const ContactWindow&) const = default;
};

// Every (satellite, station, slot) whose midpoint elevation reaches the
// station threshold, sorted by (slot, satellite_id, station_id).
// The serial form is the reference the OpenMP form is checked against.
std::vector<ContactWindow> compute_contact_windows_serial(const ConstellationScenario& scenario);
std::vector<ContactWindow> compute_contact_windows(const ConstellationScenario& scenario);

// Windows from the scenario's precomputed file when it names one, computed
// otherwise.
std::vector<ContactWindow> contact_windows_for(const ConstellationScenario& scenario);

// CSV: slot,satellite_id,station_id,elevation_deg
std::string format_contact_windows_csv(std::span<const ContactWindow> windows);
std::vector<ContactWindow> parse_contact_windows_csv(std::string_view csv_text,
                                                     const ConstellationScenario& scenario);
std::vector<ContactWindow> load_contact_windows(const std::filesystem::path& path,
                                                const ConstellationScenario& scenario);
void save_contact_windows(const std::filesystem::path& path,
                          std::span<const ContactWindow> windows);

}  // namespace orbitsiege
