#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <string>

#include "orbit_oracle.hpp"
#include "orbitsiege/errors.hpp"
#include "orbitsiege/orbit.hpp"
#include "orbitsiege/scenario.hpp"
#include "orbitsiege/tle.hpp"

namespace os = orbitsiege;
using testsupport::kDegRad;

namespace {

const char* kIss1 = "1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927";
const char* kIss2 = "2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537";

int checksum(const std::string& line) {
  int sum = 0;
  for (std::size_t i = 0; i < 68 && i < line.size(); ++i) {
    if (line[i] >= '0' && line[i] <= '9') sum += line[i] - '0';
    if (line[i] == '-') sum += 1;
  }
  return sum % 10;
}

std::string with_checksum(std::string line) {
  line.resize(68, ' ');
  return line + char('0' + checksum(line));
}

std::string line2(double inc, double raan, double mm) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "2 25544 %8.4f %8.4f 0001000  90.0000  10.0000 %11.8f%5d", inc, raan, mm, 1);
  return with_checksum(buf);
}

os::ConstellationScenario one_pair(const os::TleElements& e, const os::GroundStationSpec& g) {
  os::ConstellationScenario sc;
  sc.time.epoch = e.epoch;
  sc.time.slot_seconds = 60;
  sc.time.horizon_slots = 1440;
  os::SatelliteSpec s;
  s.id = "sat";
  s.capacity_bytes = 1;
  s.orbit = e;
  sc.satellites.push_back(s);
  sc.stations.push_back(g);
  return sc;
}

os::TleElements polar(double mean_anomaly = 0) {
  os::TleElements e;
  e.inclination_deg = 90;
  e.mean_motion_rev_per_day = 15.2;
  e.mean_anomaly_deg = mean_anomaly;
  e.epoch = os::parse_iso8601("2024-03-01T00:00:00Z");
  return e;
}

os::GroundStationSpec station(double lat, double lon, double min_elev = 5) {
  os::GroundStationSpec g;
  g.id = "gs";
  g.latitude_deg = lat;
  g.longitude_deg = lon;
  g.min_elevation_deg = min_elev;
  return g;
}

}  // namespace

TEST_CASE("TLE checksum and fields") {
  CHECK(os::tle_checksum(kIss1) == 7);
  CHECK(os::tle_checksum(kIss2) == 7);
  auto e = os::parse_tle(kIss1, kIss2, "ISS (ZARYA)");
  CHECK(e.inclination_deg == doctest::Approx(51.6416));
  CHECK(e.raan_deg == doctest::Approx(247.4627));
  CHECK(e.eccentricity == doctest::Approx(0.0006703));
  CHECK(e.arg_perigee_deg == doctest::Approx(130.5360));
  CHECK(e.mean_anomaly_deg == doctest::Approx(325.0288));
  CHECK(e.mean_motion_rev_per_day == doctest::Approx(15.72125391));
  CHECK(e.name == "ISS (ZARYA)");
  CHECK(os::format_iso8601(e.epoch) == "2008-09-20T12:25:40.104Z");
}

TEST_CASE("synthetic TLE echoes its inputs") {
  auto l2 = line2(97.5, 12.0, 15.0);
  REQUIRE(l2.size() == 69);
  auto e = os::parse_tle(kIss1, l2);
  CHECK(e.mean_motion_rev_per_day == 15.0);
  CHECK(e.inclination_deg == 97.5);
  CHECK(e.raan_deg == 12.0);
}

TEST_CASE("corrupted checksum and broken layout") {
  std::string bad = kIss2;
  bad[68] = bad[68] == '9' ? '0' : char(bad[68] + 1);
  CHECK_THROWS_AS(os::parse_tle(kIss1, bad), os::BadChecksum);
  CHECK_THROWS_AS(os::parse_tle(kIss1, std::string(kIss2).substr(0, 40)), os::BadLayout);
  CHECK_THROWS_AS(os::parse_tle(kIss2, kIss1), os::BadLayout);
}

TEST_CASE("element validation") {
  auto e = polar();
  CHECK_NOTHROW(os::validate_elements(e));
  e.eccentricity = 0.06;
  CHECK_THROWS_AS(os::validate_elements(e), os::ValidationError);
  e = polar();
  e.inclination_deg = 181;
  CHECK_THROWS_AS(os::validate_elements(e), os::ValidationError);
  e = polar();
  e.mean_motion_rev_per_day = 0;
  CHECK_THROWS_AS(os::validate_elements(e), os::ValidationError);
}

TEST_CASE("period and Kepler radius") {
  os::TleElements e;
  e.mean_motion_rev_per_day = 15.5;
  CHECK(os::period_seconds(e) == doctest::Approx(86400.0 / 15.5));
  CHECK(os::period_seconds(e) == doctest::Approx(5574.19).epsilon(1e-5));
  double kepler = std::cbrt(os::kEarthMu * std::pow(86400.0 / 15.5 / (2 * M_PI), 2));
  CHECK(os::semi_major_axis_m(e) == doctest::Approx(kepler).epsilon(1e-12));
  e.epoch = os::parse_iso8601("2024-01-01T00:00:00Z");
  CHECK(os::propagate_inertial(e, e.epoch).norm() == doctest::Approx(kepler).epsilon(1e-12));
}

TEST_CASE("position at epoch sits at the argument of latitude") {
  auto e = polar(30);
  e.raan_deg = 0;
  auto r = os::propagate_inertial(e, e.epoch);
  double a = os::semi_major_axis_m(e);
  CHECK(r.x == doctest::Approx(a * std::cos(30 * kDegRad)));
  CHECK(std::abs(r.y) < 1e-6);
  CHECK(r.z == doctest::Approx(a * std::sin(30 * kDegRad)));
}

TEST_CASE("equatorial orbit stays at latitude zero") {
  os::TleElements e;
  e.epoch = os::parse_iso8601("2024-01-01T00:00:00Z");
  for (int k = 0; k < 50; ++k) {
    auto geo = os::propagate(e, e.epoch + std::chrono::minutes(7 * k));
    CHECK(std::abs(geo.latitude_deg) < 1e-9);
    CHECK(std::abs(geo.ecef.z) < 1e-6);
  }
}

TEST_CASE("stale elements") {
  auto e = polar();
  CHECK_NOTHROW(os::propagate(e, e.epoch + std::chrono::hours(24 * 30)));
  CHECK_THROWS_AS(os::propagate(e, e.epoch + std::chrono::hours(24 * 32)), os::StaleElements);
  CHECK_THROWS_AS(os::propagate(e, e.epoch - std::chrono::hours(24 * 32)), os::StaleElements);
}

TEST_CASE("inertial position repeats after one period") {
  std::mt19937_64 rng(5);
  auto U = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  for (int k = 0; k < 100; ++k) {
    os::TleElements e;
    e.inclination_deg = U(0, 180);
    e.raan_deg = U(0, 360);
    e.mean_anomaly_deg = U(0, 360);
    auto period_ms = std::uniform_int_distribution<std::int64_t>(5'400'000, 7'000'000)(rng);
    e.mean_motion_rev_per_day = 86'400'000.0 / double(period_ms);
    e.epoch = os::parse_iso8601("2024-01-01T00:00:00Z");
    auto at = e.epoch + std::chrono::seconds(std::uniform_int_distribution<int>(0, 86400 * 3)(rng));
    CHECK((os::propagate_inertial(e, at + std::chrono::milliseconds(period_ms)) - os::propagate_inertial(e, at)).norm() < 1.0);
  }
}

TEST_CASE("elevation geometry") {
  auto g = station(12, 34);
  SUBCASE("zenith") {
    auto above = g;
    above.altitude_m = 550e3;
    CHECK(os::elevation_deg(os::geo_from_ecef(os::station_ecef(above)), g) == doctest::Approx(90.0));
  }
  SUBCASE("antipode") {
    auto anti = station(-12, 34 - 180);
    anti.altitude_m = 550e3;
    CHECK(os::elevation_deg(os::geo_from_ecef(os::station_ecef(anti)), g) < 0);
  }
  SUBCASE("550 km altitude at 1000 km ground range") {
    auto eq = station(0, 0);
    double gamma = 1000e3 / os::kEarthRadiusM;
    double r = os::kEarthRadiusM + 550e3;
    os::Vec3 sat{r * std::cos(gamma), r * std::sin(gamma), 0};
    double oracle = std::atan2(std::cos(gamma) - os::kEarthRadiusM / r, std::sin(gamma)) / kDegRad;
    CHECK(std::abs(os::elevation_deg(os::geo_from_ecef(sat), eq) - oracle) < 0.1);
    CHECK(oracle == doctest::Approx(23.255).epsilon(1e-4));
  }
  SUBCASE("slant range agrees with the elevation it implies") {
    auto eq = station(0, 0);
    double r = os::kEarthRadiusM + 550e3;
    for (double gamma_deg : {0.5, 3.0, 8.0, 15.0}) {
      double gamma = gamma_deg * kDegRad;
      auto geo = os::geo_from_ecef({r * std::cos(gamma), r * std::sin(gamma), 0});
      double elev = os::elevation_deg(geo, eq);
      CHECK(os::slant_range_from_elevation(elev, r, 0) == doctest::Approx(os::slant_range_m(geo, eq)).epsilon(1e-9));
    }
  }
}

TEST_CASE("elevation is invariant under a common rotation") {
  std::mt19937_64 rng(9);
  auto U = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  for (int k = 0; k < 200; ++k) {
    auto g = station(U(-80, 80), U(-170, 170));
    auto sat_spot = station(U(-80, 80), U(-180, 180));
    sat_spot.altitude_m = U(400e3, 1500e3);
    auto sat = os::geo_from_ecef(os::station_ecef(sat_spot));
    double angle = U(-3, 3);
    auto rotated_station = g;
    rotated_station.longitude_deg += angle / kDegRad;
    auto rotated_sat = os::geo_from_ecef(os::rotate_z(sat.ecef, angle));
    CHECK(os::elevation_deg(rotated_sat, rotated_station) == doctest::Approx(os::elevation_deg(sat, g)).epsilon(1e-9));
  }
}

TEST_CASE("unreachable threshold gives no windows") {
  auto sc = one_pair(polar(), station(0, 0, 90));
  CHECK(os::compute_contact_windows(sc).empty());
}

TEST_CASE("polar satellite over an equatorial station matches the per-second scan") {
  auto e = polar();
  auto g = station(0, 20);
  auto windows = os::compute_contact_windows(one_pair(e, g));
  std::set<os::Slot> lib, midpoint, any_second;
  for (const auto& w : windows) {
    lib.insert(w.slot);
    auto at = e.epoch + std::chrono::seconds(w.slot * 60 + 30);
    CHECK(w.elevation_deg == doctest::Approx(testsupport::track_elevation_deg(testsupport::ground_track(e, at), g)).epsilon(1e-5));
  }
  for (int sec = 0; sec < 86400; ++sec) {
    auto at = e.epoch + std::chrono::seconds(sec);
    if (testsupport::track_elevation_deg(testsupport::ground_track(e, at), g) < g.min_elevation_deg) continue;
    any_second.insert(sec / 60);
    if (sec % 60 == 30) midpoint.insert(sec / 60);
  }
  CHECK_FALSE(lib.empty());
  CHECK(lib == midpoint);
  // Midpoint sampling can only miss the first or last slot of a pass.
  for (os::Slot t : any_second)
    if (!lib.count(t)) CHECK((!any_second.count(t - 1) || !any_second.count(t + 1) || !lib.count(t - 1) || !lib.count(t + 1)));
}

TEST_CASE("lowering the threshold never removes a window") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 5; ++k) {
    auto e = polar(std::uniform_real_distribution<double>(0, 360)(rng));
    e.inclination_deg = std::uniform_real_distribution<double>(40, 100)(rng);
    double lat = std::uniform_real_distribution<double>(-60, 60)(rng);
    auto high = os::compute_contact_windows(one_pair(e, station(lat, 10, 5)));
    auto low = os::compute_contact_windows(one_pair(e, station(lat, 10, 0)));
    std::set<os::Slot> low_slots;
    for (const auto& w : low) low_slots.insert(w.slot);
    for (const auto& w : high) CHECK(low_slots.count(w.slot) == 1);
    CHECK(low.size() >= high.size());
  }
}

TEST_CASE("serial and parallel window computations agree") {
  auto sc = os::load_scenario(std::string(ORBITSIEGE_SCENARIO_DIR) + "/synthetic24h.json");
  auto parallel = os::compute_contact_windows(sc);
  CHECK_FALSE(parallel.empty());
  CHECK(parallel == os::compute_contact_windows_serial(sc));
  CHECK(std::is_sorted(parallel.begin(), parallel.end(), [](const auto& a, const auto& b) {
    return std::tie(a.slot, a.satellite_id, a.station_id) < std::tie(b.slot, b.satellite_id, b.station_id);
  }));
  for (const auto& w : parallel) CHECK(w.elevation_deg >= sc.find_station(w.station_id)->min_elevation_deg);
}

TEST_CASE("window CSV") {
  auto sc = one_pair(polar(), station(0, 20));
  auto windows = os::compute_contact_windows(sc);
  auto dir = std::filesystem::temp_directory_path() / "orbitsiege_test_orbit";
  std::filesystem::create_directories(dir);
  os::save_contact_windows(dir / "w.csv", windows);
  CHECK(os::load_contact_windows(dir / "w.csv", sc) == windows);
  std::filesystem::remove_all(dir);

  const std::string header = "slot,satellite_id,station_id,elevation_deg\n";
  CHECK(os::parse_contact_windows_csv(header, sc).empty());
  CHECK_THROWS_AS(os::parse_contact_windows_csv(header + "3,nobody,gs,40\n", sc), os::ValidationError);
  CHECK_THROWS_AS(os::parse_contact_windows_csv(header + "1440,sat,gs,40\n", sc), os::OutOfHorizon);
  CHECK_THROWS_AS(os::parse_contact_windows_csv("slot,sat\n", sc), os::ParseError);
  CHECK_THROWS_AS(os::parse_contact_windows_csv(header + "3,sat,gs,abc\n", sc), os::ParseError);
  CHECK_THROWS_AS(os::load_contact_windows("/nonexistent/w.csv", sc), os::IoError);
}
