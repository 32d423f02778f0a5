#include "orbitsiege/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>
#include <sstream>

#include "orbitsiege/emit.hpp"
#include "orbitsiege/errors.hpp"

namespace orbitsiege {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double seconds_between(UtcTime from, UtcTime to) {
  return std::chrono::duration<double>(to - from).count();
}

// Elevation rounded to the 6 significant digits written in window CSVs.
double quantize(double elevation) { return std::strtod(format_sig6(elevation).c_str(), nullptr); }

void check_fresh(const TleElements& e, UtcTime t, const std::string& who) {
  if (std::abs(seconds_between(e.epoch, t)) > kMaxElementAgeSeconds)
    throw StaleElements(who + "elements epoch " + format_iso8601(e.epoch) + " is more than 31 days from " +
                        format_iso8601(t));
}

struct Observer {
  const GroundStationSpec* station;
  Vec3 ecef;
  Vec3 up;
};

std::vector<Observer> observers_sorted(const ConstellationScenario& sc) {
  std::vector<Observer> out;
  for (const auto& g : sc.stations) {
    Vec3 p = station_ecef(g);
    out.push_back({&g, p, p * (1.0 / p.norm())});
  }
  std::sort(out.begin(), out.end(),
            [](const Observer& a, const Observer& b) { return a.station->id < b.station->id; });
  return out;
}

std::vector<const SatelliteSpec*> satellites_sorted(const ConstellationScenario& sc) {
  std::vector<const SatelliteSpec*> out;
  for (const auto& s : sc.satellites) {
    if (!s.orbit) throw ValidationError("satellites." + s.id + ".tle", "no orbit to propagate");
    out.push_back(&s);
  }
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->id < b->id; });
  // Distance from epoch is convex in time, so the horizon ends bound it.
  for (auto* s : out) {
    check_fresh(*s->orbit, sc.time.slot_midpoint(0), s->id + ": ");
    check_fresh(*s->orbit, sc.time.slot_midpoint(sc.time.last_slot()), s->id + ": ");
  }
  return out;
}

void windows_at_slot(const ConstellationScenario& sc, Slot t,
                     const std::vector<const SatelliteSpec*>& sats,
                     const std::vector<Observer>& observers, std::vector<ContactWindow>& out) {
  UtcTime at = sc.time.slot_midpoint(t);
  for (const SatelliteSpec* s : sats) {
    GeoState geo = propagate(*s->orbit, at);
    for (const Observer& o : observers) {
      Vec3 d = geo.ecef - o.ecef;
      double el = std::asin(std::clamp(d.dot(o.up) / d.norm(), -1.0, 1.0)) / kDeg;
      if (el >= o.station->min_elevation_deg) out.push_back({t, s->id, o.station->id, quantize(el)});
    }
  }
}

bool window_less(const ContactWindow& a, const ContactWindow& b) {
  if (a.slot != b.slot) return a.slot < b.slot;
  if (a.satellite_id != b.satellite_id) return a.satellite_id < b.satellite_id;
  return a.station_id < b.station_id;
}

}  // namespace

double Vec3::norm() const { return std::sqrt(dot(*this)); }

GeoState geo_from_ecef(const Vec3& p) {
  GeoState g;
  g.ecef = p;
  double r = p.norm();
  g.latitude_deg = r > 0 ? std::asin(p.z / r) / kDeg : 0.0;
  g.longitude_deg = std::atan2(p.y, p.x) / kDeg;
  g.altitude_m = r - kEarthRadiusM;
  return g;
}

double gmst_rad(UtcTime t) {
  double days = seconds_since_j2000(t) / 86400.0;
  double deg = std::fmod(280.46061837 + 360.98564736629 * days, 360.0);
  if (deg < 0) deg += 360.0;
  return deg * kDeg;
}

Vec3 propagate_inertial(const TleElements& e, UtcTime t) {
  check_fresh(e, t, "");
  double a = semi_major_axis_m(e);
  double n = e.mean_motion_rev_per_day * kTwoPi / 86400.0;
  double u = std::fmod((e.arg_perigee_deg + e.mean_anomaly_deg) * kDeg + n * seconds_between(e.epoch, t), kTwoPi);
  double raan = e.raan_deg * kDeg;
  double inc = e.inclination_deg * kDeg;
  double cu = std::cos(u), su = std::sin(u), co = std::cos(raan), so = std::sin(raan), ci = std::cos(inc);
  return {a * (co * cu - so * su * ci), a * (so * cu + co * su * ci), a * su * std::sin(inc)};
}

GeoState propagate(const TleElements& e, UtcTime t) {
  return geo_from_ecef(rotate_z(propagate_inertial(e, t), -gmst_rad(t)));
}

Vec3 rotate_z(const Vec3& v, double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

Vec3 station_ecef(const GroundStationSpec& g) {
  double r = kEarthRadiusM + g.altitude_m;
  double lat = g.latitude_deg * kDeg, lon = g.longitude_deg * kDeg;
  return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon), r * std::sin(lat)};
}

double elevation_deg(const GeoState& sat, const GroundStationSpec& station) {
  Vec3 p = station_ecef(station);
  Vec3 d = sat.ecef - p;
  double dn = d.norm();
  if (dn == 0.0) return 90.0;
  return std::asin(std::clamp(d.dot(p) / (dn * p.norm()), -1.0, 1.0)) / kDeg;
}

double slant_range_m(const GeoState& sat, const GroundStationSpec& station) {
  return (sat.ecef - station_ecef(station)).norm();
}

double slant_range_from_elevation(double elevation, double sat_radius_m, double station_altitude_m) {
  double rs = kEarthRadiusM + station_altitude_m;
  double s = std::sin(elevation * kDeg);
  double disc = rs * rs * s * s + sat_radius_m * sat_radius_m - rs * rs;
  return -rs * s + std::sqrt(std::max(0.0, disc));
}

std::vector<ContactWindow> compute_contact_windows_serial(const ConstellationScenario& sc) {
  auto sats = satellites_sorted(sc);
  auto observers = observers_sorted(sc);
  std::vector<ContactWindow> out;
  for (Slot t = 0; t < sc.time.horizon_slots; ++t) windows_at_slot(sc, t, sats, observers, out);
  std::sort(out.begin(), out.end(), window_less);
  return out;
}

std::vector<ContactWindow> compute_contact_windows(const ConstellationScenario& sc) {
  auto sats = satellites_sorted(sc);
  auto observers = observers_sorted(sc);
  const auto horizon = static_cast<std::size_t>(sc.time.horizon_slots);
  std::vector<std::vector<ContactWindow>> per_slot(horizon);
#pragma omp parallel for schedule(static)
  for (std::size_t t = 0; t < horizon; ++t)
    windows_at_slot(sc, static_cast<Slot>(t), sats, observers, per_slot[t]);
  std::vector<ContactWindow> out;
  for (auto& bucket : per_slot)
    for (auto& w : bucket) out.push_back(std::move(w));
  return out;
}

std::vector<ContactWindow> contact_windows_for(const ConstellationScenario& sc) {
  if (sc.windows_file) return load_contact_windows(*sc.windows_file, sc);
  return compute_contact_windows(sc);
}

std::string format_contact_windows_csv(std::span<const ContactWindow> windows) {
  std::string out = "slot,satellite_id,station_id,elevation_deg\n";
  for (const auto& w : windows)
    out += format_int(w.slot) + "," + w.satellite_id + "," + w.station_id + "," + format_sig6(w.elevation_deg) + "\n";
  return out;
}

std::vector<ContactWindow> parse_contact_windows_csv(std::string_view text, const ConstellationScenario& sc) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("contact-window CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "slot,satellite_id,station_id,elevation_deg")
    throw ParseError("contact-window CSV: unexpected header '" + line + "'");
  std::vector<ContactWindow> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string where = "contact-window CSV line " + std::to_string(line_no);
    std::vector<std::string> cells;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) throw ParseError(where + ": expected 4 columns");
    ContactWindow w;
    char* end = nullptr;
    long long slot = std::strtoll(cells[0].c_str(), &end, 10);
    if (cells[0].empty() || *end) throw ParseError(where + ": bad slot '" + cells[0] + "'");
    w.elevation_deg = std::strtod(cells[3].c_str(), &end);
    if (cells[3].empty() || *end || !std::isfinite(w.elevation_deg))
      throw ParseError(where + ": bad elevation '" + cells[3] + "'");
    w.slot = slot;
    w.satellite_id = cells[1];
    w.station_id = cells[2];
    if (w.slot < 0 || w.slot > sc.time.last_slot())
      throw OutOfHorizon(where + ": slot " + cells[0] + " outside the time grid");
    if (!sc.find_satellite(w.satellite_id))
      throw ValidationError("windows", where + ": unknown satellite '" + w.satellite_id + "'");
    const GroundStationSpec* g = sc.find_station(w.station_id);
    if (!g) throw ValidationError("windows", where + ": unknown station '" + w.station_id + "'");
    if (w.elevation_deg < g->min_elevation_deg)
      throw ValidationError("windows", where + ": elevation below the station threshold");
    out.push_back(std::move(w));
  }
  std::stable_sort(out.begin(), out.end(), window_less);
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!window_less(out[i - 1], out[i]))
      throw ValidationError("windows", "duplicate window for " + out[i].satellite_id + "/" + out[i].station_id +
                                           " at slot " + std::to_string(out[i].slot));
  return out;
}

std::vector<ContactWindow> load_contact_windows(const std::filesystem::path& path, const ConstellationScenario& sc) {
  return parse_contact_windows_csv(read_file(path), sc);
}

void save_contact_windows(const std::filesystem::path& path, std::span<const ContactWindow> windows) {
  write_file_atomic(path, format_contact_windows_csv(windows));
}

}  // namespace orbitsiege
