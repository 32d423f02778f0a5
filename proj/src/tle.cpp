#include "orbitsiege/tle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "orbitsiege/errors.hpp"

namespace orbitsiege {
namespace {

std::string_view trim_right(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\n' || s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

std::string_view trim(std::string_view s) {
  s = trim_right(s);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

// Columns are 1-based and inclusive, as in the published TLE layout.
double field(std::string_view line, std::size_t first, std::size_t last, int line_no,
             const char* what) {
  std::string text(trim(line.substr(first - 1, last - first + 1)));
  if (text.empty()) throw BadLayout("line " + std::to_string(line_no) + ": empty " + what);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size())
    throw BadLayout("line " + std::to_string(line_no) + ": non-numeric " + what + " '" + text + "'");
  return v;
}

void check_line(std::string_view line, char number, int line_no) {
  if (line.size() != 69)
    throw BadLayout("line " + std::to_string(line_no) + ": expected 69 columns, got " +
                    std::to_string(line.size()));
  if (line[0] != number || line[1] != ' ')
    throw BadLayout("line " + std::to_string(line_no) + ": bad line number");
  char digit = line[68];
  if (digit < '0' || digit > '9')
    throw BadLayout("line " + std::to_string(line_no) + ": checksum column is not a digit");
  if (tle_checksum(line) != digit - '0')
    throw BadChecksum("line " + std::to_string(line_no) + ": checksum " +
                      std::to_string(tle_checksum(line)) + " != " + std::string(1, digit));
}

}  // namespace

int tle_checksum(std::string_view line) {
  int sum = 0;
  for (std::size_t i = 0; i < std::min<std::size_t>(68, line.size()); ++i) {
    char c = line[i];
    if (c >= '0' && c <= '9') sum += c - '0';
    else if (c == '-') sum += 1;
  }
  return sum % 10;
}

TleElements parse_tle(std::string_view line1, std::string_view line2, std::string_view name) {
  line1 = trim_right(line1);
  line2 = trim_right(line2);
  check_line(line1, '1', 1);
  check_line(line2, '2', 2);
  if (line1.substr(2, 5) != line2.substr(2, 5)) throw BadLayout("catalog numbers differ");

  TleElements e;
  e.name = std::string(trim(name));
  int two_digit_year = static_cast<int>(field(line1, 19, 20, 1, "epoch year"));
  double day_of_year = field(line1, 21, 32, 1, "epoch day");
  int year = two_digit_year < 57 ? 2000 + two_digit_year : 1900 + two_digit_year;
  using namespace std::chrono;
  auto jan1 = sys_days{std::chrono::year{year} / January / 1};
  auto offset = milliseconds(static_cast<std::int64_t>(std::llround((day_of_year - 1.0) * 86'400'000.0)));
  e.epoch = time_point_cast<milliseconds>(jan1) + offset;

  e.inclination_deg = field(line2, 9, 16, 2, "inclination");
  e.raan_deg = field(line2, 18, 25, 2, "RAAN");
  // Seven digits with an implied leading decimal point.
  std::string ecc = "0." + std::string(trim(line2.substr(26, 7)));
  e.eccentricity = field(ecc, 1, ecc.size(), 2, "eccentricity");
  e.arg_perigee_deg = field(line2, 35, 42, 2, "argument of perigee");
  e.mean_anomaly_deg = field(line2, 44, 51, 2, "mean anomaly");
  e.mean_motion_rev_per_day = field(line2, 53, 63, 2, "mean motion");
  return e;
}

void validate_elements(const TleElements& e) {
  if (!(e.inclination_deg >= 0.0 && e.inclination_deg <= 180.0))
    throw ValidationError("orbit.inclination_deg", "must be within [0, 180]");
  if (!(e.mean_motion_rev_per_day > 0.0))
    throw ValidationError("orbit.mean_motion_rev_per_day", "must be positive");
  if (!(e.eccentricity >= 0.0 && e.eccentricity <= kMaxEccentricity))
    throw ValidationError("orbit.eccentricity", "must be within [0, 0.05] for circular propagation");
}

double period_seconds(const TleElements& e) { return 86400.0 / e.mean_motion_rev_per_day; }

double semi_major_axis_m(const TleElements& e) {
  constexpr double mu = 3.986004418e14;
  double n_rad = 2.0 * std::numbers::pi / period_seconds(e);
  return std::cbrt(mu / (n_rad * n_rad));
}

}  // namespace orbitsiege
