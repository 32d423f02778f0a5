#include "orbitsiege/time_grid.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "orbitsiege/errors.hpp"

namespace orbitsiege {
namespace {

using namespace std::chrono;

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

}  // namespace

UtcTime parse_iso8601(std::string_view text) {
  int y, mo, d, h, mi, se;
  auto fail = [&] { return ParseError("bad ISO-8601 timestamp '" + std::string(text) + "'"); };
  if (!read_int(text, 0, 4, y) || text.size() < 19 || text[4] != '-' || !read_int(text, 5, 2, mo) ||
      text[7] != '-' || !read_int(text, 8, 2, d) || (text[10] != 'T' && text[10] != ' ') ||
      !read_int(text, 11, 2, h) || text[13] != ':' || !read_int(text, 14, 2, mi) ||
      text[16] != ':' || !read_int(text, 17, 2, se))
    throw fail();
  std::size_t pos = 19;
  milliseconds frac{0};
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    double scale = 100.0, ms = 0.0;
    std::size_t digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      ms += (text[pos] - '0') * scale;
      scale /= 10.0;
      ++pos;
      ++digits;
    }
    if (digits == 0) throw fail();
    frac = milliseconds(static_cast<std::int64_t>(std::floor(ms + 1e-9)));
  }
  std::string_view zone = text.substr(pos);
  if (!(zone == "Z" || zone == "+00:00" || zone.empty())) throw fail();
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 60) throw fail();
  return time_point_cast<milliseconds>(sys_days{ymd}) + hours{h} + minutes{mi} + seconds{se} + frac;
}

std::string format_iso8601(UtcTime t) {
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  auto rest = t - day_point;
  auto ms = rest.count();
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), static_cast<long long>(ms / 3'600'000),
                static_cast<long long>(ms / 60'000 % 60), static_cast<long long>(ms / 1000 % 60),
                static_cast<long long>(ms % 1000));
  return buf;
}

double seconds_since_j2000(UtcTime t) {
  static const UtcTime j2000 = parse_iso8601("2000-01-01T12:00:00Z");
  return duration<double>(t - j2000).count();
}

UtcTime TimeGrid::slot_start(Slot t) const { return epoch + seconds(t * slot_seconds); }

UtcTime TimeGrid::slot_midpoint(Slot t) const {
  return epoch + milliseconds(t * slot_seconds * 1000 + slot_seconds * 500);
}

Slot TimeGrid::slot_of(UtcTime t) const {
  if (t < epoch || t >= horizon_end())
    throw OutOfHorizon("timestamp " + format_iso8601(t) + " outside the time grid");
  auto offset_ms = (t - epoch).count();
  return offset_ms / (slot_seconds * 1000);
}

Slot TimeGrid::slots_for_seconds(double secs) const {
  return static_cast<Slot>(std::ceil(secs / static_cast<double>(slot_seconds) - 1e-9));
}

}  // namespace orbitsiege
