#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace orbitsiege {

using Slot = std::int64_t;
using Bytes = std::int64_t;
using UtcTime = std::chrono::sys_time<std::chrono::milliseconds>;

// Accepts "YYYY-MM-DDTHH:MM:SS[.fff](Z|+00:00)"; a space may replace 'T'.
UtcTime parse_iso8601(std::string_view text);
// Always "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string format_iso8601(UtcTime t);

// Seconds since the J2000 epoch (2000-01-01T12:00:00 UTC), fractional.
double seconds_since_j2000(UtcTime t);

/// Discretization of the simulated interval into fixed-length slots
/// 0..last_slot(). Slot t covers [epoch + t*slot_seconds, epoch + (t+1)*slot_seconds).
struct TimeGrid {
  UtcTime epoch{};
  std::int64_t slot_seconds = 60;
  std::int64_t horizon_slots = 1;

  Slot last_slot() const { return horizon_slots - 1; }
  UtcTime slot_start(Slot t) const;
  UtcTime slot_midpoint(Slot t) const;
  UtcTime horizon_end() const { return slot_start(horizon_slots); }
  // Throws OutOfHorizon outside [epoch, horizon_end()).
  Slot slot_of(UtcTime t) const;
  // Whole slots covering `seconds`, rounded up.
  Slot slots_for_seconds(double seconds) const;

  bool operator==(const TimeGrid&) const = default;
};

}  // namespace orbitsiege
