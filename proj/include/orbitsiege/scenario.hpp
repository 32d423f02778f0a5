#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orbitsiege/time_grid.hpp"
#include "orbitsiege/tle.hpp"

namespace orbitsiege {

enum class Priority { Low, High };

std::string_view to_string(Priority p);

inline constexpr std::int64_t kDefaultSlotSeconds = 60;
inline constexpr std::int64_t kDefaultDownlinkRateBps = 160'000'000;
inline constexpr Bytes kDefaultCapacityBytes = 2'000'000'000'000;  // 2000 GB
inline constexpr Bytes kDefaultImageBytes = 200'000'000;           // 200 MB
inline constexpr int kDefaultInitialQueueUnits = 500;
inline constexpr int kDefaultAntennaCount = 4;
inline constexpr double kDefaultMinElevationDeg = 5.0;

struct SatelliteSpec {
  std::string id;
  Priority priority = Priority::Low;
  // Absent only when contact windows come from a precomputed file.
  std::optional<TleElements> orbit;
  Bytes capacity_bytes = 0;
  std::int64_t downlink_rate_bps = kDefaultDownlinkRateBps;

  bool operator==(const SatelliteSpec&) const = default;
};

struct GroundStationSpec {
  std::string id;
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  double altitude_m = 0.0;
  int antenna_count = kDefaultAntennaCount;
  double min_elevation_deg = kDefaultMinElevationDeg;

  bool operator==(const GroundStationSpec&) const = default;
};

struct DataUnit {
  std::string unit_id;
  Slot capture_slot = 0;
  Bytes size_bytes = 0;

  bool operator==(const DataUnit&) const = default;
};

/// Captured data units per low-priority satellite, each list in FIFO
/// (capture) order.
struct CaptureTrace {
  std::map<std::string, std::vector<DataUnit>> units;

  std::span<const DataUnit> of(const std::string& satellite_id) const;
  // Aggregate input I_s(t).
  Bytes input_at(const std::string& satellite_id, Slot t) const;
  // Per-slot aggregate input over [0, horizon_slots).
  std::vector<Bytes> inputs(const std::string& satellite_id, Slot horizon_slots) const;

  bool operator==(const CaptureTrace&) const = default;
};

/// Queue content already on board at the attack start, synthesized as
/// `units` units of `unit_bytes` with ids id_prefix + index (0 = head).
struct InitialQueue {
  int units = kDefaultInitialQueueUnits;
  Bytes unit_bytes = kDefaultImageBytes;
  std::string id_prefix = "init-";
  std::vector<Bytes> unit_sizes;  // optional per-unit sizes overriding unit_bytes

  std::string unit_id(int index) const { return id_prefix + std::to_string(index); }
  Bytes size_of(int index) const {
    return unit_sizes.empty() ? unit_bytes : unit_sizes[static_cast<std::size_t>(index)];
  }
  Bytes total_bytes() const;
  bool operator==(const InitialQueue&) const = default;
};

struct TargetSpec {
  std::string satellite_id;
  std::vector<std::string> unit_ids;  // capture order; last one is the latest unit
  Slot attack_start_slot = 0;
  std::optional<Slot> target_downlink_slot;
  std::optional<double> cost_budget;
  InitialQueue initial_queue;

  bool operator==(const TargetSpec&) const = default;
};

struct CostModel {
  double unit_task_price = 1.0;
  bool operator==(const CostModel&) const = default;
};

/// Immutable world description. Derived sets (transmissible, attackable,
/// queue state) are computed by the scheduler and queue modules.
struct ConstellationScenario {
  TimeGrid time;
  std::vector<SatelliteSpec> satellites;
  std::vector<GroundStationSpec> stations;
  CaptureTrace trace;
  std::optional<TargetSpec> target;
  CostModel costs;
  std::uint64_t seed = 1;
  // Precomputed contact-window CSV that replaces orbit propagation.
  std::optional<std::filesystem::path> windows_file;

  const SatelliteSpec* find_satellite(std::string_view id) const;
  const GroundStationSpec* find_station(std::string_view id) const;
  const TargetSpec& require_target() const;  // ValidationError("target") if absent
  std::vector<const SatelliteSpec*> low_priority() const;
  std::vector<const SatelliteSpec*> high_priority() const;

  bool operator==(const ConstellationScenario&) const = default;
};

// Throws IoError, ParseError, ValidationError.
ConstellationScenario load_scenario(const std::filesystem::path& path);
// Parses JSON text; relative file references resolve against `base_dir`.
ConstellationScenario parse_scenario(std::string_view json_text,
                                     const std::filesystem::path& base_dir = {});
std::string serialize_scenario(const ConstellationScenario& scenario);
void validate(const ConstellationScenario& scenario);

// CSV with header unit_id,satellite_id,capture_iso8601,size_bytes.
CaptureTrace parse_trace_csv(std::string_view csv_text, const TimeGrid& grid);

// Position (0 = head) of every unit of `satellite_id` in the onboard FIFO as
// seen from the attack start: initial queue first, then captures at or after
// the start slot.
std::vector<std::string> fifo_order(const ConstellationScenario& scenario,
                                    const std::string& satellite_id);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace orbitsiege
