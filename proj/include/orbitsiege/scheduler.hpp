#pragma once

#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "orbitsiege/orbit.hpp"
#include "orbitsiege/scenario.hpp"

namespace orbitsiege {

struct AntennaAssignment {
  std::string satellite_id;
  std::string station_id;
  int antenna_index = 0;
  double cost = 0.0;  // slant range, m

  bool operator==(const AntennaAssignment&) const = default;
};

/// Low-priority antenna assignment for one slot.
struct SlotSchedule {
  Slot slot = 0;
  std::vector<AntennaAssignment> assignments;  // sorted by satellite_id
  std::map<std::string, int> idle_antennas;    // per station seen by any satellite

  const AntennaAssignment* find(std::string_view satellite_id) const;
  bool operator==(const SlotSchedule&) const = default;
};

/// Windows grouped by slot for O(1) slot lookup.
class ContactIndex {
 public:
  ContactIndex(std::span<const ContactWindow> windows, Slot horizon_slots);
  std::span<const ContactWindow> at(Slot t) const;
  Slot horizon_slots() const { return static_cast<Slot>(offsets_.size()) - 1; }

 private:
  std::vector<ContactWindow> windows_;
  std::vector<std::size_t> offsets_;
};

// Rows are visible low-priority satellites, columns every antenna of every
// station they see; cost is slant range.
SlotSchedule assign_slot(const ConstellationScenario& scenario, Slot t,
                         std::span<const ContactWindow> windows_at_t);

std::vector<SlotSchedule> build_schedules_serial(const ConstellationScenario& scenario,
                                                 const ContactIndex& contacts);
std::vector<SlotSchedule> build_schedules(const ConstellationScenario& scenario,
                                          const ContactIndex& contacts);

struct AttackabilityRecord {
  Slot slot = 0;
  bool transmissible = false;
  bool attackable = false;
  int required_high_priority = 0;
  double cost = kInfiniteCost;

  static constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();
  bool operator==(const AttackabilityRecord&) const = default;
};

// Per-slot transmissibility and attackability of `satellite_id`.
// A slot is attackable when high-priority satellites can be matched to every
// idle antenna of the stations the target sees plus the target's own antenna.
std::vector<AttackabilityRecord> attackability(const ConstellationScenario& scenario,
                                               std::span<const SlotSchedule> schedules,
                                               const ContactIndex& contacts,
                                               const std::string& satellite_id);

/// Dense per-slot view of X, A and rho for one satellite.
struct AttackSurface {
  std::vector<bool> transmissible;
  std::vector<bool> attackable;
  std::vector<double> cost;

  Slot horizon_slots() const { return static_cast<Slot>(transmissible.size()); }
  std::vector<Slot> attackable_slots() const;
  static AttackSurface from_records(std::span<const AttackabilityRecord> records);
};

// CSV: slot,transmissible,attackable,required_high,cost
std::string format_attackability_csv(std::span<const AttackabilityRecord> records);

/// Everything the planners need from the world, computed once per scenario.
struct WorldView {
  std::vector<ContactWindow> windows;
  std::vector<SlotSchedule> schedules;
  ContactIndex contacts;
};

WorldView build_world(const ConstellationScenario& scenario,
                      std::vector<ContactWindow> windows);

}  // namespace orbitsiege
