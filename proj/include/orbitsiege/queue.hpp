#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orbitsiege/scenario.hpp"

namespace orbitsiege {

struct AttackSurface;

// Evacuation slot of a unit whose bytes were dropped.
inline constexpr Slot kNeverSlot = std::numeric_limits<Slot>::max();

// floor(rate_bps * slot_seconds / 8)
Bytes per_slot_capacity(std::int64_t downlink_rate_bps, std::int64_t slot_seconds);
Bytes per_slot_capacity(const ConstellationScenario& scenario, const std::string& satellite_id);

struct QueueUnit {
  std::string unit_id;
  Bytes size_bytes = 0;
  Slot arrival_slot = 0;  // < start slot: already on board at the start
};

/// Inputs of one satellite's onboard queue from the attack start onward.
/// Units are in FIFO order; per-slot arrival totals and each unit's byte
/// range in the FIFO are cached on construction.
class QueueModel {
 public:
  QueueModel() = default;
  QueueModel(Slot start_slot, Slot horizon_slots, Bytes capacity, Bytes per_slot_capacity,
             std::vector<QueueUnit> units, std::vector<bool> transmissible);

  Slot start_slot() const { return start_; }
  Slot horizon_slots() const { return horizon_; }
  Slot last_slot() const { return horizon_ - 1; }
  Bytes capacity() const { return capacity_; }
  Bytes slot_capacity() const { return slot_capacity_; }
  const std::vector<QueueUnit>& units() const { return units_; }
  const std::vector<bool>& transmissible() const { return transmissible_; }
  bool transmissible(Slot t) const { return transmissible_[static_cast<std::size_t>(t)]; }

  Bytes initial_bytes() const { return initial_bytes_; }
  std::size_t initial_units() const { return initial_units_; }
  Bytes arrivals_at(Slot t) const { return arrivals_[static_cast<std::size_t>(t)]; }
  // [begin, end) byte offsets of unit i counted from the queue head at the start.
  Bytes unit_begin(std::size_t i) const { return unit_end_[i] - units_[i].size_bytes; }
  Bytes unit_end(std::size_t i) const { return unit_end_[i]; }

  std::optional<std::size_t> index_of(std::string_view unit_id) const;
  // Units arriving at exactly slot t, as a FIFO-ordered span.
  std::span<const QueueUnit> arriving_at(Slot t) const;

 private:
  Slot start_ = 0;
  Slot horizon_ = 0;
  Bytes capacity_ = 0;
  Bytes slot_capacity_ = 0;
  std::vector<QueueUnit> units_;
  std::vector<bool> transmissible_;
  std::vector<Bytes> arrivals_;
  std::vector<Bytes> unit_end_;
  std::vector<std::size_t> arrival_offsets_;
  Bytes initial_bytes_ = 0;
  std::size_t initial_units_ = 0;
};

// Queue of `satellite_id` under the scenario's initial-queue configuration:
// synthesized initial units, then every captured unit with capture slot at or
// after `start_slot`.
QueueModel build_queue_model(const ConstellationScenario& scenario,
                             const std::string& satellite_id, const AttackSurface& surface,
                             Slot start_slot, const InitialQueue& initial);

/// Set of attacked slots with O(1) membership.
class AttackSet {
 public:
  AttackSet() = default;
  explicit AttackSet(Slot horizon_slots) : mask_(static_cast<std::size_t>(horizon_slots), false) {}
  AttackSet(Slot horizon_slots, std::span<const Slot> slots);

  bool contains(Slot t) const {
    return t >= 0 && static_cast<std::size_t>(t) < mask_.size() && mask_[static_cast<std::size_t>(t)];
  }
  void add(Slot t);
  void remove(Slot t);
  bool empty() const { return slots_.empty(); }
  std::size_t size() const { return slots_.size(); }
  const std::vector<Slot>& slots() const { return slots_; }  // ascending

 private:
  std::vector<bool> mask_;
  std::vector<Slot> slots_;
};

struct QueueEntry {
  std::string unit_id;
  Bytes remaining = 0;
  bool lost_bytes = false;  // some bytes left through an overflow drop
};

/// Per-unit FIFO state of the onboard queue at the end of `slot`.
struct OnboardQueueState {
  Slot slot = 0;
  std::deque<QueueEntry> fifo;
  Bytes length = 0;

  Bytes subqueue_bytes(std::string_view unit_id) const;  // 0 when not on board
};

struct SlotOutcome {
  Slot slot = 0;
  Bytes transmitted = 0;  // O(t)
  Bytes dropped = 0;      // D(t), after rounding
  Bytes queue_bytes = 0;  // Q(t)
  std::vector<std::string> transmitted_unit_ids;  // last byte downlinked this slot
  std::vector<std::string> dropped_unit_ids;      // lost at least one byte this slot

  Bytes delta() const { return transmitted + dropped; }
  bool overflowed() const { return dropped > 0; }
};

/// One slot of queue evolution, in the fixed order arrivals -> transmission
/// -> capacity drop. A raw overflow smaller than one slot's transmissible
/// volume is rounded up to that volume (bounded by the queue length). Both
/// transmission and drops consume the head of the queue.
SlotOutcome step(OnboardQueueState& state, std::span<const QueueUnit> arrivals,
                 bool transmissible, bool attacked, Bytes capacity, Bytes per_slot_capacity);

struct TargetTiming {
  std::size_t unit_index = 0;
  // t_e: slot the last byte is downlinked; horizon_slots if still on board at
  // the end; kNeverSlot once any byte was dropped.
  Slot evacuation = 0;
  bool dropped = false;
  Slot drop_slot = -1;
  // t_lb: last slot in [start, evacuation) whose queue was full, else start.
  Slot last_full = 0;
};

struct QueueTrace {
  Slot start_slot = 0;
  std::vector<SlotOutcome> outcomes;  // slots start..last
  std::vector<TargetTiming> targets;
  std::vector<std::vector<Bytes>> subqueue_bytes;  // [target][slot - start]
};

// Aggregate byte-counting evolution; unit id lists in outcomes stay empty.
QueueTrace evolve(const QueueModel& model, const AttackSet& attacked,
                  std::span<const std::size_t> targets);
// Per-unit FIFO evolution built on step(); fills unit id lists.
QueueTrace evolve_fifo(const QueueModel& model, const AttackSet& attacked,
                       std::span<const std::size_t> targets);

// Timing of a single unit via the aggregate path, without building a trace.
TargetTiming target_timing(const QueueModel& model, const AttackSet& attacked,
                           std::size_t target);

// Phi = t_e(Y + {t'}) - t_e(Y); kNeverSlot when the extra attack makes the
// unit drop. Zero when the unit was already dropped under Y.
Slot attack_strength(const QueueModel& model, const AttackSet& attacked, Slot extra,
                     std::size_t target);

// CSV: slot,queue_bytes,tx_bytes,drop_bytes,subq_<unit_id>_bytes...
std::string format_queue_trace_csv(const QueueModel& model, const QueueTrace& trace);
// CSV: slot,event,unit_id  (event is tx or drop)
std::string format_queue_events_csv(const QueueTrace& trace);

}  // namespace orbitsiege
