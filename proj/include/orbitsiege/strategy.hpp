#pragma once

#include <string>
#include <vector>

#include "orbitsiege/queue.hpp"
#include "orbitsiege/scheduler.hpp"

namespace orbitsiege {

struct AttackedSlot {
  Slot slot = 0;
  double cost = 0.0;
  std::string motivating_unit;  // target unit whose loop iteration picked the slot
};

struct TargetResult {
  std::string unit_id;
  Slot evacuation = 0;  // kNeverSlot when dropped
  bool dropped = false;
  Slot drop_slot = -1;
};

/// Attacked slots Y (ascending), their total cost and the outcome the planner
/// expects for each target.
struct AttackStrategy {
  std::vector<AttackedSlot> slots;
  double total_cost = 0.0;
  std::vector<TargetResult> targets;

  std::vector<Slot> slot_indices() const;
  AttackSet as_set(Slot horizon_slots) const;
};

enum class PlanStatus { Success, AttackFail };

struct PlanResult {
  PlanStatus status = PlanStatus::AttackFail;
  AttackStrategy strategy;  // on failure: the slots chosen before giving up
  std::string reason;

  bool ok() const { return status == PlanStatus::Success; }
};

/// Shared planner input: the target's queue, its attack surface (A, rho) and
/// the target units as indices into the queue's FIFO, in capture order.
struct PlanContext {
  const QueueModel* queue = nullptr;
  const AttackSurface* surface = nullptr;
  std::vector<std::size_t> targets;
};

// Throws ValidationError on missing inputs, unordered targets, or an
// attackable slot that is not transmissible or has no finite cost.
void validate_context(const PlanContext& ctx);

// Records total cost and per-target outcomes for `slots` under `ctx`.
AttackStrategy describe_strategy(const PlanContext& ctx, std::vector<AttackedSlot> slots);

// CSV: slot,cost,motivating_unit
std::string format_strategy_csv(const AttackStrategy& strategy);
AttackStrategy parse_strategy_csv(std::string_view csv_text);
// JSON-compatible summary object.
std::string format_strategy_json(const PlanResult& result, bool include_drop_slot);

}  // namespace orbitsiege
