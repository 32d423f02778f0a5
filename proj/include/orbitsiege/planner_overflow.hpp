#pragma once

#include "orbitsiege/planner_delay.hpp"

namespace orbitsiege {

struct OverflowPlanRequest {
  PlanContext context;
};

void validate(const OverflowPlanRequest& request);

/// Feasibility search that keeps each target on board until an overflow
/// drops it. Attackable slots at or after the target's downlink slot are
/// consumed in ascending order while they are not after the current downlink
/// slot; otherwise earlier attackable slots are consumed in descending order
/// while they lie after the last full-queue slot.
PlanResult plan_overflow(const OverflowPlanRequest& request);

// True iff every target loses bytes to an overflow drop under `attacked`.
VerifyReport verify_overflow(const QueueModel& model, const AttackSet& attacked,
                             std::span<const std::size_t> targets);

}  // namespace orbitsiege
