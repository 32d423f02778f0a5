#pragma once

#include "orbitsiege/strategy.hpp"

namespace orbitsiege {

struct DelayPlanRequest {
  PlanContext context;
  Slot target_downlink_slot = 0;  // t*(last target)
};

// Throws ValidationError when the request is malformed: empty targets, A not
// a subset of X, or t* not after the last target's unattacked downlink slot.
void validate(const DelayPlanRequest& request);

/// Greedy minimum-cost delay planning. Per target in capture order: while the
/// target's delay does not exceed the required delay, attack the cheapest
/// (earliest on ties) attackable slot in (t_lb, t_e]; fail when that window is
/// empty; stop early once a target is dropped.
PlanResult plan_delay(const DelayPlanRequest& request);

struct VerifyReport {
  bool success = false;
  std::vector<TargetResult> targets;
  std::string detail;
};

// True iff the last target's downlink slot under `attacked` is after t*.
VerifyReport verify_delay(const QueueModel& model, const AttackSet& attacked,
                          std::span<const std::size_t> targets, Slot target_downlink_slot);

}  // namespace orbitsiege
