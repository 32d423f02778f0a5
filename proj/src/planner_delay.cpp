#include "orbitsiege/planner_delay.hpp"

#include <algorithm>

#include "orbitsiege/errors.hpp"

namespace orbitsiege {
void validate(const DelayPlanRequest& request) {
  validate_context(request.context);
  const PlanContext& ctx = request.context;
  TargetTiming base = target_timing(*ctx.queue, AttackSet(ctx.queue->horizon_slots()), ctx.targets.back());
  if (base.dropped)
    throw ValidationError("target.unit_ids", "last target is dropped without any attack");
  if (request.target_downlink_slot <= base.evacuation)
    throw ValidationError("target.target_downlink_slot",
                          "must be after the unattacked downlink slot " + std::to_string(base.evacuation));
}

PlanResult plan_delay(const DelayPlanRequest& request) {
  validate(request);
  const PlanContext& ctx = request.context;
  const QueueModel& model = *ctx.queue;
  const AttackSurface& surface = *ctx.surface;
  const Slot horizon = model.horizon_slots();
  const AttackSet none(horizon);

  const Slot required = request.target_downlink_slot - target_timing(model, none, ctx.targets.back()).evacuation;
  AttackSet y(horizon);
  std::vector<AttackedSlot> chosen;
  auto finish = [&](PlanStatus status, std::string reason) {
    PlanResult r;
    r.status = status;
    r.reason = std::move(reason);
    r.strategy = describe_strategy(ctx, chosen);
    return r;
  };

  for (std::size_t target : ctx.targets) {
    const std::string& unit = model.units()[target].unit_id;
    TargetTiming now = target_timing(model, y, target);
    if (now.dropped) return finish(PlanStatus::Success, "");
    TargetTiming base = target_timing(model, none, target);
    if (base.dropped) continue;
    while (now.evacuation - base.evacuation <= required) {
      Slot best = -1;
      for (Slot t = std::max(now.last_full + 1, Slot{0}); t <= std::min(now.evacuation, horizon - 1); ++t) {
        auto i = static_cast<std::size_t>(t);
        if (!surface.attackable[i] || y.contains(t)) continue;
        if (best < 0 || surface.cost[i] < surface.cost[static_cast<std::size_t>(best)]) best = t;
      }
      if (best < 0)
        return finish(PlanStatus::AttackFail, "no attackable slot between the last full slot " +
                                                  std::to_string(now.last_full) + " and the downlink slot " +
                                                  std::to_string(now.evacuation) + " of " + unit);
      y.add(best);
      chosen.push_back({best, surface.cost[static_cast<std::size_t>(best)], unit});
      now = target_timing(model, y, target);
      if (now.dropped) return finish(PlanStatus::Success, "");
    }
  }
  return finish(PlanStatus::Success, "");
}

VerifyReport verify_delay(const QueueModel& model, const AttackSet& attacked, std::span<const std::size_t> targets,
                          Slot target_downlink_slot) {
  VerifyReport report;
  if (targets.empty()) {
    report.detail = "no targets";
    return report;
  }
  QueueTrace trace = evolve(model, attacked, targets);
  for (const auto& t : trace.targets)
    report.targets.push_back({model.units()[t.unit_index].unit_id, t.evacuation, t.dropped, t.drop_slot});
  const TargetTiming& last = trace.targets.back();
  report.success = last.dropped || last.evacuation > target_downlink_slot;
  report.detail = last.dropped ? "last target dropped at slot " + std::to_string(last.drop_slot)
                               : "last target downlinked at slot " + std::to_string(last.evacuation);
  return report;
}

}  // namespace orbitsiege
