#include "orbitsiege/planner_overflow.hpp"

#include <algorithm>

#include "orbitsiege/errors.hpp"

namespace orbitsiege {

void validate(const OverflowPlanRequest& request) { validate_context(request.context); }

PlanResult plan_overflow(const OverflowPlanRequest& request) {
  validate(request);
  const PlanContext& ctx = request.context;
  const QueueModel& model = *ctx.queue;
  const AttackSurface& surface = *ctx.surface;
  const Slot horizon = model.horizon_slots();

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
    if (now.dropped) continue;
    std::vector<Slot> later, earlier;
    for (Slot t = model.start_slot(); t < horizon; ++t) {
      if (!surface.attackable[static_cast<std::size_t>(t)] || y.contains(t)) continue;
      (t >= now.evacuation ? later : earlier).push_back(t);
    }
    std::reverse(earlier.begin(), earlier.end());
    std::size_t n = 0, p = 0;
    while (!now.dropped) {
      if (n < later.size() && later[n] <= now.evacuation) {
        Slot t = later[n++];
        y.add(t);
        chosen.push_back({t, surface.cost[static_cast<std::size_t>(t)], unit});
        now = target_timing(model, y, target);
      } else if (p < earlier.size() && earlier[p] > now.last_full) {
        Slot t = earlier[p++];
        y.add(t);
        TargetTiming next = target_timing(model, y, target);
        if (!next.dropped && next.evacuation == now.evacuation) {
          y.remove(t);
          return finish(PlanStatus::AttackFail, "attacking slot " + std::to_string(t) + " no longer delays " + unit);
        }
        chosen.push_back({t, surface.cost[static_cast<std::size_t>(t)], unit});
        now = next;
      } else {
        return finish(PlanStatus::AttackFail, "no remaining attackable slot keeps " + unit + " on board");
      }
    }
  }
  return finish(PlanStatus::Success, "");
}

VerifyReport verify_overflow(const QueueModel& model, const AttackSet& attacked, std::span<const std::size_t> targets) {
  VerifyReport report;
  if (targets.empty()) {
    report.detail = "no targets";
    return report;
  }
  QueueTrace trace = evolve(model, attacked, targets);
  report.success = true;
  for (const auto& t : trace.targets) {
    report.targets.push_back({model.units()[t.unit_index].unit_id, t.evacuation, t.dropped, t.drop_slot});
    if (!t.dropped) report.success = false;
  }
  report.detail = report.success ? "every target dropped" : "some target is downlinked or still on board";
  return report;
}

}  // namespace orbitsiege
