#include "orbitsiege/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "orbitsiege/emit.hpp"
#include "orbitsiege/errors.hpp"

namespace orbitsiege {
namespace {

nlohmann::json number_json(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15) return static_cast<std::int64_t>(v);
  return v;
}

}  // namespace

std::vector<Slot> AttackStrategy::slot_indices() const {
  std::vector<Slot> out;
  for (const auto& s : slots) out.push_back(s.slot);
  return out;
}

AttackSet AttackStrategy::as_set(Slot horizon_slots) const {
  auto idx = slot_indices();
  return AttackSet(horizon_slots, idx);
}

void validate_context(const PlanContext& ctx) {
  if (!ctx.queue || !ctx.surface) throw ValidationError("request", "queue model and attack surface are required");
  if (ctx.targets.empty()) throw ValidationError("target.unit_ids", "must not be empty");
  const QueueModel& q = *ctx.queue;
  const AttackSurface& s = *ctx.surface;
  if (s.horizon_slots() != q.horizon_slots() || s.attackable.size() != s.transmissible.size() ||
      s.cost.size() != s.transmissible.size())
    throw ValidationError("surface", "attack surface does not cover the horizon");
  for (std::size_t t = 0; t < s.attackable.size(); ++t)
    if (s.attackable[t] && (!s.transmissible[t] || !(s.cost[t] >= 0.0) || s.cost[t] == AttackabilityRecord::kInfiniteCost))
      throw ValidationError("surface", "slot " + std::to_string(t) + " is attackable but not transmissible or has no finite cost");
  for (std::size_t k = 0; k < ctx.targets.size(); ++k) {
    if (ctx.targets[k] >= q.units().size()) throw ValidationError("target.unit_ids", "target outside the queue");
    if (k > 0 && ctx.targets[k] <= ctx.targets[k - 1])
      throw ValidationError("target.unit_ids", "targets must be listed in capture order");
  }
}


AttackStrategy describe_strategy(const PlanContext& ctx, std::vector<AttackedSlot> slots) {
  AttackStrategy s;
  std::sort(slots.begin(), slots.end(), [](const AttackedSlot& a, const AttackedSlot& b) { return a.slot < b.slot; });
  s.slots = std::move(slots);
  for (auto& a : s.slots) {
    a.cost = ctx.surface->cost[static_cast<std::size_t>(a.slot)];
    s.total_cost += a.cost;
  }
  AttackSet set = s.as_set(ctx.queue->horizon_slots());
  for (std::size_t i : ctx.targets) {
    TargetTiming t = target_timing(*ctx.queue, set, i);
    s.targets.push_back({ctx.queue->units()[i].unit_id, t.evacuation, t.dropped, t.drop_slot});
  }
  return s;
}

std::string format_strategy_csv(const AttackStrategy& strategy) {
  std::string out = "slot,cost,motivating_unit\n";
  for (const auto& a : strategy.slots)
    out += format_int(a.slot) + "," + format_cost(a.cost) + "," + a.motivating_unit + "\n";
  return out;
}

AttackStrategy parse_strategy_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("strategy CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "slot,cost,motivating_unit") throw ParseError("strategy CSV: unexpected header '" + line + "'");
  AttackStrategy s;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string where = "strategy CSV line " + std::to_string(line_no);
    auto c1 = line.find(',');
    auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw ParseError(where + ": expected 3 columns");
    AttackedSlot a;
    std::string slot = line.substr(0, c1), cost = line.substr(c1 + 1, c2 - c1 - 1);
    char* end = nullptr;
    a.slot = std::strtoll(slot.c_str(), &end, 10);
    if (slot.empty() || *end || a.slot < 0) throw ParseError(where + ": bad slot '" + slot + "'");
    a.cost = std::strtod(cost.c_str(), &end);
    if (cost.empty() || *end) throw ParseError(where + ": bad cost '" + cost + "'");
    a.motivating_unit = line.substr(c2 + 1);
    s.total_cost += a.cost;
    s.slots.push_back(std::move(a));
  }
  std::sort(s.slots.begin(), s.slots.end(), [](const AttackedSlot& a, const AttackedSlot& b) { return a.slot < b.slot; });
  for (std::size_t i = 1; i < s.slots.size(); ++i)
    if (s.slots[i].slot == s.slots[i - 1].slot) throw ParseError("strategy CSV: duplicate slot " + format_int(s.slots[i].slot));
  return s;
}

std::string format_strategy_json(const PlanResult& result, bool include_drop_slot) {
  nlohmann::ordered_json j;
  j["status"] = result.ok() ? "success" : "attack_fail";
  if (!result.reason.empty()) j["reason"] = result.reason;
  auto slots = nlohmann::ordered_json::array();
  for (const auto& a : result.strategy.slots)
    slots.push_back({{"slot", a.slot}, {"cost", number_json(a.cost)}, {"motivating_unit", a.motivating_unit}});
  j["slots"] = std::move(slots);
  j["total_cost"] = number_json(result.strategy.total_cost);
  auto targets = nlohmann::ordered_json::array();
  for (const auto& t : result.strategy.targets) {
    nlohmann::ordered_json jt = {{"unit_id", t.unit_id}, {"dropped", t.dropped}};
    jt["evacuation_slot"] = t.dropped ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(t.evacuation);
    if (include_drop_slot) jt["drop_slot"] = t.dropped ? nlohmann::ordered_json(t.drop_slot) : nlohmann::ordered_json(nullptr);
    targets.push_back(std::move(jt));
  }
  j["targets"] = std::move(targets);
  return j.dump(2) + "\n";
}

}  // namespace orbitsiege
