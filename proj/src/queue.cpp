#include "orbitsiege/queue.hpp"

#include <algorithm>
#include <stdexcept>

#include "orbitsiege/emit.hpp"
#include "orbitsiege/errors.hpp"
#include "orbitsiege/scheduler.hpp"

namespace orbitsiege {
namespace {

struct Tracker {
  std::size_t index = 0;
  Bytes begin = 0;
  Bytes end = 0;
  Slot arrival = 0;
  bool resolved = false;
  TargetTiming timing;
};

std::vector<Tracker> make_trackers(const QueueModel& model, std::span<const std::size_t> targets) {
  std::vector<Tracker> out;
  for (std::size_t i : targets) {
    if (i >= model.units().size()) throw std::out_of_range("queue: target index out of range");
    Tracker t;
    t.index = i;
    t.begin = model.unit_begin(i);
    t.end = model.unit_end(i);
    t.arrival = model.units()[i].arrival_slot;
    t.timing.unit_index = i;
    t.timing.evacuation = model.horizon_slots();
    out.push_back(t);
  }
  return out;
}

// Fills last_full from the slots that were full, restricted to [start, t_e).
void finish_timing(TargetTiming& timing, const std::vector<Slot>& full_slots, Slot start, Slot horizon) {
  Slot bound = timing.dropped ? horizon : std::min(timing.evacuation, horizon);
  timing.last_full = start;
  for (Slot t : full_slots)
    if (t < bound) timing.last_full = std::max(timing.last_full, t);
}

Bytes drop_amount(Bytes length, Bytes capacity, Bytes per_slot) {
  if (length <= capacity) return 0;
  Bytes d = length - capacity;
  if (d < per_slot) d = std::min(per_slot, length);
  return d;
}

}  // namespace

Bytes per_slot_capacity(std::int64_t rate_bps, std::int64_t slot_seconds) {
  return static_cast<Bytes>((static_cast<__int128>(rate_bps) * slot_seconds) / 8);
}

Bytes per_slot_capacity(const ConstellationScenario& sc, const std::string& satellite_id) {
  const SatelliteSpec* s = sc.find_satellite(satellite_id);
  if (!s) throw ValidationError("satellite_id", "unknown satellite '" + satellite_id + "'");
  return per_slot_capacity(s->downlink_rate_bps, sc.time.slot_seconds);
}

QueueModel::QueueModel(Slot start_slot, Slot horizon_slots, Bytes capacity, Bytes per_slot,
                       std::vector<QueueUnit> units, std::vector<bool> transmissible)
    : start_(start_slot),
      horizon_(horizon_slots),
      capacity_(capacity),
      slot_capacity_(per_slot),
      units_(std::move(units)),
      transmissible_(std::move(transmissible)) {
  if (horizon_ < 1 || start_ < 0 || start_ >= horizon_) throw std::invalid_argument("QueueModel: bad slot range");
  if (transmissible_.size() != static_cast<std::size_t>(horizon_))
    throw std::invalid_argument("QueueModel: transmissible mask does not cover the horizon");
  arrivals_.assign(static_cast<std::size_t>(horizon_), 0);
  arrival_offsets_.assign(static_cast<std::size_t>(horizon_) + 1, 0);
  Bytes running = 0;
  Slot prev = std::numeric_limits<Slot>::min();
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const QueueUnit& u = units_[i];
    if (u.size_bytes <= 0) throw std::invalid_argument("QueueModel: unit sizes must be positive");
    if (u.arrival_slot < prev) throw std::invalid_argument("QueueModel: units not in FIFO order");
    if (u.arrival_slot >= horizon_) throw std::invalid_argument("QueueModel: arrival outside the horizon");
    prev = u.arrival_slot;
    running += u.size_bytes;
    unit_end_.push_back(running);
    if (u.arrival_slot < start_) {
      initial_bytes_ += u.size_bytes;
      ++initial_units_;
    } else {
      arrivals_[static_cast<std::size_t>(u.arrival_slot)] += u.size_bytes;
      ++arrival_offsets_[static_cast<std::size_t>(u.arrival_slot) + 1];
    }
  }
  arrival_offsets_[0] = initial_units_;
  for (std::size_t t = 0; t < static_cast<std::size_t>(horizon_); ++t) arrival_offsets_[t + 1] += arrival_offsets_[t];
}

std::optional<std::size_t> QueueModel::index_of(std::string_view unit_id) const {
  for (std::size_t i = 0; i < units_.size(); ++i)
    if (units_[i].unit_id == unit_id) return i;
  return std::nullopt;
}

std::span<const QueueUnit> QueueModel::arriving_at(Slot t) const {
  if (t < start_ || t >= horizon_) return {};
  auto i = static_cast<std::size_t>(t);
  return std::span<const QueueUnit>(units_).subspan(arrival_offsets_[i], arrival_offsets_[i + 1] - arrival_offsets_[i]);
}

QueueModel build_queue_model(const ConstellationScenario& sc, const std::string& satellite_id,
                             const AttackSurface& surface, Slot start_slot, const InitialQueue& initial) {
  const SatelliteSpec* s = sc.find_satellite(satellite_id);
  if (!s) throw ValidationError("satellite_id", "unknown satellite '" + satellite_id + "'");
  std::vector<QueueUnit> units;
  for (int i = 0; i < initial.units; ++i) units.push_back({initial.unit_id(i), initial.size_of(i), start_slot - 1});
  for (const DataUnit& u : sc.trace.of(satellite_id))
    if (u.capture_slot >= start_slot) units.push_back({u.unit_id, u.size_bytes, u.capture_slot});
  return QueueModel(start_slot, sc.time.horizon_slots, s->capacity_bytes, per_slot_capacity(sc, satellite_id),
                    std::move(units), surface.transmissible);
}

AttackSet::AttackSet(Slot horizon_slots, std::span<const Slot> slots) : AttackSet(horizon_slots) {
  for (Slot t : slots) add(t);
}

void AttackSet::add(Slot t) {
  if (t < 0 || static_cast<std::size_t>(t) >= mask_.size()) throw std::out_of_range("AttackSet: slot outside horizon");
  if (mask_[static_cast<std::size_t>(t)]) return;
  mask_[static_cast<std::size_t>(t)] = true;
  slots_.insert(std::upper_bound(slots_.begin(), slots_.end(), t), t);
}

void AttackSet::remove(Slot t) {
  if (!contains(t)) return;
  mask_[static_cast<std::size_t>(t)] = false;
  slots_.erase(std::find(slots_.begin(), slots_.end(), t));
}

Bytes OnboardQueueState::subqueue_bytes(std::string_view unit_id) const {
  Bytes sum = 0;
  for (const auto& e : fifo) {
    sum += e.remaining;
    if (e.unit_id == unit_id) return sum;
  }
  return 0;
}

SlotOutcome step(OnboardQueueState& state, std::span<const QueueUnit> arrivals, bool transmissible, bool attacked,
                 Bytes capacity, Bytes per_slot) {
  SlotOutcome out;
  state.slot += 1;
  out.slot = state.slot;
  for (const QueueUnit& u : arrivals) {
    state.fifo.push_back({u.unit_id, u.size_bytes, false});
    state.length += u.size_bytes;
  }
  if (transmissible && !attacked) {
    Bytes budget = per_slot;
    while (budget > 0 && !state.fifo.empty()) {
      QueueEntry& head = state.fifo.front();
      Bytes x = std::min(budget, head.remaining);
      head.remaining -= x;
      budget -= x;
      out.transmitted += x;
      if (head.remaining == 0) {
        out.transmitted_unit_ids.push_back(head.unit_id);
        state.fifo.pop_front();
      }
    }
    state.length -= out.transmitted;
  }
  Bytes d = drop_amount(state.length, capacity, per_slot);
  out.dropped = d;
  while (d > 0) {
    QueueEntry& head = state.fifo.front();
    Bytes x = std::min(d, head.remaining);
    head.remaining -= x;
    d -= x;
    if (!head.lost_bytes) {
      head.lost_bytes = true;
      out.dropped_unit_ids.push_back(head.unit_id);
    }
    if (head.remaining == 0) state.fifo.pop_front();
  }
  state.length -= out.dropped;
  out.queue_bytes = state.length;
  return out;
}

QueueTrace evolve(const QueueModel& model, const AttackSet& attacked, std::span<const std::size_t> targets) {
  QueueTrace trace;
  trace.start_slot = model.start_slot();
  auto trackers = make_trackers(model, targets);
  trace.subqueue_bytes.assign(trackers.size(), {});
  std::vector<Slot> full_slots;
  Bytes q = model.initial_bytes();
  Bytes consumed = 0;
  for (Slot t = model.start_slot(); t < model.horizon_slots(); ++t) {
    SlotOutcome out;
    out.slot = t;
    q += model.arrivals_at(t);
    if (model.transmissible(t) && !attacked.contains(t)) out.transmitted = std::min(model.slot_capacity(), q);
    q -= out.transmitted;
    out.dropped = drop_amount(q, model.capacity(), model.slot_capacity());
    q -= out.dropped;
    out.queue_bytes = q;
    if (q == model.capacity()) full_slots.push_back(t);
    Bytes tx_end = consumed + out.transmitted;
    Bytes drop_end = tx_end + out.dropped;
    for (std::size_t k = 0; k < trackers.size(); ++k) {
      Tracker& tr = trackers[k];
      if (!tr.resolved) {
        if (out.dropped > 0 && tx_end < tr.end && drop_end > tr.begin) {
          tr.resolved = true;
          tr.timing.dropped = true;
          tr.timing.drop_slot = t;
          tr.timing.evacuation = kNeverSlot;
        } else if (tx_end >= tr.end) {
          tr.resolved = true;
          tr.timing.evacuation = t;
        }
      }
      Bytes sub = tr.arrival <= t ? std::clamp<Bytes>(tr.end - drop_end, 0, q) : q;
      trace.subqueue_bytes[k].push_back(sub);
    }
    consumed = drop_end;
    trace.outcomes.push_back(std::move(out));
  }
  for (Tracker& tr : trackers) {
    finish_timing(tr.timing, full_slots, model.start_slot(), model.horizon_slots());
    trace.targets.push_back(tr.timing);
  }
  return trace;
}

QueueTrace evolve_fifo(const QueueModel& model, const AttackSet& attacked, std::span<const std::size_t> targets) {
  QueueTrace trace;
  trace.start_slot = model.start_slot();
  auto trackers = make_trackers(model, targets);
  trace.subqueue_bytes.assign(trackers.size(), {});
  std::vector<Slot> full_slots;
  OnboardQueueState state;
  state.slot = model.start_slot() - 1;
  for (std::size_t i = 0; i < model.initial_units(); ++i) {
    const QueueUnit& u = model.units()[i];
    state.fifo.push_back({u.unit_id, u.size_bytes, false});
    state.length += u.size_bytes;
  }
  for (Slot t = model.start_slot(); t < model.horizon_slots(); ++t) {
    SlotOutcome out = step(state, model.arriving_at(t), model.transmissible(t), attacked.contains(t),
                           model.capacity(), model.slot_capacity());
    if (out.queue_bytes == model.capacity()) full_slots.push_back(t);
    for (std::size_t k = 0; k < trackers.size(); ++k) {
      Tracker& tr = trackers[k];
      const std::string& id = model.units()[tr.index].unit_id;
      if (!tr.resolved) {
        if (std::find(out.dropped_unit_ids.begin(), out.dropped_unit_ids.end(), id) != out.dropped_unit_ids.end()) {
          tr.resolved = true;
          tr.timing.dropped = true;
          tr.timing.drop_slot = t;
          tr.timing.evacuation = kNeverSlot;
        } else if (std::find(out.transmitted_unit_ids.begin(), out.transmitted_unit_ids.end(), id) !=
                   out.transmitted_unit_ids.end()) {
          tr.resolved = true;
          tr.timing.evacuation = t;
        }
      }
      trace.subqueue_bytes[k].push_back(tr.arrival <= t ? state.subqueue_bytes(id) : state.length);
    }
    trace.outcomes.push_back(std::move(out));
  }
  for (Tracker& tr : trackers) {
    finish_timing(tr.timing, full_slots, model.start_slot(), model.horizon_slots());
    trace.targets.push_back(tr.timing);
  }
  return trace;
}

TargetTiming target_timing(const QueueModel& model, const AttackSet& attacked, std::size_t target) {
  if (target >= model.units().size()) throw std::out_of_range("queue: target index out of range");
  TargetTiming timing;
  timing.unit_index = target;
  timing.evacuation = model.horizon_slots();
  timing.last_full = model.start_slot();
  const Bytes begin = model.unit_begin(target), end = model.unit_end(target);
  Bytes q = model.initial_bytes();
  Bytes consumed = 0;
  for (Slot t = model.start_slot(); t < model.horizon_slots(); ++t) {
    q += model.arrivals_at(t);
    Bytes o = model.transmissible(t) && !attacked.contains(t) ? std::min(model.slot_capacity(), q) : 0;
    q -= o;
    Bytes d = drop_amount(q, model.capacity(), model.slot_capacity());
    q -= d;
    Bytes tx_end = consumed + o;
    if (d > 0 && tx_end < end && tx_end + d > begin) {
      timing.dropped = true;
      timing.drop_slot = t;
      timing.evacuation = kNeverSlot;
      // last_full spans the whole horizon for dropped units.
      if (q == model.capacity()) timing.last_full = t;
      for (Slot u = t + 1; u < model.horizon_slots(); ++u) {
        q += model.arrivals_at(u);
        Bytes o2 = model.transmissible(u) && !attacked.contains(u) ? std::min(model.slot_capacity(), q) : 0;
        q -= o2;
        Bytes d2 = drop_amount(q, model.capacity(), model.slot_capacity());
        q -= d2;
        if (q == model.capacity()) timing.last_full = u;
      }
      return timing;
    }
    if (tx_end >= end) {
      timing.evacuation = t;
      return timing;
    }
    if (q == model.capacity()) timing.last_full = t;
    consumed = tx_end + d;
  }
  return timing;
}

Slot attack_strength(const QueueModel& model, const AttackSet& attacked, Slot extra, std::size_t target) {
  TargetTiming before = target_timing(model, attacked, target);
  if (before.dropped) return 0;
  AttackSet with = attacked;
  with.add(extra);
  TargetTiming after = target_timing(model, with, target);
  if (after.dropped) return kNeverSlot;
  return after.evacuation - before.evacuation;
}

std::string format_queue_trace_csv(const QueueModel& model, const QueueTrace& trace) {
  std::string out = "slot,queue_bytes,tx_bytes,drop_bytes";
  for (const auto& t : trace.targets) out += ",subq_" + model.units()[t.unit_index].unit_id + "_bytes";
  out += "\n";
  for (std::size_t i = 0; i < trace.outcomes.size(); ++i) {
    const SlotOutcome& o = trace.outcomes[i];
    out += format_int(o.slot) + "," + format_int(o.queue_bytes) + "," + format_int(o.transmitted) + "," +
           format_int(o.dropped);
    for (const auto& sub : trace.subqueue_bytes) out += "," + format_int(sub[i]);
    out += "\n";
  }
  return out;
}

std::string format_queue_events_csv(const QueueTrace& trace) {
  std::string out = "slot,event,unit_id\n";
  for (const SlotOutcome& o : trace.outcomes) {
    for (const auto& id : o.transmitted_unit_ids) out += format_int(o.slot) + ",tx," + id + "\n";
    for (const auto& id : o.dropped_unit_ids) out += format_int(o.slot) + ",drop," + id + "\n";
  }
  return out;
}

}  // namespace orbitsiege
