#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "orbitsiege/queue.hpp"
#include "orbitsiege/scheduler.hpp"

namespace testsupport {

using orbitsiege::Bytes;
using orbitsiege::Slot;

// A small queue instance plus the target satellite's slot sets.
struct QueueCase {
  orbitsiege::QueueModel model;
  orbitsiege::AttackSurface surface;
  std::vector<Slot> attackable;
};

struct CaseShape {
  int min_horizon = 8;
  int max_horizon = 50;
  int max_units = 30;
  int max_attackable = 14;
  bool unit_sized = false;  // every unit the same size
  bool granular = false;    // unit_sized, and slot volume and capacity are whole units
};

// Random queue instance: units of 1..6 bytes, a per-slot volume of 2..9 bytes,
// capacity between one slot's volume and a few dozen bytes, random X, and A
// drawn from X after the start slot.
inline QueueCase random_case(std::mt19937_64& rng, const CaseShape& shape = {}) {
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  const Slot horizon = uniform(shape.min_horizon, shape.max_horizon);
  const Slot start = uniform(0, 3);
  const Bytes unit = shape.granular ? uniform(1, 3) : uniform(1, 6);
  const Bytes per_slot = shape.granular ? unit * uniform(1, 3) : uniform(2, 9);
  const Bytes capacity = per_slot + (shape.granular ? unit * uniform(0, 10) : uniform(0, 30));
  const int total_units = uniform(1, shape.max_units);
  const int initial = uniform(0, std::min(total_units, 10));

  std::vector<orbitsiege::QueueUnit> units;
  for (int i = 0; i < initial; ++i)
    units.push_back({"u" + std::to_string(i), (shape.unit_sized || shape.granular) ? unit : Bytes(uniform(1, 6)), start - 1});
  std::vector<Slot> arrivals;
  for (int i = initial; i < total_units; ++i) arrivals.push_back(uniform(int(start), int(horizon - 1)));
  std::sort(arrivals.begin(), arrivals.end());
  for (std::size_t k = 0; k < arrivals.size(); ++k)
    units.push_back({"u" + std::to_string(initial + int(k)), (shape.unit_sized || shape.granular) ? unit : Bytes(uniform(1, 6)), arrivals[k]});

  const double px = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
  const double pa = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
  QueueCase c;
  c.surface.transmissible.assign(static_cast<std::size_t>(horizon), false);
  c.surface.attackable.assign(static_cast<std::size_t>(horizon), false);
  c.surface.cost.assign(static_cast<std::size_t>(horizon), std::numeric_limits<double>::infinity());
  for (Slot t = 0; t < horizon; ++t) {
    auto i = static_cast<std::size_t>(t);
    c.surface.transmissible[i] = coin(px);
    if (c.surface.transmissible[i] && t > start && coin(pa) && int(c.attackable.size()) < shape.max_attackable) {
      c.surface.attackable[i] = true;
      c.surface.cost[i] = uniform(1, 3);
      c.attackable.push_back(t);
    }
  }
  c.model = orbitsiege::QueueModel(start, horizon, capacity, per_slot, std::move(units), c.surface.transmissible);
  return c;
}

// Independent per-unit queue simulation, written without the library's
// step(): a vector of remaining byte counts with a moving head index.
struct OracleSlot {
  Bytes queue = 0;
  Bytes tx = 0;
  Bytes drop = 0;
};

struct OracleRun {
  std::vector<OracleSlot> slots;       // start..last
  std::vector<Slot> evacuation;        // per unit: last-byte slot, horizon if pending, -1 never arrived
  std::vector<Slot> drop_slot;         // per unit: first slot losing a byte, -1 otherwise
  std::vector<bool> full;              // per slot from start: exactly at capacity
};

inline OracleRun oracle_run(const orbitsiege::QueueModel& m, const std::vector<bool>& attacked_mask) {
  const auto n = m.units().size();
  std::vector<Bytes> remaining(n, 0);
  std::vector<bool> arrived(n, false);
  OracleRun run;
  run.evacuation.assign(n, m.horizon_slots());
  run.drop_slot.assign(n, -1);
  std::size_t head = 0, tail = 0;
  while (tail < n && m.units()[tail].arrival_slot < m.start_slot()) {
    remaining[tail] = m.units()[tail].size_bytes;
    arrived[tail] = true;
    ++tail;
  }
  for (Slot t = m.start_slot(); t < m.horizon_slots(); ++t) {
    while (tail < n && m.units()[tail].arrival_slot == t) {
      remaining[tail] = m.units()[tail].size_bytes;
      arrived[tail] = true;
      ++tail;
    }
    Bytes length = 0;
    for (std::size_t i = head; i < tail; ++i) length += remaining[i];
    OracleSlot s;
    bool attacked = attacked_mask[static_cast<std::size_t>(t)];
    if (m.transmissible(t) && !attacked) {
      Bytes budget = m.slot_capacity();
      while (budget > 0 && head < tail) {
        Bytes x = std::min(budget, remaining[head]);
        remaining[head] -= x;
        budget -= x;
        s.tx += x;
        if (remaining[head] == 0) {
          if (run.drop_slot[head] < 0) run.evacuation[head] = t;
          ++head;
        }
      }
    }
    length -= s.tx;
    if (length > m.capacity()) {
      Bytes d = length - m.capacity();
      if (d < m.slot_capacity()) d = std::min(m.slot_capacity(), length);
      s.drop = d;
      while (d > 0) {
        Bytes x = std::min(d, remaining[head]);
        remaining[head] -= x;
        d -= x;
        if (run.drop_slot[head] < 0) run.drop_slot[head] = t;
        if (remaining[head] == 0) ++head;
      }
      length -= s.drop;
    }
    s.queue = length;
    run.full.push_back(length == m.capacity());
    run.slots.push_back(s);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (run.drop_slot[i] >= 0) run.evacuation[i] = orbitsiege::kNeverSlot;
  return run;
}

inline std::vector<bool> mask_of(Slot horizon, const std::vector<Slot>& slots) {
  std::vector<bool> mask(static_cast<std::size_t>(horizon), false);
  for (Slot t : slots) mask[static_cast<std::size_t>(t)] = true;
  return mask;
}

// Every subset of `pool` as a slot list, via bit masks.
inline std::vector<Slot> subset(const std::vector<Slot>& pool, std::uint32_t bits) {
  std::vector<Slot> out;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (bits & (1u << i)) out.push_back(pool[i]);
  return out;
}

inline double subset_cost(const orbitsiege::AttackSurface& s, const std::vector<Slot>& slots) {
  double c = 0;
  for (Slot t : slots) c += s.cost[static_cast<std::size_t>(t)];
  return c;
}

}  // namespace testsupport
