#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <random>
#include <string>

#include "orbitsiege/eval.hpp"
#include "orbitsiege/queue.hpp"
#include "support.hpp"

namespace os = orbitsiege;
using namespace testsupport;

namespace {

constexpr Bytes kUnit = 150'000'000;

os::QueueModel s0_model(Bytes capacity_units) {
  auto sc = os::load_scenario(std::string(ORBITSIEGE_SCENARIO_DIR) + (capacity_units == 10 ? "/s0.json" : "/s0ovf.json"));
  os::EvalWorld w(sc);
  return os::target_setup(w).model;
}

std::vector<std::size_t> all_units(const os::QueueModel& m) {
  std::vector<std::size_t> v(m.units().size());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

Slot evac(const os::QueueModel& m, std::vector<Slot> y, std::size_t unit) {
  return os::target_timing(m, os::AttackSet(m.horizon_slots(), y), unit).evacuation;
}

// Whole-unit slot volume: the rounding rule never changes a drop.
CaseShape rounding_free() {
  CaseShape s;
  s.granular = true;
  return s;
}

QueueCase rounding_free_case(std::mt19937_64& rng) {
  for (;;) {
    QueueCase c = random_case(rng, rounding_free());
    if (!c.model.units().empty() && c.model.slot_capacity() == c.model.units()[0].size_bytes) return c;
  }
}

}  // namespace

TEST_CASE("per-slot capacity") {
  CHECK(os::per_slot_capacity(160'000'000, 60) == 1'200'000'000);
  CHECK(os::per_slot_capacity(80'000'000, 60) == 600'000'000);
  CHECK(os::per_slot_capacity(7, 1) == 0);
  CHECK(os::per_slot_capacity(40'000'000, 60) == 2 * kUnit);
}

TEST_CASE("step examples") {
  std::vector<os::QueueUnit> none;
  SUBCASE("empty queue without arrivals") {
    os::OnboardQueueState s;
    auto out = os::step(s, none, true, false, 10, 2);
    CHECK(out.transmitted == 0);
    CHECK(out.dropped == 0);
    CHECK(s.length == 0);
    CHECK(s.fifo.empty());
  }
  SUBCASE("five units, one arrival, two downlinked") {
    os::OnboardQueueState s;
    for (int i = 0; i < 5; ++i) s.fifo.push_back({"u" + std::to_string(i), 1, false}), s.length += 1;
    std::vector<os::QueueUnit> arrive{{"n", 1, 3}};
    auto out = os::step(s, arrive, true, false, 10, 2);
    CHECK(s.length == 4);
    CHECK(out.transmitted == 2);
    CHECK(out.dropped == 0);
    CHECK(out.transmitted_unit_ids == std::vector<std::string>{"u0", "u1"});
    CHECK(s.fifo.front().unit_id == "u2");
    CHECK(s.fifo.back().unit_id == "n");
  }
  SUBCASE("full queue, attacked: a one-unit overflow drops two") {
    os::OnboardQueueState s;
    for (int i = 0; i < 8; ++i) s.fifo.push_back({"u" + std::to_string(i), 1, false}), s.length += 1;
    std::vector<os::QueueUnit> arrive{{"n", 1, 3}};
    auto out = os::step(s, arrive, true, true, 8, 2);
    CHECK(out.transmitted == 0);
    CHECK(out.dropped == 2);
    CHECK(s.length == 7);
    CHECK(out.dropped_unit_ids == std::vector<std::string>{"u0", "u1"});
  }
  SUBCASE("partial units stay at the head") {
    os::OnboardQueueState s;
    s.fifo.push_back({"a", 5, false});
    s.length = 5;
    auto out = os::step(s, none, true, false, 100, 3);
    CHECK(out.transmitted == 3);
    CHECK(out.transmitted_unit_ids.empty());
    CHECK(s.subqueue_bytes("a") == 2);
    out = os::step(s, none, true, false, 100, 3);
    CHECK(out.transmitted == 2);
    CHECK(out.transmitted_unit_ids == std::vector<std::string>{"a"});
  }
  SUBCASE("a partially dropped unit is marked") {
    os::OnboardQueueState s;
    s.fifo.push_back({"a", 3, false});
    s.fifo.push_back({"b", 3, false});
    s.length = 6;
    std::vector<os::QueueUnit> arrive{{"c", 1, 0}};
    auto out = os::step(s, arrive, false, false, 5, 2);
    CHECK(out.dropped == 2);
    CHECK(out.dropped_unit_ids == std::vector<std::string>{"a"});
    CHECK(s.fifo.front().lost_bytes);
    CHECK(s.fifo.front().remaining == 1);
  }
}

TEST_CASE("S0 queue values") {
  auto m = s0_model(10);
  REQUIRE(m.slot_capacity() == 2 * kUnit);
  REQUIRE(m.capacity() == 10 * kUnit);
  auto tau = *m.index_of("init-2");
  auto none = os::target_timing(m, os::AttackSet(m.horizon_slots()), tau);
  CHECK(none.evacuation == 4);
  CHECK(none.last_full == 0);
  CHECK(evac(m, {2}, tau) == 6);
  CHECK(os::attack_strength(m, os::AttackSet(m.horizon_slots()), 2, tau) == 2);
  CHECK(os::attack_strength(m, os::AttackSet(m.horizon_slots()), 6, tau) == 0);
}

TEST_CASE("S0-ovf queue values") {
  auto m = s0_model(8);
  auto tau = *m.index_of("init-2");
  std::vector<Slot> y{4, 6};
  auto trace = os::evolve_fifo(m, os::AttackSet(m.horizon_slots(), y), std::vector<std::size_t>{tau});
  CHECK(trace.targets[0].dropped);
  CHECK(trace.targets[0].drop_slot == 6);
  CHECK(trace.targets[0].evacuation == os::kNeverSlot);
  CHECK(trace.outcomes[5].queue_bytes == 8 * kUnit);
  CHECK(trace.outcomes[6].dropped == 2 * kUnit);
  CHECK(os::attack_strength(m, os::AttackSet(m.horizon_slots(), std::vector<Slot>{4}), 6, tau) == os::kNeverSlot);
}

TEST_CASE("aggregate, FIFO and the independent oracle agree byte for byte") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 400; ++k) {
    QueueCase c = random_case(rng);
    std::vector<Slot> y;
    for (Slot t : c.attackable)
      if (std::bernoulli_distribution(0.5)(rng)) y.push_back(t);
    os::AttackSet ys(c.model.horizon_slots(), y);
    auto units = all_units(c.model);
    auto agg = os::evolve(c.model, ys, units);
    auto fifo = os::evolve_fifo(c.model, ys, units);
    auto oracle = oracle_run(c.model, mask_of(c.model.horizon_slots(), y));
    REQUIRE(agg.outcomes.size() == oracle.slots.size());
    for (std::size_t i = 0; i < oracle.slots.size(); ++i) {
      CHECK(agg.outcomes[i].queue_bytes == oracle.slots[i].queue);
      CHECK(agg.outcomes[i].transmitted == oracle.slots[i].tx);
      CHECK(agg.outcomes[i].dropped == oracle.slots[i].drop);
      CHECK(fifo.outcomes[i].queue_bytes == oracle.slots[i].queue);
    }
    for (std::size_t u = 0; u < units.size(); ++u) {
      CHECK(agg.targets[u].evacuation == oracle.evacuation[u]);
      CHECK(fifo.targets[u].evacuation == oracle.evacuation[u]);
      CHECK(fifo.targets[u].drop_slot == oracle.drop_slot[u]);
      CHECK(agg.targets[u].last_full == fifo.targets[u].last_full);
      CHECK(agg.subqueue_bytes[u] == fifo.subqueue_bytes[u]);
      auto single = os::target_timing(c.model, ys, u);
      CHECK(single.evacuation == agg.targets[u].evacuation);
      CHECK(single.last_full == agg.targets[u].last_full);
    }
  }
}

TEST_CASE("conservation and rounding") {
  std::mt19937_64 rng(37);
  for (int k = 0; k < 300; ++k) {
    QueueCase c = random_case(rng);
    std::vector<Slot> y;
    for (Slot t : c.attackable)
      if (std::bernoulli_distribution(0.5)(rng)) y.push_back(t);
    auto trace = os::evolve(c.model, os::AttackSet(c.model.horizon_slots(), y), {});
    Bytes in = c.model.initial_bytes(), out = 0;
    for (const auto& o : trace.outcomes) {
      in += c.model.arrivals_at(o.slot);
      out += o.delta();
      CHECK(in == out + o.queue_bytes);
      CHECK(o.queue_bytes <= c.model.capacity());
      if (o.dropped > 0) CHECK(o.dropped >= c.model.slot_capacity());
      if (o.transmitted > 0) CHECK(c.model.transmissible(o.slot));
    }
  }
}

TEST_CASE("strength after evacuation is zero") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 200; ++k) {
    QueueCase c = random_case(rng);
    if (c.model.units().empty()) continue;
    std::size_t u = std::uniform_int_distribution<std::size_t>(0, c.model.units().size() - 1)(rng);
    os::AttackSet none(c.model.horizon_slots());
    auto timing = os::target_timing(c.model, none, u);
    for (Slot t : c.attackable)
      if (t > timing.evacuation) CHECK(os::attack_strength(c.model, none, t, u) == 0);
  }
}

TEST_CASE("whole-unit slot volume: one more attack never hastens a unit") {
  std::mt19937_64 rng(43);
  for (int k = 0; k < 400; ++k) {
    QueueCase c = rounding_free_case(rng);
    std::vector<Slot> y;
    for (Slot t : c.attackable)
      if (std::bernoulli_distribution(0.3)(rng)) y.push_back(t);
    os::AttackSet ys(c.model.horizon_slots(), y);
    for (std::size_t u = 0; u < c.model.units().size(); ++u) {
      auto base = os::target_timing(c.model, ys, u);
      for (Slot t : c.attackable) {
        if (ys.contains(t)) continue;
        Slot phi = os::attack_strength(c.model, ys, t, u);
        CHECK(phi >= 0);
        // Attacks at or before the last full slot have no effect.
        if (t <= base.last_full) CHECK(phi == 0);
      }
    }
  }
}

TEST_CASE("rounded drops can let a later unit leave earlier") {
  // One-byte units, two bytes per slot, capacity two. Attacking slot 12 keeps
  // a byte on board; the one-byte overflow at slot 14 is rounded up to two,
  // which clears the head and lets unit 9 leave at slot 16 instead of 17.
  std::vector<os::QueueUnit> units;
  for (Slot arrival : {1, 1, 2, 2, 9, 11, 11, 14, 14, 16, 17, 18})
    units.push_back({"u" + std::to_string(units.size()), 1, arrival});
  std::vector<bool> x(19, false);
  for (Slot t : {3, 4, 5, 6, 7, 9, 12, 16, 17}) x[std::size_t(t)] = true;
  os::QueueModel m(0, 19, 2, 2, units, x);
  auto before = oracle_run(m, mask_of(19, {9}));
  auto after = oracle_run(m, mask_of(19, {9, 12}));
  CHECK(before.evacuation[9] == 17);
  CHECK(after.evacuation[9] == 16);
  CHECK(after.slots[14].drop == 2);
  CHECK(evac(m, {9}, 9) == 17);
  CHECK(evac(m, {9, 12}, 9) == 16);
  CHECK(os::target_timing(m, os::AttackSet(19, std::vector<Slot>{9}), 9).last_full == 15);
  CHECK(os::attack_strength(m, os::AttackSet(19, std::vector<Slot>{9}), 12, 9) == -1);
}

TEST_CASE("trace and event CSVs") {
  auto m = s0_model(10);
  auto tau = *m.index_of("init-2");
  std::vector<std::size_t> targets{tau};
  auto trace = os::evolve_fifo(m, os::AttackSet(m.horizon_slots()), targets);
  auto csv = os::format_queue_trace_csv(m, trace);
  CHECK(csv.rfind("slot,queue_bytes,tx_bytes,drop_bytes,subq_init-2_bytes\n", 0) == 0);
  CHECK(csv.find("\n2,750000000,300000000,0,150000000\n") != std::string::npos);
  CHECK(csv.find("\n4,750000000,300000000,0,0\n") != std::string::npos);
  auto events = os::format_queue_events_csv(trace);
  CHECK(events.rfind("slot,event,unit_id\n2,tx,init-0\n2,tx,init-1\n4,tx,init-2\n", 0) == 0);
}

TEST_CASE("attack sets") {
  os::AttackSet a(10);
  a.add(5);
  a.add(2);
  a.add(5);
  CHECK(a.slots() == std::vector<Slot>{2, 5});
  CHECK(a.contains(2));
  CHECK_FALSE(a.contains(3));
  CHECK_FALSE(a.contains(-1));
  CHECK_FALSE(a.contains(99));
  a.remove(2);
  CHECK(a.size() == 1);
}
