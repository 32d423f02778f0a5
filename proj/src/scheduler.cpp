#include "orbitsiege/scheduler.hpp"

#include <algorithm>
#include <set>

#include "orbitsiege/emit.hpp"
#include "orbitsiege/hungarian.hpp"
#include "orbitsiege/tle.hpp"

namespace orbitsiege {
namespace {

constexpr double kDefaultAltitudeM = 550'000.0;

double orbital_radius(const SatelliteSpec& s) {
  return s.orbit ? semi_major_axis_m(*s.orbit) : kEarthRadiusM + kDefaultAltitudeM;
}

// Kuhn's augmenting paths; `adj[i]` lists the seats satellite i may fill.
bool try_seat(std::size_t i, const std::vector<std::vector<std::size_t>>& adj, std::vector<bool>& seen,
              std::vector<std::ptrdiff_t>& owner) {
  for (std::size_t seat : adj[i]) {
    if (seen[seat]) continue;
    seen[seat] = true;
    if (owner[seat] < 0 || try_seat(static_cast<std::size_t>(owner[seat]), adj, seen, owner)) {
      owner[seat] = static_cast<std::ptrdiff_t>(i);
      return true;
    }
  }
  return false;
}

std::size_t max_matching(const std::vector<std::vector<std::size_t>>& adj, std::size_t seats) {
  std::vector<std::ptrdiff_t> owner(seats, -1);
  std::size_t matched = 0;
  for (std::size_t i = 0; i < adj.size(); ++i) {
    std::vector<bool> seen(seats, false);
    if (try_seat(i, adj, seen, owner)) ++matched;
  }
  return matched;
}

}  // namespace

const AntennaAssignment* SlotSchedule::find(std::string_view satellite_id) const {
  for (const auto& a : assignments)
    if (a.satellite_id == satellite_id) return &a;
  return nullptr;
}

ContactIndex::ContactIndex(std::span<const ContactWindow> windows, Slot horizon_slots) {
  const auto horizon = static_cast<std::size_t>(std::max<Slot>(horizon_slots, 0));
  for (const auto& w : windows)
    if (w.slot >= 0 && static_cast<std::size_t>(w.slot) < horizon) windows_.push_back(w);
  std::stable_sort(windows_.begin(), windows_.end(),
                   [](const ContactWindow& a, const ContactWindow& b) { return a.slot < b.slot; });
  offsets_.assign(horizon + 1, 0);
  for (const auto& w : windows_) ++offsets_[static_cast<std::size_t>(w.slot) + 1];
  for (std::size_t t = 0; t < horizon; ++t) offsets_[t + 1] += offsets_[t];
}

std::span<const ContactWindow> ContactIndex::at(Slot t) const {
  if (t < 0 || t >= horizon_slots()) return {};
  auto i = static_cast<std::size_t>(t);
  return std::span<const ContactWindow>(windows_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

SlotSchedule assign_slot(const ConstellationScenario& sc, Slot t, std::span<const ContactWindow> windows) {
  SlotSchedule out;
  out.slot = t;

  std::vector<std::string> sats;
  std::set<std::string> seen_stations;
  for (const auto& w : windows) {
    seen_stations.insert(w.station_id);
    const SatelliteSpec* s = sc.find_satellite(w.satellite_id);
    if (s && s->priority == Priority::Low) sats.push_back(w.satellite_id);
  }
  std::sort(sats.begin(), sats.end());
  sats.erase(std::unique(sats.begin(), sats.end()), sats.end());

  // Columns: every antenna of every station a low-priority satellite sees,
  // stations in scenario order.
  struct Column {
    const GroundStationSpec* station;
    int antenna;
  };
  std::vector<Column> columns;
  for (const auto& g : sc.stations) {
    bool used = std::any_of(windows.begin(), windows.end(), [&](const ContactWindow& w) {
      return w.station_id == g.id && std::binary_search(sats.begin(), sats.end(), w.satellite_id);
    });
    if (used)
      for (int k = 0; k < g.antenna_count; ++k) columns.push_back({&g, k});
  }

  CostMatrix cost(sats.size(), columns.size(), kForbidden);
  for (const auto& w : windows) {
    auto it = std::lower_bound(sats.begin(), sats.end(), w.satellite_id);
    if (it == sats.end() || *it != w.satellite_id) continue;
    std::size_t r = static_cast<std::size_t>(it - sats.begin());
    const SatelliteSpec* s = sc.find_satellite(w.satellite_id);
    const GroundStationSpec* g = sc.find_station(w.station_id);
    double range = slant_range_from_elevation(w.elevation_deg, orbital_radius(*s), g->altitude_m);
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (columns[c].station == g) cost(r, c) = range;
  }

  std::map<std::string, int> busy;
  if (!sats.empty() && !columns.empty()) {
    Assignment a = hungarian_partial(cost);
    for (const auto& [r, c] : a.pairs) {
      out.assignments.push_back({sats[r], columns[c].station->id, columns[c].antenna, cost(r, c)});
      ++busy[columns[c].station->id];
    }
  }
  for (const auto& id : seen_stations) {
    const GroundStationSpec* g = sc.find_station(id);
    if (g) out.idle_antennas[id] = g->antenna_count - busy[id];
  }
  return out;
}

std::vector<SlotSchedule> build_schedules_serial(const ConstellationScenario& sc, const ContactIndex& contacts) {
  std::vector<SlotSchedule> out;
  for (Slot t = 0; t < contacts.horizon_slots(); ++t) out.push_back(assign_slot(sc, t, contacts.at(t)));
  return out;
}

std::vector<SlotSchedule> build_schedules(const ConstellationScenario& sc, const ContactIndex& contacts) {
  const auto horizon = static_cast<std::size_t>(contacts.horizon_slots());
  std::vector<SlotSchedule> out(horizon);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t t = 0; t < horizon; ++t) {
    auto slot = static_cast<Slot>(t);
    out[t] = assign_slot(sc, slot, contacts.at(slot));
  }
  return out;
}

std::vector<AttackabilityRecord> attackability(const ConstellationScenario& sc,
                                               std::span<const SlotSchedule> schedules,
                                               const ContactIndex& contacts, const std::string& satellite_id) {
  std::vector<AttackabilityRecord> out;
  out.reserve(schedules.size());
  for (const SlotSchedule& sched : schedules) {
    AttackabilityRecord rec;
    rec.slot = sched.slot;
    const AntennaAssignment* own = sched.find(satellite_id);
    if (own) {
      rec.transmissible = true;
      auto windows = contacts.at(sched.slot);
      // Seats the attacker has to fill: each idle antenna on a station the
      // target sees, then the target's own antenna.
      std::vector<std::string> seat_station;
      for (const auto& w : windows) {
        if (w.satellite_id != satellite_id) continue;
        auto idle = sched.idle_antennas.find(w.station_id);
        int n = idle == sched.idle_antennas.end() ? 0 : idle->second;
        for (int k = 0; k < n; ++k) seat_station.push_back(w.station_id);
      }
      seat_station.push_back(own->station_id);
      rec.required_high_priority = static_cast<int>(seat_station.size());

      std::map<std::string, std::vector<std::size_t>> adj_by_sat;
      for (const auto& w : windows) {
        const SatelliteSpec* s = sc.find_satellite(w.satellite_id);
        if (!s || s->priority != Priority::High) continue;
        auto& adj = adj_by_sat[w.satellite_id];
        for (std::size_t seat = 0; seat < seat_station.size(); ++seat)
          if (seat_station[seat] == w.station_id) adj.push_back(seat);
      }
      std::vector<std::vector<std::size_t>> adj;
      for (auto& [id, seats] : adj_by_sat)
        if (!seats.empty()) adj.push_back(std::move(seats));
      if (adj.size() >= seat_station.size() && max_matching(adj, seat_station.size()) == seat_station.size()) {
        rec.attackable = true;
        rec.cost = sc.costs.unit_task_price * rec.required_high_priority;
      }
    }
    out.push_back(rec);
  }
  return out;
}

std::vector<Slot> AttackSurface::attackable_slots() const {
  std::vector<Slot> out;
  for (std::size_t t = 0; t < attackable.size(); ++t)
    if (attackable[t]) out.push_back(static_cast<Slot>(t));
  return out;
}

AttackSurface AttackSurface::from_records(std::span<const AttackabilityRecord> records) {
  AttackSurface s;
  for (const auto& r : records) {
    s.transmissible.push_back(r.transmissible);
    s.attackable.push_back(r.attackable);
    s.cost.push_back(r.cost);
  }
  return s;
}

std::string format_attackability_csv(std::span<const AttackabilityRecord> records) {
  std::string out = "slot,transmissible,attackable,required_high,cost\n";
  for (const auto& r : records)
    out += format_int(r.slot) + "," + (r.transmissible ? "1" : "0") + "," + (r.attackable ? "1" : "0") + "," +
           std::to_string(r.required_high_priority) + "," + format_cost(r.cost) + "\n";
  return out;
}

WorldView build_world(const ConstellationScenario& sc, std::vector<ContactWindow> windows) {
  ContactIndex contacts(windows, sc.time.horizon_slots);
  auto schedules = build_schedules(sc, contacts);
  return WorldView{std::move(windows), std::move(schedules), std::move(contacts)};
}

}  // namespace orbitsiege
