#include "orbitsiege/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "json.hpp"
#include "orbitsiege/errors.hpp"

namespace orbitsiege {
namespace {

using json = nlohmann::json;

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

const json* member(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

const json& require_member(const json& obj, const char* key, const std::string& path) {
  const json* v = member(obj, key);
  if (!v) throw ValidationError(path + "." + key, "required field missing");
  return *v;
}

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ValidationError(path, "expected an object");
}

std::int64_t as_int(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.2e18) return static_cast<std::int64_t>(d);
  }
  throw ValidationError(path, "expected an integer");
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path, "expected a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ValidationError(path, "expected a string");
  return v.get<std::string>();
}

std::int64_t int_or(const json& obj, const char* key, std::int64_t fallback, const std::string& path) {
  const json* v = member(obj, key);
  return v ? as_int(*v, path + "." + key) : fallback;
}

double double_or(const json& obj, const char* key, double fallback, const std::string& path) {
  const json* v = member(obj, key);
  return v ? as_double(*v, path + "." + key) : fallback;
}

std::string string_or(const json& obj, const char* key, std::string fallback, const std::string& path) {
  const json* v = member(obj, key);
  return v ? as_string(*v, path + "." + key) : fallback;
}

std::filesystem::path resolve(const std::filesystem::path& base_dir, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  return path.lexically_normal();
}

TimeGrid parse_time(const json& v) {
  require_object(v, "time");
  TimeGrid grid;
  try {
    grid.epoch = parse_iso8601(as_string(require_member(v, "epoch", "time"), "time.epoch"));
  } catch (const ParseError& e) {
    throw ValidationError("time.epoch", e.what());
  }
  grid.slot_seconds = int_or(v, "slot_seconds", kDefaultSlotSeconds, "time");
  grid.horizon_slots = as_int(require_member(v, "horizon_slots", "time"), "time.horizon_slots");
  return grid;
}

TleElements parse_elements(const json& v, const std::string& path) {
  require_object(v, path);
  TleElements e;
  e.inclination_deg = as_double(require_member(v, "inclination_deg", path), path + ".inclination_deg");
  e.raan_deg = double_or(v, "raan_deg", 0.0, path);
  e.eccentricity = double_or(v, "eccentricity", 0.0, path);
  e.arg_perigee_deg = double_or(v, "arg_perigee_deg", 0.0, path);
  e.mean_anomaly_deg = double_or(v, "mean_anomaly_deg", 0.0, path);
  e.mean_motion_rev_per_day =
      as_double(require_member(v, "mean_motion_rev_per_day", path), path + ".mean_motion_rev_per_day");
  try {
    e.epoch = parse_iso8601(as_string(require_member(v, "epoch", path), path + ".epoch"));
  } catch (const ParseError& err) {
    throw ValidationError(path + ".epoch", err.what());
  }
  e.name = string_or(v, "name", "", path);
  return e;
}

SatelliteSpec parse_satellite(const json& v, const std::string& path) {
  require_object(v, path);
  SatelliteSpec s;
  s.id = as_string(require_member(v, "id", path), path + ".id");
  std::string prio = string_or(v, "priority", "low", path);
  if (prio == "low") s.priority = Priority::Low;
  else if (prio == "high") s.priority = Priority::High;
  else throw ValidationError(path + ".priority", "expected 'low' or 'high'");

  if (const json* tle = member(v, "tle")) {
    std::string l1, l2, name;
    if (tle->is_array() && (tle->size() == 2 || tle->size() == 3)) {
      std::size_t off = tle->size() == 3 ? 1 : 0;
      if (off) name = as_string((*tle)[0], path + ".tle[0]");
      l1 = as_string((*tle)[off], path + ".tle");
      l2 = as_string((*tle)[off + 1], path + ".tle");
    } else if (tle->is_object()) {
      l1 = as_string(require_member(*tle, "line1", path + ".tle"), path + ".tle.line1");
      l2 = as_string(require_member(*tle, "line2", path + ".tle"), path + ".tle.line2");
      name = string_or(*tle, "name", "", path + ".tle");
    } else {
      throw ValidationError(path + ".tle", "expected [line1, line2] or {line1, line2}");
    }
    try {
      s.orbit = parse_tle(l1, l2, name);
    } catch (const ParseError& e) {
      throw ValidationError(path + ".tle", e.what());
    }
  } else if (const json* el = member(v, "elements")) {
    s.orbit = parse_elements(*el, path + ".elements");
  }
  Bytes default_capacity = s.priority == Priority::Low ? kDefaultCapacityBytes : 0;
  s.capacity_bytes = int_or(v, "capacity_bytes", default_capacity, path);
  s.downlink_rate_bps = int_or(v, "downlink_rate_bps", kDefaultDownlinkRateBps, path);
  return s;
}

GroundStationSpec parse_station(const json& v, const std::string& path) {
  require_object(v, path);
  GroundStationSpec g;
  g.id = as_string(require_member(v, "id", path), path + ".id");
  g.latitude_deg = as_double(require_member(v, "latitude_deg", path), path + ".latitude_deg");
  g.longitude_deg = as_double(require_member(v, "longitude_deg", path), path + ".longitude_deg");
  g.altitude_m = double_or(v, "altitude_m", 0.0, path);
  g.antenna_count = static_cast<int>(int_or(v, "antenna_count", kDefaultAntennaCount, path));
  g.min_elevation_deg = double_or(v, "min_elevation_deg", kDefaultMinElevationDeg, path);
  return g;
}

void add_unit(CaptureTrace& trace, const std::string& sat, DataUnit unit) {
  trace.units[sat].push_back(std::move(unit));
}

void parse_trace(const json& v, const TimeGrid& grid, const std::filesystem::path& base_dir,
                 CaptureTrace& trace) {
  require_object(v, "trace");
  if (const json* units = member(v, "units")) {
    if (!units->is_array()) throw ValidationError("trace.units", "expected an array");
    for (std::size_t i = 0; i < units->size(); ++i) {
      const json& u = (*units)[i];
      std::string path = index_path("trace.units", i);
      require_object(u, path);
      DataUnit d;
      d.unit_id = as_string(require_member(u, "unit_id", path), path + ".unit_id");
      std::string sat = as_string(require_member(u, "satellite_id", path), path + ".satellite_id");
      if (const json* slot = member(u, "capture_slot")) {
        d.capture_slot = as_int(*slot, path + ".capture_slot");
      } else {
        const json& iso = require_member(u, "capture_iso8601", path);
        try {
          d.capture_slot = grid.slot_of(parse_iso8601(as_string(iso, path + ".capture_iso8601")));
        } catch (const std::exception& e) {
          throw ValidationError(path + ".capture_iso8601", e.what());
        }
      }
      d.size_bytes = int_or(u, "size_bytes", kDefaultImageBytes, path);
      add_unit(trace, sat, std::move(d));
    }
  }
  if (const json* csv = member(v, "csv")) {
    auto file = resolve(base_dir, as_string(*csv, "trace.csv"));
    CaptureTrace extra = parse_trace_csv(read_file(file), grid);
    for (auto& [sat, units] : extra.units)
      for (auto& u : units) add_unit(trace, sat, std::move(u));
  }
  if (const json* periodic = member(v, "periodic")) {
    if (!periodic->is_array()) throw ValidationError("trace.periodic", "expected an array");
    for (std::size_t i = 0; i < periodic->size(); ++i) {
      const json& p = (*periodic)[i];
      std::string path = index_path("trace.periodic", i);
      require_object(p, path);
      std::string sat = as_string(require_member(p, "satellite_id", path), path + ".satellite_id");
      Slot start = int_or(p, "start_slot", 0, path);
      Slot end = int_or(p, "end_slot", grid.last_slot(), path);
      Slot every = int_or(p, "every_slots", 1, path);
      std::int64_t per = int_or(p, "units_per_capture", 1, path);
      Bytes size = int_or(p, "size_bytes", kDefaultImageBytes, path);
      std::string prefix = string_or(p, "id_prefix", sat, path);
      if (every <= 0) throw ValidationError(path + ".every_slots", "must be positive");
      if (per <= 0) throw ValidationError(path + ".units_per_capture", "must be positive");
      if (start < 0 || end > grid.last_slot() || start > end)
        throw ValidationError(path, "slot range outside the time grid");
      for (Slot t = start; t <= end; t += every)
        for (std::int64_t k = 0; k < per; ++k)
          add_unit(trace, sat, {prefix + "-" + std::to_string(t) + "-" + std::to_string(k), t, size});
    }
  }
  for (auto& [sat, units] : trace.units)
    std::stable_sort(units.begin(), units.end(),
                     [](const DataUnit& a, const DataUnit& b) { return a.capture_slot < b.capture_slot; });
}

TargetSpec parse_target(const json& v) {
  require_object(v, "target");
  TargetSpec t;
  t.satellite_id = as_string(require_member(v, "satellite_id", "target"), "target.satellite_id");
  const json& ids = require_member(v, "unit_ids", "target");
  if (!ids.is_array()) throw ValidationError("target.unit_ids", "expected an array");
  for (std::size_t i = 0; i < ids.size(); ++i)
    t.unit_ids.push_back(as_string(ids[i], index_path("target.unit_ids", i)));
  t.attack_start_slot = int_or(v, "attack_start_slot", 0, "target");
  if (const json* s = member(v, "target_downlink_slot"))
    t.target_downlink_slot = as_int(*s, "target.target_downlink_slot");
  if (const json* b = member(v, "cost_budget")) t.cost_budget = as_double(*b, "target.cost_budget");
  if (const json* q = member(v, "initial_queue")) {
    require_object(*q, "target.initial_queue");
    t.initial_queue.units = static_cast<int>(int_or(*q, "units", kDefaultInitialQueueUnits, "target.initial_queue"));
    t.initial_queue.unit_bytes = int_or(*q, "unit_bytes", kDefaultImageBytes, "target.initial_queue");
    t.initial_queue.id_prefix = string_or(*q, "id_prefix", "init-", "target.initial_queue");
    if (const json* sizes = member(*q, "unit_sizes")) {
      if (!sizes->is_array()) throw ValidationError("target.initial_queue.unit_sizes", "expected an array");
      for (std::size_t i = 0; i < sizes->size(); ++i)
        t.initial_queue.unit_sizes.push_back(as_int((*sizes)[i], index_path("target.initial_queue.unit_sizes", i)));
    }
  }
  return t;
}

json elements_json(const TleElements& e) {
  json j = {{"inclination_deg", e.inclination_deg},
            {"raan_deg", e.raan_deg},
            {"eccentricity", e.eccentricity},
            {"arg_perigee_deg", e.arg_perigee_deg},
            {"mean_anomaly_deg", e.mean_anomaly_deg},
            {"mean_motion_rev_per_day", e.mean_motion_rev_per_day},
            {"epoch", format_iso8601(e.epoch)}};
  if (!e.name.empty()) j["name"] = e.name;
  return j;
}

}  // namespace

std::string_view to_string(Priority p) { return p == Priority::Low ? "low" : "high"; }

Bytes InitialQueue::total_bytes() const {
  if (unit_sizes.empty()) return static_cast<Bytes>(units) * unit_bytes;
  Bytes sum = 0;
  for (Bytes b : unit_sizes) sum += b;
  return sum;
}

std::span<const DataUnit> CaptureTrace::of(const std::string& satellite_id) const {
  auto it = units.find(satellite_id);
  if (it == units.end()) return {};
  return it->second;
}

Bytes CaptureTrace::input_at(const std::string& satellite_id, Slot t) const {
  Bytes sum = 0;
  for (const DataUnit& u : of(satellite_id))
    if (u.capture_slot == t) sum += u.size_bytes;
  return sum;
}

std::vector<Bytes> CaptureTrace::inputs(const std::string& satellite_id, Slot horizon_slots) const {
  std::vector<Bytes> out(static_cast<std::size_t>(horizon_slots), 0);
  for (const DataUnit& u : of(satellite_id))
    if (u.capture_slot >= 0 && u.capture_slot < horizon_slots) out[static_cast<std::size_t>(u.capture_slot)] += u.size_bytes;
  return out;
}

const SatelliteSpec* ConstellationScenario::find_satellite(std::string_view id) const {
  for (const auto& s : satellites)
    if (s.id == id) return &s;
  return nullptr;
}

const GroundStationSpec* ConstellationScenario::find_station(std::string_view id) const {
  for (const auto& g : stations)
    if (g.id == id) return &g;
  return nullptr;
}

const TargetSpec& ConstellationScenario::require_target() const {
  if (!target) throw ValidationError("target", "scenario has no target section");
  return *target;
}

std::vector<const SatelliteSpec*> ConstellationScenario::low_priority() const {
  std::vector<const SatelliteSpec*> out;
  for (const auto& s : satellites)
    if (s.priority == Priority::Low) out.push_back(&s);
  return out;
}

std::vector<const SatelliteSpec*> ConstellationScenario::high_priority() const {
  std::vector<const SatelliteSpec*> out;
  for (const auto& s : satellites)
    if (s.priority == Priority::High) out.push_back(&s);
  return out;
}

std::vector<std::string> fifo_order(const ConstellationScenario& scenario,
                                    const std::string& satellite_id) {
  Slot start = scenario.target ? scenario.target->attack_start_slot : 0;
  InitialQueue initial = scenario.target ? scenario.target->initial_queue : InitialQueue{};
  std::vector<std::string> out;
  for (int i = 0; i < initial.units; ++i) out.push_back(initial.unit_id(i));
  for (const DataUnit& u : scenario.trace.of(satellite_id))
    if (u.capture_slot >= start) out.push_back(u.unit_id);
  return out;
}

void validate(const ConstellationScenario& sc) {
  if (sc.time.slot_seconds <= 0) throw ValidationError("time.slot_seconds", "must be positive");
  if (sc.time.horizon_slots < 1) throw ValidationError("time.horizon_slots", "must be at least 1");

  std::set<std::string> sat_ids;
  for (std::size_t i = 0; i < sc.satellites.size(); ++i) {
    const auto& s = sc.satellites[i];
    std::string path = index_path("satellites", i);
    if (s.id.empty()) throw ValidationError(path + ".id", "must not be empty");
    if (!sat_ids.insert(s.id).second) throw ValidationError(path + ".id", "duplicate satellite id '" + s.id + "'");
    if (s.priority == Priority::Low && s.capacity_bytes <= 0)
      throw ValidationError(path + ".capacity_bytes", "low-priority satellites need a positive capacity");
    if (s.capacity_bytes < 0) throw ValidationError(path + ".capacity_bytes", "must not be negative");
    if (s.downlink_rate_bps <= 0) throw ValidationError(path + ".downlink_rate_bps", "must be positive");
    if (s.orbit) {
      try {
        validate_elements(*s.orbit);
      } catch (const ValidationError& e) {
        throw ValidationError(path + "." + e.field(), e.what());
      }
    } else if (!sc.windows_file) {
      throw ValidationError(path + ".tle", "orbit required unless a contact-window file is given");
    }
  }

  std::set<std::string> station_ids;
  for (std::size_t i = 0; i < sc.stations.size(); ++i) {
    const auto& g = sc.stations[i];
    std::string path = index_path("stations", i);
    if (g.id.empty()) throw ValidationError(path + ".id", "must not be empty");
    if (!station_ids.insert(g.id).second) throw ValidationError(path + ".id", "duplicate station id '" + g.id + "'");
    if (g.antenna_count < 1) throw ValidationError(path + ".antenna_count", "must be at least 1");
    if (!(g.latitude_deg >= -90.0 && g.latitude_deg <= 90.0))
      throw ValidationError(path + ".latitude_deg", "must be within [-90, 90]");
    if (!(g.longitude_deg >= -180.0 && g.longitude_deg <= 360.0))
      throw ValidationError(path + ".longitude_deg", "must be within [-180, 360]");
    if (!(g.min_elevation_deg >= 0.0 && g.min_elevation_deg < 90.0))
      throw ValidationError(path + ".min_elevation_deg", "must be within [0, 90)");
  }

  for (const auto& [sat, units] : sc.trace.units) {
    std::string path = "trace[" + sat + "]";
    const SatelliteSpec* spec = sc.find_satellite(sat);
    if (!spec) throw ValidationError(path, "unknown satellite '" + sat + "'");
    if (spec->priority != Priority::Low)
      throw ValidationError(path, "captures are tracked for low-priority satellites only");
    std::set<std::string> ids;
    Slot prev = -1;
    for (const DataUnit& u : units) {
      if (!ids.insert(u.unit_id).second) throw ValidationError(path, "duplicate unit id '" + u.unit_id + "'");
      if (u.capture_slot < 0 || u.capture_slot > sc.time.last_slot())
        throw ValidationError(path + "." + u.unit_id, "capture slot outside the time grid");
      if (u.size_bytes <= 0) throw ValidationError(path + "." + u.unit_id, "size_bytes must be positive");
      if (u.capture_slot < prev) throw ValidationError(path, "units not in capture order");
      prev = u.capture_slot;
    }
  }

  if (!std::isfinite(sc.costs.unit_task_price) || sc.costs.unit_task_price < 0.0)
    throw ValidationError("costs.unit_task_price", "must be a non-negative number");

  if (!sc.target) return;
  const TargetSpec& t = *sc.target;
  const SatelliteSpec* s = sc.find_satellite(t.satellite_id);
  if (!s) throw ValidationError("target.satellite_id", "unknown satellite '" + t.satellite_id + "'");
  if (s->priority != Priority::Low) throw ValidationError("target.satellite_id", "target must be low-priority");
  if (t.attack_start_slot < 0 || t.attack_start_slot > sc.time.last_slot())
    throw ValidationError("target.attack_start_slot", "outside the time grid");
  if (t.target_downlink_slot && (*t.target_downlink_slot < 0 || *t.target_downlink_slot > sc.time.last_slot()))
    throw ValidationError("target.target_downlink_slot", "outside the time grid");
  if (t.cost_budget && !(*t.cost_budget >= 0.0)) throw ValidationError("target.cost_budget", "must be non-negative");
  const InitialQueue& q = t.initial_queue;
  if (q.units < 0) throw ValidationError("target.initial_queue.units", "must not be negative");
  if (q.unit_bytes <= 0) throw ValidationError("target.initial_queue.unit_bytes", "must be positive");
  if (!q.unit_sizes.empty()) {
    if (q.unit_sizes.size() != static_cast<std::size_t>(q.units))
      throw ValidationError("target.initial_queue.unit_sizes", "needs one size per unit");
    for (Bytes b : q.unit_sizes)
      if (b <= 0) throw ValidationError("target.initial_queue.unit_sizes", "sizes must be positive");
  }
  if (t.unit_ids.empty()) throw ValidationError("target.unit_ids", "must not be empty");
  auto fifo = fifo_order(sc, t.satellite_id);
  std::ptrdiff_t prev = -1;
  for (std::size_t i = 0; i < t.unit_ids.size(); ++i) {
    auto it = std::find(fifo.begin(), fifo.end(), t.unit_ids[i]);
    if (it == fifo.end())
      throw ValidationError(index_path("target.unit_ids", i),
                            "unit '" + t.unit_ids[i] + "' is not queued on " + t.satellite_id +
                                " at or after the attack start");
    std::ptrdiff_t pos = it - fifo.begin();
    if (pos <= prev) throw ValidationError("target.unit_ids", "targets must be listed in capture order");
    prev = pos;
  }
}

ConstellationScenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("scenario must be a JSON object");

  ConstellationScenario sc;
  sc.time = parse_time(require_member(root, "time", "scenario"));
  const json& sats = require_member(root, "satellites", "scenario");
  if (!sats.is_array()) throw ValidationError("satellites", "expected an array");
  if (const json* w = member(root, "windows")) sc.windows_file = resolve(base_dir, as_string(*w, "windows"));
  for (std::size_t i = 0; i < sats.size(); ++i) sc.satellites.push_back(parse_satellite(sats[i], index_path("satellites", i)));
  if (const json* stations = member(root, "stations")) {
    if (!stations->is_array()) throw ValidationError("stations", "expected an array");
    for (std::size_t i = 0; i < stations->size(); ++i)
      sc.stations.push_back(parse_station((*stations)[i], index_path("stations", i)));
  }
  if (sc.time.slot_seconds <= 0) throw ValidationError("time.slot_seconds", "must be positive");
  if (const json* trace = member(root, "trace")) parse_trace(*trace, sc.time, base_dir, sc.trace);
  if (const json* target = member(root, "target")) sc.target = parse_target(*target);
  if (const json* costs = member(root, "costs")) {
    require_object(*costs, "costs");
    sc.costs.unit_task_price = double_or(*costs, "unit_task_price", 1.0, "costs");
  }
  if (const json* seed = member(root, "seed")) {
    std::int64_t s = as_int(*seed, "seed");
    if (s < 0) throw ValidationError("seed", "must not be negative");
    sc.seed = static_cast<std::uint64_t>(s);
  }
  validate(sc);
  return sc;
}

ConstellationScenario load_scenario(const std::filesystem::path& path) {
  std::string text = read_file(path);
  return parse_scenario(text, std::filesystem::absolute(path).parent_path());
}

std::string serialize_scenario(const ConstellationScenario& sc) {
  json root;
  root["time"] = {{"epoch", format_iso8601(sc.time.epoch)},
                  {"slot_seconds", sc.time.slot_seconds},
                  {"horizon_slots", sc.time.horizon_slots}};
  json sats = json::array();
  for (const auto& s : sc.satellites) {
    json j = {{"id", s.id},
              {"priority", std::string(to_string(s.priority))},
              {"capacity_bytes", s.capacity_bytes},
              {"downlink_rate_bps", s.downlink_rate_bps}};
    if (s.orbit) j["elements"] = elements_json(*s.orbit);
    sats.push_back(std::move(j));
  }
  root["satellites"] = std::move(sats);
  json stations = json::array();
  for (const auto& g : sc.stations)
    stations.push_back({{"id", g.id},
                        {"latitude_deg", g.latitude_deg},
                        {"longitude_deg", g.longitude_deg},
                        {"altitude_m", g.altitude_m},
                        {"antenna_count", g.antenna_count},
                        {"min_elevation_deg", g.min_elevation_deg}});
  root["stations"] = std::move(stations);
  if (sc.windows_file) root["windows"] = sc.windows_file->string();
  json units = json::array();
  for (const auto& [sat, list] : sc.trace.units)
    for (const auto& u : list)
      units.push_back({{"unit_id", u.unit_id},
                       {"satellite_id", sat},
                       {"capture_slot", u.capture_slot},
                       {"size_bytes", u.size_bytes}});
  root["trace"] = {{"units", std::move(units)}};
  if (sc.target) {
    const TargetSpec& t = *sc.target;
    json jt = {{"satellite_id", t.satellite_id},
               {"unit_ids", t.unit_ids},
               {"attack_start_slot", t.attack_start_slot}};
    if (t.target_downlink_slot) jt["target_downlink_slot"] = *t.target_downlink_slot;
    if (t.cost_budget) jt["cost_budget"] = *t.cost_budget;
    json q = {{"units", t.initial_queue.units},
              {"unit_bytes", t.initial_queue.unit_bytes},
              {"id_prefix", t.initial_queue.id_prefix}};
    if (!t.initial_queue.unit_sizes.empty()) q["unit_sizes"] = t.initial_queue.unit_sizes;
    jt["initial_queue"] = std::move(q);
    root["target"] = std::move(jt);
  }
  root["costs"] = {{"unit_task_price", sc.costs.unit_task_price}};
  root["seed"] = sc.seed;
  return root.dump(2) + "\n";
}

CaptureTrace parse_trace_csv(std::string_view text, const TimeGrid& grid) {
  CaptureTrace trace;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("trace CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "unit_id,satellite_id,capture_iso8601,size_bytes")
    throw ParseError("trace CSV: unexpected header '" + line + "'");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) throw ParseError("trace CSV line " + std::to_string(line_no) + ": expected 4 columns");
    DataUnit u;
    u.unit_id = cells[0];
    try {
      u.capture_slot = grid.slot_of(parse_iso8601(cells[2]));
      std::size_t used = 0;
      u.size_bytes = std::stoll(cells[3], &used);
      if (used != cells[3].size()) throw ParseError("bad size");
    } catch (const OutOfHorizon& e) {
      throw ValidationError("trace.csv line " + std::to_string(line_no), e.what());
    } catch (const std::exception& e) {
      throw ParseError("trace CSV line " + std::to_string(line_no) + ": " + e.what());
    }
    trace.units[cells[1]].push_back(std::move(u));
  }
  for (auto& [sat, units] : trace.units)
    std::stable_sort(units.begin(), units.end(),
                     [](const DataUnit& a, const DataUnit& b) { return a.capture_slot < b.capture_slot; });
  return trace;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("error writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into '" + path.string() + "'");
  }
}

}  // namespace orbitsiege
