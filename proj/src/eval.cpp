#include "orbitsiege/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "orbitsiege/emit.hpp"
#include "orbitsiege/errors.hpp"

namespace orbitsiege {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

std::optional<std::vector<std::size_t>> indices_in(const QueueModel& model, std::span<const std::string> ids) {
  std::vector<std::size_t> out;
  for (const auto& id : ids) {
    auto i = model.index_of(id);
    if (!i) return std::nullopt;
    out.push_back(*i);
  }
  return out;
}

struct TrialTarget {
  std::string satellite_id;
  std::vector<std::string> theta;
  Slot start = 0;
  InitialQueue initial;
  // Taken from the scenario target when it is used as is.
  std::optional<Slot> target_slot;
  std::optional<double> budget;
};

std::optional<TrialTarget> pick_target(const ConstellationScenario& sc, const TrialSettings& settings,
                                       std::mt19937_64& rng, std::string& note) {
  TrialTarget out;
  if (sc.target) {
    out.start = sc.target->attack_start_slot;
    out.initial = sc.target->initial_queue;
  }
  if (!settings.randomize_target) {
    if (!sc.target) {
      note = "scenario has no target";
      return std::nullopt;
    }
    out.satellite_id = sc.target->satellite_id;
    out.theta = sc.target->unit_ids;
    out.target_slot = sc.target->target_downlink_slot;
    out.budget = sc.target->cost_budget;
    return out;
  }
  auto lows = sc.low_priority();
  if (lows.empty()) {
    note = "no low-priority satellite";
    return std::nullopt;
  }
  std::uniform_int_distribution<std::size_t> pick_sat(0, lows.size() - 1);
  out.satellite_id = lows[pick_sat(rng)]->id;
  Slot window = settings.target_window_slots.value_or((sc.time.horizon_slots - out.start) / 3);
  std::vector<const DataUnit*> candidates;
  for (const DataUnit& u : sc.trace.of(out.satellite_id))
    if (u.capture_slot >= out.start && u.capture_slot < out.start + window) candidates.push_back(&u);
  const auto n = static_cast<std::size_t>(std::max(settings.target_units, 1));
  // Draw even when too few candidates so the random stream stays aligned.
  std::uniform_int_distribution<std::size_t> pick_first(0, candidates.size() >= n ? candidates.size() - n : 0);
  std::size_t first = pick_first(rng);
  if (candidates.size() < n) {
    note = "fewer than " + std::to_string(n) + " captures in the target window";
    return std::nullopt;
  }
  for (std::size_t k = 0; k < n; ++k) out.theta.push_back(candidates[first + k]->unit_id);
  return out;
}

bool goal_met(AttackKind kind, const QueueModel& model, const AttackSet& y, std::span<const std::size_t> theta,
              Slot target_slot) {
  if (kind == AttackKind::Delay) return verify_delay(model, y, theta, target_slot).success;
  return verify_overflow(model, y, theta).success;
}

}  // namespace

void NoiseModel::validate() const {
  if (!(size_std_ratio >= 0.0 && size_std_ratio <= 1.0))
    throw ValidationError("noise.size_std_ratio", "must be within [0, 1]");
  if (!(rate_std_ratio >= 0.0 && rate_std_ratio <= 1.0))
    throw ValidationError("noise.rate_std_ratio", "must be within [0, 1]");
  if (initial_queue_jitter_units < 0) throw ValidationError("noise.initial_queue_jitter_units", "must not be negative");
}

std::int64_t sample_positive(std::int64_t nominal, double std_ratio, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  double draw = static_cast<double>(nominal) * (1.0 + std_ratio * z(rng));
  double floor = 0.1 * static_cast<double>(nominal);
  return std::max<std::int64_t>(std::llround(std::max(draw, floor)), 1);
}

ConstellationScenario perturb(const ConstellationScenario& nominal, const NoiseModel& noise, std::mt19937_64& rng) {
  noise.validate();
  ConstellationScenario out = nominal;
  for (auto& s : out.satellites)
    if (s.priority == Priority::Low) s.downlink_rate_bps = sample_positive(s.downlink_rate_bps, noise.rate_std_ratio, rng);
  for (auto& [sat, units] : out.trace.units)
    for (auto& u : units) u.size_bytes = sample_positive(u.size_bytes, noise.size_std_ratio, rng);
  if (out.target) {
    InitialQueue& q = out.target->initial_queue;
    std::uniform_int_distribution<int> jitter(-noise.initial_queue_jitter_units, noise.initial_queue_jitter_units);
    int count = std::max(0, q.units + jitter(rng));
    std::vector<Bytes> sizes;
    bool uniform = true;
    for (int i = 0; i < count; ++i) {
      Bytes base = i < q.units ? q.size_of(i) : q.unit_bytes;
      sizes.push_back(sample_positive(base, noise.size_std_ratio, rng));
      uniform = uniform && sizes.back() == q.unit_bytes;
    }
    q.units = count;
    q.unit_sizes = uniform ? std::vector<Bytes>{} : std::move(sizes);
  }
  return out;
}

std::vector<std::string> extend_targets(std::span<const std::string> theta, std::span<const std::string> fifo,
                                        int extra_m) {
  if (theta.empty() || extra_m <= 0) return {theta.begin(), theta.end()};
  auto first = std::find(fifo.begin(), fifo.end(), theta.front());
  auto last = std::find(fifo.begin(), fifo.end(), theta.back());
  if (first == fifo.end() || last == fifo.end()) return {theta.begin(), theta.end()};
  std::vector<std::string> out;
  auto lo = first - std::min<std::ptrdiff_t>(extra_m, first - fifo.begin());
  out.insert(out.end(), lo, first);
  out.insert(out.end(), theta.begin(), theta.end());
  auto hi = last + 1 + std::min<std::ptrdiff_t>(extra_m, fifo.end() - (last + 1));
  out.insert(out.end(), last + 1, hi);
  return out;
}

std::string_view to_string(AttackKind kind) { return kind == AttackKind::Delay ? "delay" : "overflow"; }

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::ImageSize: return "image_size";
    case SweepAxis::DataRate: return "data_rate";
    case SweepAxis::NHigh: return "n_high";
    case SweepAxis::Budget: return "budget";
    case SweepAxis::TargetDuration: return "target_duration";
    case SweepAxis::NoiseRatio: return "noise_ratio";
    case SweepAxis::ExtraM: return "extra_M";
    case SweepAxis::Base: return "base";
  }
  return "base";
}

AttackKind parse_attack_kind(std::string_view text) {
  if (text == "delay") return AttackKind::Delay;
  if (text == "overflow") return AttackKind::Overflow;
  throw ValidationError("kind", "expected 'delay' or 'overflow', got '" + std::string(text) + "'");
}

SweepAxis parse_sweep_axis(std::string_view text) {
  for (SweepAxis a : {SweepAxis::ImageSize, SweepAxis::DataRate, SweepAxis::NHigh, SweepAxis::Budget,
                      SweepAxis::TargetDuration, SweepAxis::NoiseRatio, SweepAxis::ExtraM, SweepAxis::Base})
    if (text == to_string(a)) return a;
  if (text == "extra_m") return SweepAxis::ExtraM;
  throw ValidationError("axis", "unknown sweep axis '" + std::string(text) + "'");
}

void validate_axis_value(SweepAxis axis, double v) {
  auto bad = [&](const std::string& why) {
    return ValidationError("values", std::string(to_string(axis)) + " value " + format_sig6(v) + " " + why);
  };
  if (!std::isfinite(v)) throw bad("is not finite");
  switch (axis) {
    case SweepAxis::ImageSize:
    case SweepAxis::DataRate:
      if (v <= 0.0 || v > 1e6) throw bad("must be within (0, 1e6]");
      break;
    case SweepAxis::NHigh:
      if (!is_integer(v) || v < 0.0) throw bad("must be a non-negative integer");
      break;
    case SweepAxis::Budget:
      if (v < 0.0) throw bad("must not be negative");
      break;
    case SweepAxis::TargetDuration:
      if (v <= 0.0) throw bad("must be positive");
      break;
    case SweepAxis::NoiseRatio:
      if (v < 0.0 || v > 1.0) throw bad("must be within [0, 1]");
      break;
    case SweepAxis::ExtraM:
      if (!is_integer(v) || v < 0.0 || v > 1000.0) throw bad("must be an integer within [0, 1000]");
      break;
    case SweepAxis::Base:
      break;
  }
}

void EvalConfig::validate() const {
  if (trials < 1) throw ValidationError("trials", "must be at least 1");
  if (values.empty()) throw ValidationError("values", "at least one axis value is required");
  if (master_seeds.empty()) throw ValidationError("seeds", "at least one master seed is required");
  for (double v : values) validate_axis_value(axis, v);
  settings.noise.validate();
  if (settings.cost_budget && !(*settings.cost_budget >= 0.0)) throw ValidationError("budget", "must not be negative");
  if (settings.extra_m < 0) throw ValidationError("extra_m", "must not be negative");
  if (!(settings.target_duration_hours > 0.0)) throw ValidationError("target_duration", "must be positive");
}

EvalWorld::EvalWorld(ConstellationScenario scenario) : EvalWorld(scenario, contact_windows_for(scenario)) {}

EvalWorld::EvalWorld(ConstellationScenario scenario, std::vector<ContactWindow> windows)
    : scenario_(std::move(scenario)), view_(build_world(scenario_, std::move(windows))) {
  for (const SatelliteSpec* s : scenario_.low_priority()) {
    auto records = attackability(scenario_, view_.schedules, view_.contacts, s->id);
    surfaces_.emplace(s->id, AttackSurface::from_records(records));
  }
}

const AttackSurface& EvalWorld::surface(const std::string& satellite_id) const {
  auto it = surfaces_.find(satellite_id);
  if (it == surfaces_.end()) throw ValidationError("satellite_id", "no low-priority satellite '" + satellite_id + "'");
  return it->second;
}

TargetSetup target_setup(const EvalWorld& world) {
  const ConstellationScenario& sc = world.scenario();
  const TargetSpec& t = sc.require_target();
  TargetSetup setup;
  setup.surface = &world.surface(t.satellite_id);
  setup.model = build_queue_model(sc, t.satellite_id, *setup.surface, t.attack_start_slot, t.initial_queue);
  auto idx = indices_in(setup.model, t.unit_ids);
  if (!idx) throw ValidationError("target.unit_ids", "target unit not queued at the attack start");
  setup.targets = std::move(*idx);
  return setup;
}

std::uint64_t trial_seed(std::uint64_t master_seed, SweepAxis axis, std::uint64_t trial_index) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(axis) + 1) * 0x100000001b3ULL);
  return splitmix64(h ^ trial_index);
}

TrialRecord run_trial(const EvalWorld& world, const TrialSettings& settings, std::mt19937_64& rng) {
  const ConstellationScenario& nominal = world.scenario();
  TrialRecord rec;
  auto target = pick_target(nominal, settings, rng, rec.note);
  if (!target) return rec;
  rec.satellite_id = target->satellite_id;
  rec.targets = target->theta;

  const AttackSurface& surface = world.surface(target->satellite_id);
  const Slot horizon = nominal.time.horizon_slots;
  const Slot last = nominal.time.last_slot();
  QueueModel plan_model = build_queue_model(nominal, target->satellite_id, surface, target->start, target->initial);
  auto theta = indices_in(plan_model, target->theta);
  if (!theta) {
    rec.note = "target unit not queued at the attack start";
    return rec;
  }
  std::vector<std::string> fifo;
  for (const auto& u : plan_model.units()) fifo.push_back(u.unit_id);
  auto widened = *indices_in(plan_model, extend_targets(target->theta, fifo, settings.extra_m));

  // The true world: same contacts, perturbed sizes, rates and initial queue.
  ConstellationScenario staged = nominal;
  staged.target = TargetSpec{target->satellite_id, target->theta, target->start, std::nullopt, std::nullopt,
                             target->initial};
  ConstellationScenario truth = perturb(staged, settings.noise, rng);
  QueueModel true_model =
      build_queue_model(truth, target->satellite_id, surface, target->start, truth.target->initial_queue);
  auto true_theta = indices_in(true_model, target->theta);

  const AttackSet none(horizon);
  Slot target_slot = 0;
  PlanResult plan;
  if (settings.kind == AttackKind::Delay) {
    TargetTiming base = target_timing(plan_model, none, theta->back());
    if (base.dropped) {
      target_slot = last;
      plan.status = PlanStatus::Success;
    } else {
      target_slot = target->target_slot.value_or(
          base.evacuation + nominal.time.slots_for_seconds(settings.target_duration_hours * 3600.0));
      if (target_slot > last) {
        rec.note = "target downlink slot beyond the horizon";
        return rec;
      }
      if (target_slot <= base.evacuation) {
        rec.note = "target downlink slot not after the unattacked downlink slot";
        return rec;
      }
      const Slot duration = target_slot - base.evacuation;
      PlanContext ctx{&plan_model, &surface, widened};
      TargetTiming wide_base = target_timing(plan_model, none, widened.back());
      Slot wide_slot = wide_base.dropped ? last : std::min(wide_base.evacuation + duration, last);
      if (wide_base.dropped || wide_slot <= wide_base.evacuation) {
        ctx.targets = *theta;
        wide_slot = target_slot;
      }
      plan = plan_delay(DelayPlanRequest{ctx, wide_slot});
    }
  } else {
    plan = plan_overflow(OverflowPlanRequest{PlanContext{&plan_model, &surface, widened}});
  }

  rec.cost = plan.strategy.total_cost;
  rec.planned_slots = plan.strategy.slot_indices();
  if (!plan.ok()) {
    rec.note = plan.reason;
  } else if (auto budget = settings.cost_budget ? settings.cost_budget : target->budget;
             budget && plan.strategy.total_cost > *budget) {
    rec.note = "cost " + format_cost(plan.strategy.total_cost) + " exceeds the budget";
  } else {
    rec.planned = true;
  }
  if (!true_theta) {
    rec.note = "target unit missing from the true queue";
    return rec;
  }
  rec.natural = goal_met(settings.kind, true_model, none, *true_theta, target_slot);
  if (rec.planned) {
    AttackSet y(horizon, rec.planned_slots);
    rec.success = goal_met(settings.kind, true_model, y, *true_theta, target_slot);
  }
  return rec;
}

TrialRecord run_trial(const ConstellationScenario& nominal, const TrialSettings& settings, std::mt19937_64& rng) {
  return run_trial(EvalWorld(nominal), settings, rng);
}

ConstellationScenario scenario_for_point(const ConstellationScenario& base, SweepAxis axis, double value) {
  validate_axis_value(axis, value);
  ConstellationScenario sc = base;
  switch (axis) {
    case SweepAxis::ImageSize: {
      auto bytes = static_cast<Bytes>(std::llround(value * 1e6));
      for (auto& [sat, units] : sc.trace.units)
        for (auto& u : units) u.size_bytes = bytes;
      if (sc.target) {
        sc.target->initial_queue.unit_bytes = bytes;
        sc.target->initial_queue.unit_sizes.clear();
      }
      break;
    }
    case SweepAxis::DataRate:
      for (auto& s : sc.satellites)
        if (s.priority == Priority::Low) s.downlink_rate_bps = static_cast<std::int64_t>(std::llround(value * 1e6));
      break;
    case SweepAxis::NHigh: {
      auto keep = static_cast<std::size_t>(value);
      if (keep > sc.high_priority().size())
        throw ValidationError("values", "n_high " + format_sig6(value) + " exceeds the " +
                                            std::to_string(sc.high_priority().size()) + " high-priority satellites");
      std::size_t seen = 0;
      std::erase_if(sc.satellites, [&](const SatelliteSpec& s) { return s.priority == Priority::High && seen++ >= keep; });
      break;
    }
    default:
      break;
  }
  return sc;
}

TrialSettings settings_for_point(const TrialSettings& base, SweepAxis axis, double value) {
  validate_axis_value(axis, value);
  TrialSettings s = base;
  switch (axis) {
    case SweepAxis::Budget: s.cost_budget = value; break;
    case SweepAxis::TargetDuration: s.target_duration_hours = value; break;
    case SweepAxis::NoiseRatio:
      s.noise.size_std_ratio = value;
      s.noise.rate_std_ratio = value;
      break;
    case SweepAxis::ExtraM: s.extra_m = static_cast<int>(value); break;
    default: break;
  }
  return s;
}

double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

struct PointWork {
  std::optional<EvalWorld> world;
  TrialSettings settings;
  std::string error;
};

std::vector<PointWork> prepare_points(const EvalConfig& config, const ConstellationScenario& base) {
  config.validate();
  std::vector<ContactWindow> base_windows = contact_windows_for(base);
  std::vector<PointWork> points(config.values.size());
  for (std::size_t i = 0; i < config.values.size(); ++i) {
    double v = config.values[i];
    try {
      ConstellationScenario sc = scenario_for_point(base, config.axis, v);
      std::vector<ContactWindow> windows;
      for (const auto& w : base_windows)
        if (sc.find_satellite(w.satellite_id)) windows.push_back(w);
      points[i].world.emplace(std::move(sc), std::move(windows));
      points[i].settings = settings_for_point(config.settings, config.axis, v);
    } catch (const std::exception& e) {
      points[i].error = e.what();
    }
  }
  return points;
}

TrialRecord run_task(const EvalConfig& config, const std::vector<PointWork>& points, std::size_t task) {
  const auto per_point = static_cast<std::size_t>(config.trials) * config.master_seeds.size();
  std::size_t point = task / per_point, within = task % per_point;
  std::size_t seed_index = within / static_cast<std::size_t>(config.trials);
  std::size_t trial = within % static_cast<std::size_t>(config.trials);
  TrialRecord rec;
  const PointWork& work = points[point];
  if (work.world) {
    std::mt19937_64 rng(trial_seed(config.master_seeds[seed_index], config.axis, trial));
    try {
      rec = run_trial(*work.world, work.settings, rng);
    } catch (const std::exception& e) {
      rec = TrialRecord{};
      rec.note = e.what();
    }
  } else {
    rec.note = work.error;
  }
  rec.axis = std::string(to_string(config.axis));
  rec.value = config.values[point];
  rec.seed_index = static_cast<int>(seed_index);
  rec.trial = static_cast<int>(trial);
  return rec;
}

EvalReport summarize(const EvalConfig& config, std::vector<TrialRecord> records) {
  EvalReport report;
  report.axis = config.axis;
  report.trials_per_seed = config.trials;
  const auto per_point = static_cast<std::size_t>(config.trials) * config.master_seeds.size();
  for (std::size_t p = 0; p < config.values.size(); ++p) {
    PointSummary s;
    s.value = config.values[p];
    std::vector<double> ratios;
    for (std::size_t k = 0; k < config.master_seeds.size(); ++k) {
      int wins = 0;
      for (int t = 0; t < config.trials; ++t) {
        const TrialRecord& r = records[p * per_point + k * static_cast<std::size_t>(config.trials) + static_cast<std::size_t>(t)];
        wins += r.success;
        s.natural += r.natural;
      }
      s.successes += wins;
      ratios.push_back(static_cast<double>(wins) / config.trials);
    }
    std::sort(ratios.begin(), ratios.end());
    s.trials = static_cast<int>(per_point);
    s.success_ratio = static_cast<double>(s.successes) / static_cast<double>(per_point);
    s.q1 = quantile(ratios, 0.25);
    s.median = quantile(ratios, 0.5);
    s.q3 = quantile(ratios, 0.75);
    s.min = ratios.front();
    s.max = ratios.back();
    report.points.push_back(s);
  }
  report.trials = std::move(records);
  return report;
}

}  // namespace

EvalReport sweep_serial(const EvalConfig& config, const ConstellationScenario& base) {
  auto points = prepare_points(config, base);
  const std::size_t total = points.size() * static_cast<std::size_t>(config.trials) * config.master_seeds.size();
  std::vector<TrialRecord> records;
  for (std::size_t i = 0; i < total; ++i) records.push_back(run_task(config, points, i));
  return summarize(config, std::move(records));
}

EvalReport sweep(const EvalConfig& config, const ConstellationScenario& base) {
  auto points = prepare_points(config, base);
  const std::size_t total = points.size() * static_cast<std::size_t>(config.trials) * config.master_seeds.size();
  std::vector<TrialRecord> records(total);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t i = 0; i < total; ++i) records[i] = run_task(config, points, i);
  return summarize(config, std::move(records));
}

std::string format_report_csv(const EvalReport& report) {
  std::string out = "axis,value,trial,success,natural,cost,planned_slots\n";
  for (const auto& r : report.trials) {
    std::string slots;
    for (Slot t : r.planned_slots) slots += (slots.empty() ? "" : " ") + format_int(t);
    out += r.axis + "," + format_sig6(r.value) + "," + std::to_string(r.seed_index * report.trials_per_seed + r.trial) + "," + (r.success ? "1" : "0") + "," + (r.natural ? "1" : "0") + "," + format_cost(r.cost) + "," + slots + "\n";
  }
  return out;
}

std::string format_aggregate_csv(const EvalReport& report) {
  std::string out = "axis,value,q1,median,q3,min,max,success_ratio\n";
  std::string axis(to_string(report.axis));
  for (const auto& p : report.points)
    out += axis + "," + format_sig6(p.value) + "," + format_sig6(p.q1) + "," + format_sig6(p.median) + "," +
           format_sig6(p.q3) + "," + format_sig6(p.min) + "," + format_sig6(p.max) + "," + format_sig6(p.success_ratio) + "\n";
  return out;
}

std::string format_report_json(const EvalReport& report) {
  using json = nlohmann::ordered_json;
  json j;
  j["axis"] = std::string(to_string(report.axis));
  json points = json::array();
  for (const auto& p : report.points)
    points.push_back({{"value", p.value},
                      {"trials", p.trials},
                      {"successes", p.successes},
                      {"natural", p.natural},
                      {"success_ratio", p.success_ratio},
                      {"q1", p.q1},
                      {"median", p.median},
                      {"q3", p.q3},
                      {"min", p.min},
                      {"max", p.max}});
  j["points"] = std::move(points);
  json trials = json::array();
  for (const auto& r : report.trials) {
    json jt = {{"value", r.value},
               {"seed_index", r.seed_index},
               {"trial", r.trial},
               {"success", r.success},
               {"natural", r.natural},
               {"planned", r.planned},
               {"cost", r.cost},
               {"planned_slots", r.planned_slots},
               {"satellite_id", r.satellite_id},
               {"targets", r.targets}};
    if (!r.note.empty()) jt["note"] = r.note;
    trials.push_back(std::move(jt));
  }
  j["trials"] = std::move(trials);
  return j.dump(2) + "\n";
}

}  // namespace orbitsiege
