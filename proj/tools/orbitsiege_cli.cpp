// orbitsiege: contact windows, queue simulation, attack planning and sweeps.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "orbitsiege/emit.hpp"
#include "orbitsiege/errors.hpp"
#include "orbitsiege/eval.hpp"
#include "orbitsiege/orbit.hpp"
#include "orbitsiege/planner_delay.hpp"
#include "orbitsiege/planner_overflow.hpp"
#include "orbitsiege/queue.hpp"
#include "orbitsiege/scenario.hpp"
#include "orbitsiege/scheduler.hpp"

namespace os = orbitsiege;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitInput = 2;

struct Options {
  std::string scenario;
  std::string windows;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<double> budget;
  int extra_m = 0;
  int trials = 10;
  int seeds = 1;
  std::string axis = "base";
  std::vector<double> values;
  std::optional<os::Slot> target_slot;
  std::string satellite;
  std::string strategy;
  std::string kind = "delay";
  std::string events;
  std::string aggregate;
  double noise = 0.1;
  int jitter = 10;
  double duration_hours = 24.0;
  int target_units = 4;
  bool fixed_target = false;
};

void emit(const Options& opt, const std::string& content) {
  if (opt.out.empty() || opt.out == "-")
    std::cout << content;
  else
    os::write_file_atomic(opt.out, content);
}

os::ConstellationScenario load(const Options& opt) {
  auto sc = os::load_scenario(opt.scenario);
  if (!opt.windows.empty()) sc.windows_file = std::filesystem::absolute(opt.windows);
  return sc;
}

std::uint64_t resolve_seed(const Options& opt, const os::ConstellationScenario& sc) {
  if (opt.seed) return *opt.seed;
  if (const char* env = std::getenv("ORBITSIEGE_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (!*env || *end) throw os::ValidationError("ORBITSIEGE_SEED", "expected a non-negative integer");
    return v;
  }
  return sc.seed;
}

std::string slot_list(const std::vector<os::Slot>& slots) {
  std::string out = "{";
  for (std::size_t i = 0; i < slots.size(); ++i) out += (i ? "," : "") + os::format_int(slots[i]);
  return out + "}";
}

int cmd_windows(const Options& opt) {
  auto sc = load(opt);
  auto windows = os::contact_windows_for(sc);
  if (opt.format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& w : windows)
      j.push_back({{"slot", w.slot},
                   {"satellite_id", w.satellite_id},
                   {"station_id", w.station_id},
                   {"elevation_deg", std::strtod(os::format_sig6(w.elevation_deg).c_str(), nullptr)}});
    emit(opt, j.dump(2) + "\n");
  } else {
    emit(opt, os::format_contact_windows_csv(windows));
  }
  return kExitOk;
}

std::string satellite_for(const Options& opt, const os::ConstellationScenario& sc) {
  if (!opt.satellite.empty()) return opt.satellite;
  return sc.require_target().satellite_id;
}

int cmd_schedule(const Options& opt) {
  os::EvalWorld world(load(opt));
  std::string sat = satellite_for(opt, world.scenario());
  auto records = os::attackability(world.scenario(), world.view().schedules, world.view().contacts, sat);
  if (opt.format == "json") {
    nlohmann::ordered_json j;
    j["satellite_id"] = sat;
    auto slots = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < records.size(); ++t) {
      const auto& r = records[t];
      const auto& s = world.view().schedules[t];
      auto assignments = nlohmann::ordered_json::array();
      for (const auto& a : s.assignments)
        assignments.push_back({{"satellite_id", a.satellite_id},
                               {"station_id", a.station_id},
                               {"antenna_index", a.antenna_index},
                               {"slant_range_m", std::llround(a.cost)}});
      slots.push_back({{"slot", r.slot},
                       {"transmissible", r.transmissible},
                       {"attackable", r.attackable},
                       {"required_high", r.required_high_priority},
                       {"cost", r.attackable ? nlohmann::ordered_json(r.cost) : nlohmann::ordered_json(nullptr)},
                       {"assignments", std::move(assignments)}});
    }
    j["slots"] = std::move(slots);
    emit(opt, j.dump(2) + "\n");
  } else {
    emit(opt, os::format_attackability_csv(records));
  }
  return kExitOk;
}

os::AttackSet strategy_set(const Options& opt, const os::QueueModel& model) {
  if (opt.strategy.empty()) return os::AttackSet(model.horizon_slots());
  auto s = os::parse_strategy_csv(os::read_file(opt.strategy));
  for (const auto& a : s.slots)
    if (a.slot >= model.horizon_slots()) throw os::OutOfHorizon("strategy slot " + os::format_int(a.slot) + " outside the horizon");
  return s.as_set(model.horizon_slots());
}

int cmd_simulate(const Options& opt) {
  os::EvalWorld world(load(opt));
  auto setup = os::target_setup(world);
  auto attacked = strategy_set(opt, setup.model);
  auto trace = os::evolve_fifo(setup.model, attacked, setup.targets);
  if (!opt.events.empty()) os::write_file_atomic(opt.events, os::format_queue_events_csv(trace));
  if (opt.format == "json") {
    nlohmann::ordered_json j;
    j["satellite_id"] = world.scenario().require_target().satellite_id;
    j["attacked_slots"] = attacked.slots();
    auto targets = nlohmann::ordered_json::array();
    for (const auto& t : trace.targets)
      targets.push_back({{"unit_id", setup.model.units()[t.unit_index].unit_id},
                         {"dropped", t.dropped},
                         {"evacuation_slot", t.dropped ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(t.evacuation)},
                         {"drop_slot", t.dropped ? nlohmann::ordered_json(t.drop_slot) : nlohmann::ordered_json(nullptr)},
                         {"last_full_slot", t.last_full}});
    j["targets"] = std::move(targets);
    auto slots = nlohmann::ordered_json::array();
    for (const auto& o : trace.outcomes)
      slots.push_back({{"slot", o.slot}, {"queue_bytes", o.queue_bytes}, {"tx_bytes", o.transmitted}, {"drop_bytes", o.dropped}});
    j["slots"] = std::move(slots);
    emit(opt, j.dump(2) + "\n");
  } else {
    emit(opt, os::format_queue_trace_csv(setup.model, trace));
  }
  return kExitOk;
}

int report_plan(const Options& opt, const os::PlanResult& result, bool overflow, std::optional<double> budget) {
  bool over = result.ok() && budget && result.strategy.total_cost > *budget;
  os::PlanResult shown = result;
  if (over) {
    shown.status = os::PlanStatus::AttackFail;
    shown.reason = "cost " + os::format_cost(result.strategy.total_cost) + " exceeds budget " + os::format_cost(*budget);
  }
  emit(opt, opt.format == "json" ? os::format_strategy_json(shown, overflow) : os::format_strategy_csv(shown.strategy));
  std::cerr << (shown.ok() ? "strategy " : "attack failed: ") << slot_list(shown.strategy.slot_indices()) << " cost "
            << os::format_cost(shown.strategy.total_cost);
  if (!shown.reason.empty()) std::cerr << " (" << shown.reason << ")";
  std::cerr << "\n";
  for (const auto& t : shown.strategy.targets) {
    std::cerr << "  " << t.unit_id << ": ";
    if (t.dropped)
      std::cerr << "dropped at slot " << t.drop_slot << "\n";
    else
      std::cerr << "downlinked at slot " << t.evacuation << "\n";
  }
  return shown.ok() ? kExitOk : kExitNegative;
}

std::optional<double> budget_for(const Options& opt, const os::ConstellationScenario& sc) {
  if (opt.budget) return opt.budget;
  return sc.require_target().cost_budget;
}

os::Slot target_slot_for(const Options& opt, const os::ConstellationScenario& sc) {
  if (opt.target_slot) return *opt.target_slot;
  const auto& t = sc.require_target();
  if (!t.target_downlink_slot) throw os::ValidationError("target.target_downlink_slot", "required for delay attacks (or pass --target-slot)");
  return *t.target_downlink_slot;
}

int cmd_plan_delay(const Options& opt) {
  os::EvalWorld world(load(opt));
  auto setup = os::target_setup(world);
  auto result = os::plan_delay(os::DelayPlanRequest{setup.context(), target_slot_for(opt, world.scenario())});
  return report_plan(opt, result, false, budget_for(opt, world.scenario()));
}

int cmd_plan_overflow(const Options& opt) {
  os::EvalWorld world(load(opt));
  auto setup = os::target_setup(world);
  auto result = os::plan_overflow(os::OverflowPlanRequest{setup.context()});
  return report_plan(opt, result, true, budget_for(opt, world.scenario()));
}

int cmd_verify(const Options& opt) {
  os::EvalWorld world(load(opt));
  auto setup = os::target_setup(world);
  auto attacked = strategy_set(opt, setup.model);
  const auto& surface = *setup.surface;
  for (os::Slot t : attacked.slots())
    if (!surface.attackable[static_cast<std::size_t>(t)])
      throw os::ValidationError("strategy", "slot " + os::format_int(t) + " is not attackable");
  auto kind = os::parse_attack_kind(opt.kind);
  os::VerifyReport report = kind == os::AttackKind::Delay
                                ? os::verify_delay(setup.model, attacked, setup.targets, target_slot_for(opt, world.scenario()))
                                : os::verify_overflow(setup.model, attacked, setup.targets);
  nlohmann::ordered_json j;
  j["kind"] = std::string(os::to_string(kind));
  j["success"] = report.success;
  j["detail"] = report.detail;
  auto targets = nlohmann::ordered_json::array();
  for (const auto& t : report.targets)
    targets.push_back({{"unit_id", t.unit_id},
                       {"dropped", t.dropped},
                       {"evacuation_slot", t.dropped ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(t.evacuation)},
                       {"drop_slot", t.dropped ? nlohmann::ordered_json(t.drop_slot) : nlohmann::ordered_json(nullptr)}});
  j["targets"] = std::move(targets);
  if (opt.format == "json") {
    emit(opt, j.dump(2) + "\n");
  } else {
    std::string csv = "unit_id,dropped,evacuation_slot,drop_slot\n";
    for (const auto& t : report.targets)
      csv += t.unit_id + "," + (t.dropped ? "1" : "0") + "," + (t.dropped ? "" : os::format_int(t.evacuation)) + "," +
             (t.dropped ? os::format_int(t.drop_slot) : "") + "\n";
    emit(opt, csv);
  }
  std::cerr << (report.success ? "verified: " : "not verified: ") << report.detail << "\n";
  return report.success ? kExitOk : kExitNegative;
}

int run_eval(const Options& opt, os::SweepAxis axis, std::vector<double> values) {
  auto sc = load(opt);
  os::EvalConfig config;
  config.axis = axis;
  config.values = std::move(values);
  config.trials = opt.trials;
  std::uint64_t seed = resolve_seed(opt, sc);
  if (opt.seeds < 1) throw os::ValidationError("seeds", "must be at least 1");
  config.master_seeds.clear();
  for (int k = 0; k < opt.seeds; ++k) config.master_seeds.push_back(seed + static_cast<std::uint64_t>(k));
  auto& s = config.settings;
  s.kind = os::parse_attack_kind(opt.kind);
  s.noise = {opt.noise, opt.noise, opt.jitter};
  s.cost_budget = opt.budget ? opt.budget : (sc.target ? sc.target->cost_budget : std::nullopt);
  s.extra_m = opt.extra_m;
  s.target_duration_hours = opt.duration_hours;
  s.randomize_target = !opt.fixed_target;
  s.target_units = opt.target_units;
  auto report = os::sweep(config, sc);
  if (!opt.aggregate.empty()) os::write_file_atomic(opt.aggregate, os::format_aggregate_csv(report));
  emit(opt, opt.format == "json" ? os::format_report_json(report) : os::format_report_csv(report));
  for (const auto& p : report.points)
    std::cerr << os::to_string(axis) << "=" << os::format_sig6(p.value) << ": success " << p.successes << "/" << p.trials
              << " (median per-seed ratio " << os::format_sig6(p.median) << ", natural " << p.natural << ")\n";
  return kExitOk;
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--scenario", opt.scenario, "Scenario JSON file")->required();
  cmd->add_option("--windows", opt.windows, "Precomputed contact-window CSV (bypasses propagation)");
  cmd->add_option("--out", opt.out, "Output file (default: standard output)");
  cmd->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void add_plan_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--budget", opt.budget, "Cost budget");
}

void add_eval_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--seed", opt.seed, "Master seed (falls back to ORBITSIEGE_SEED, then the scenario seed)");
  cmd->add_option("--seeds", opt.seeds, "Number of consecutive master seeds");
  cmd->add_option("--trials", opt.trials, "Trials per master seed and axis value");
  cmd->add_option("--budget", opt.budget, "Cost budget");
  cmd->add_option("--extra-m", opt.extra_m, "Extra units attacked on each side of the target");
  cmd->add_option("--kind", opt.kind, "Attack kind")->check(CLI::IsMember({"delay", "overflow"}));
  cmd->add_option("--noise", opt.noise, "Std ratio of size and rate noise");
  cmd->add_option("--jitter", opt.jitter, "Initial queue jitter in units");
  cmd->add_option("--duration", opt.duration_hours, "Delay target in hours");
  cmd->add_option("--target-units", opt.target_units, "Units per randomized target");
  cmd->add_flag("--fixed-target", opt.fixed_target, "Use the scenario target instead of random ones");
  cmd->add_option("--aggregate", opt.aggregate, "Also write the aggregate CSV here");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate LEO downlink scheduling and plan data-delay and data-overflow attacks"};
  app.name("orbitsiege");
  app.require_subcommand(1);
  Options opt;

  auto* windows = app.add_subcommand("windows", "Compute per-slot contact windows");
  add_common(windows, opt);

  auto* schedule = app.add_subcommand("schedule", "Antenna assignment and attackability per slot");
  add_common(schedule, opt);
  schedule->add_option("--satellite", opt.satellite, "Low-priority satellite (default: the target)");

  auto* simulate = app.add_subcommand("simulate", "Queue evolution of the target satellite");
  add_common(simulate, opt);
  simulate->add_option("--strategy", opt.strategy, "Strategy CSV of attacked slots (default: none)");
  simulate->add_option("--events", opt.events, "Write the transmit/drop event log here");

  auto* plan_delay = app.add_subcommand("plan-delay", "Plan a data-delay attack");
  add_common(plan_delay, opt);
  add_plan_options(plan_delay, opt);
  plan_delay->add_option("--target-slot", opt.target_slot, "Target downlink slot of the last target unit");

  auto* plan_overflow = app.add_subcommand("plan-overflow", "Plan a data-overflow attack");
  add_common(plan_overflow, opt);
  add_plan_options(plan_overflow, opt);

  auto* verify = app.add_subcommand("verify", "Check a strategy against the scenario target");
  add_common(verify, opt);
  verify->add_option("--strategy", opt.strategy, "Strategy CSV")->required();
  verify->add_option("--kind", opt.kind, "Attack kind")->check(CLI::IsMember({"delay", "overflow"}));
  verify->add_option("--target-slot", opt.target_slot, "Target downlink slot (delay)");

  auto* evaluate = app.add_subcommand("evaluate", "Monte-Carlo trials at the scenario's settings");
  add_common(evaluate, opt);
  add_eval_options(evaluate, opt);

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo trials over one parameter axis");
  add_common(sweep, opt);
  add_eval_options(sweep, opt);
  sweep->add_option("--axis", opt.axis, "image_size|data_rate|n_high|budget|target_duration|noise_ratio|extra_M")->required();
  sweep->add_option("--values", opt.values, "Comma-separated axis values")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*windows) return cmd_windows(opt);
    if (*schedule) return cmd_schedule(opt);
    if (*simulate) return cmd_simulate(opt);
    if (*plan_delay) return cmd_plan_delay(opt);
    if (*plan_overflow) return cmd_plan_overflow(opt);
    if (*verify) return cmd_verify(opt);
    if (*evaluate) return run_eval(opt, os::SweepAxis::Base, {0.0});
    if (*sweep) return run_eval(opt, os::parse_sweep_axis(opt.axis), opt.values);
  } catch (const os::ValidationError& e) {
    std::cerr << "orbitsiege: invalid input: " << e.what() << "\n";
    return kExitInput;
  } catch (const os::IoError& e) {
    std::cerr << "orbitsiege: " << e.what() << "\n";
    return kExitInput;
  } catch (const os::ParseError& e) {
    std::cerr << "orbitsiege: parse error: " << e.what() << "\n";
    return kExitInput;
  } catch (const os::OutOfHorizon& e) {
    std::cerr << "orbitsiege: out of horizon: " << e.what() << "\n";
    return kExitInput;
  } catch (const os::StaleElements& e) {
    std::cerr << "orbitsiege: stale elements: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "orbitsiege: error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
