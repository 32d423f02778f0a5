#include <benchmark/benchmark.h>

#include <string>

#include "orbitsiege/eval.hpp"
#include "orbitsiege/orbit.hpp"
#include "orbitsiege/scheduler.hpp"

namespace os = orbitsiege;

namespace {

const os::ConstellationScenario& synthetic() {
  static const os::ConstellationScenario sc =
      os::load_scenario(std::string(ORBITSIEGE_SCENARIO_DIR) + "/synthetic24h.json");
  return sc;
}

const os::ContactIndex& contacts() {
  static const os::ContactIndex index(os::compute_contact_windows(synthetic()),
                                      synthetic().time.horizon_slots);
  return index;
}

os::EvalConfig sweep_config() {
  os::EvalConfig cfg;
  cfg.axis = os::SweepAxis::Budget;
  cfg.values = {20, 80};
  cfg.trials = 8;
  cfg.master_seeds = {1, 2};
  cfg.settings.target_duration_hours = 1.0;
  return cfg;
}

void BM_WindowsSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(os::compute_contact_windows_serial(synthetic()));
}

void BM_WindowsParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(os::compute_contact_windows(synthetic()));
}

void BM_SchedulesSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(os::build_schedules_serial(synthetic(), contacts()));
}

void BM_SchedulesParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(os::build_schedules(synthetic(), contacts()));
}

void BM_SweepSerial(benchmark::State& state) {
  auto cfg = sweep_config();
  for (auto _ : state) benchmark::DoNotOptimize(os::sweep_serial(cfg, synthetic()));
}

void BM_SweepParallel(benchmark::State& state) {
  auto cfg = sweep_config();
  for (auto _ : state) benchmark::DoNotOptimize(os::sweep(cfg, synthetic()));
}

}  // namespace

BENCHMARK(BM_WindowsSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_WindowsParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SchedulesSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SchedulesParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
