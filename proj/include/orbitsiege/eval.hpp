#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "orbitsiege/planner_overflow.hpp"
#include "orbitsiege/scheduler.hpp"

namespace orbitsiege {

/// Estimation error between the attacker's nominal world and the true one.
struct NoiseModel {
  double size_std_ratio = 0.1;
  double rate_std_ratio = 0.1;
  int initial_queue_jitter_units = 10;

  static NoiseModel none() { return {0.0, 0.0, 0}; }
  bool is_zero() const {
    return size_std_ratio == 0.0 && rate_std_ratio == 0.0 && initial_queue_jitter_units == 0;
  }
  void validate() const;  // ValidationError("noise...")
};

// Gaussian resample around `nominal` with std ratio * nominal, floored at 10%
// of nominal and rounded to an integer.
std::int64_t sample_positive(std::int64_t nominal, double std_ratio, std::mt19937_64& rng);

/// The true world behind a nominal scenario: every low-priority unit size and
/// downlink rate resampled independently, the initial queue count jittered
/// uniformly in [-jitter, +jitter] (units are added or removed at its tail)
/// and its unit sizes resampled. Zero noise returns the scenario unchanged.
ConstellationScenario perturb(const ConstellationScenario& nominal, const NoiseModel& noise,
                              std::mt19937_64& rng);

// theta widened by up to M FIFO neighbours on each side, clipped at the ends
// of `fifo`. Units of theta missing from fifo are kept as given.
std::vector<std::string> extend_targets(std::span<const std::string> theta,
                                        std::span<const std::string> fifo, int extra_m);

enum class AttackKind { Delay, Overflow };
enum class SweepAxis { ImageSize, DataRate, NHigh, Budget, TargetDuration, NoiseRatio, ExtraM, Base };

std::string_view to_string(AttackKind kind);
std::string_view to_string(SweepAxis axis);
AttackKind parse_attack_kind(std::string_view text);
SweepAxis parse_sweep_axis(std::string_view text);

/// Settings of one evaluation point.
struct TrialSettings {
  AttackKind kind = AttackKind::Delay;
  NoiseModel noise;
  std::optional<double> cost_budget;
  int extra_m = 0;
  double target_duration_hours = 24.0;  // delay attacks, relative to the unattacked downlink
  // When set, each trial draws the target satellite and |theta| consecutive
  // units captured within the window; otherwise the scenario target is used,
  // with its own downlink slot and budget when these are given.
  bool randomize_target = true;
  int target_units = 4;
  std::optional<Slot> target_window_slots;  // default: a third of the remaining horizon
};

struct TrialRecord {
  std::string axis;
  double value = 0.0;
  int seed_index = 0;
  int trial = 0;
  bool success = false;
  bool natural = false;  // goal met in the true world without any attack
  bool planned = false;  // planner succeeded within budget
  double cost = 0.0;
  std::vector<Slot> planned_slots;
  std::string satellite_id;
  std::vector<std::string> targets;
  std::string note;
};

struct PointSummary {
  double value = 0.0;
  int trials = 0;
  int successes = 0;
  int natural = 0;
  double success_ratio = 0.0;
  // Box statistics over the per-seed success ratios.
  double q1 = 0.0, median = 0.0, q3 = 0.0, min = 0.0, max = 0.0;
};

struct EvalReport {
  SweepAxis axis = SweepAxis::Base;
  int trials_per_seed = 1;
  std::vector<TrialRecord> trials;  // sorted by (value index, seed, trial)
  std::vector<PointSummary> points;
};

struct EvalConfig {
  SweepAxis axis = SweepAxis::Base;
  std::vector<double> values;
  int trials = 10;
  std::vector<std::uint64_t> master_seeds{1};
  TrialSettings settings;

  void validate() const;
};

// Natural units of the axis values: image size MB, data rate Mbit/s, satellite
// count, cost units, hours, std ratio, unit count.
void validate_axis_value(SweepAxis axis, double value);

/// Per-scenario precomputation reused by every trial at one sweep point.
class EvalWorld {
 public:
  explicit EvalWorld(ConstellationScenario scenario);
  EvalWorld(ConstellationScenario scenario, std::vector<ContactWindow> windows);

  const ConstellationScenario& scenario() const { return scenario_; }
  const WorldView& view() const { return view_; }
  const AttackSurface& surface(const std::string& satellite_id) const;

 private:
  ConstellationScenario scenario_;
  WorldView view_;
  std::map<std::string, AttackSurface> surfaces_;
};

/// The scenario target's queue, attack surface and unit indices.
struct TargetSetup {
  QueueModel model;
  const AttackSurface* surface = nullptr;
  std::vector<std::size_t> targets;

  PlanContext context() const { return PlanContext{&model, surface, targets}; }
};

// Throws ValidationError when the scenario has no target.
TargetSetup target_setup(const EvalWorld& world);

// Deterministic per-trial seed from (master seed, axis, trial index).
std::uint64_t trial_seed(std::uint64_t master_seed, SweepAxis axis, std::uint64_t trial_index);

TrialRecord run_trial(const EvalWorld& world, const TrialSettings& settings, std::mt19937_64& rng);
TrialRecord run_trial(const ConstellationScenario& nominal, const TrialSettings& settings,
                      std::mt19937_64& rng);

// Scenario and settings for one sweep point.
ConstellationScenario scenario_for_point(const ConstellationScenario& base, SweepAxis axis,
                                         double value);
TrialSettings settings_for_point(const TrialSettings& base, SweepAxis axis, double value);

EvalReport sweep_serial(const EvalConfig& config, const ConstellationScenario& base);
EvalReport sweep(const EvalConfig& config, const ConstellationScenario& base);

// Linear-interpolation quantile of sorted data, q in [0, 1].
double quantile(std::span<const double> sorted, double q);

// CSV: axis,value,trial,success,natural,cost,planned_slots
std::string format_report_csv(const EvalReport& report);
// CSV: axis,value,q1,median,q3,min,max,success_ratio
std::string format_aggregate_csv(const EvalReport& report);
std::string format_report_json(const EvalReport& report);

}  // namespace orbitsiege
