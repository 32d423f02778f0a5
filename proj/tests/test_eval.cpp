#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "orbitsiege/errors.hpp"
#include "orbitsiege/eval.hpp"
#include "orbitsiege/planner_delay.hpp"

namespace os = orbitsiege;

namespace {

os::ConstellationScenario load(const std::string& name) {
  return os::load_scenario(std::string(ORBITSIEGE_SCENARIO_DIR) + "/" + name);
}

const os::ConstellationScenario& synthetic() {
  static const os::ConstellationScenario sc = load("synthetic24h.json");
  return sc;
}

os::TrialSettings fixed_s0(double budget) {
  os::TrialSettings s;
  s.noise = os::NoiseModel::none();
  s.randomize_target = false;
  s.cost_budget = budget;
  return s;
}

os::EvalConfig curve(os::SweepAxis axis, std::vector<double> values, double noise) {
  os::EvalConfig cfg;
  cfg.axis = axis;
  cfg.values = std::move(values);
  cfg.trials = 20;
  cfg.master_seeds.clear();
  for (std::uint64_t s = 1; s <= 10; ++s) cfg.master_seeds.push_back(s);
  cfg.settings.noise = {noise, noise, noise > 0 ? 10 : 0};
  cfg.settings.cost_budget = 1e6;
  cfg.settings.target_duration_hours = 1.0;
  return cfg;
}

std::vector<double> medians(const os::EvalReport& r) {
  std::vector<double> m;
  for (const auto& p : r.points) m.push_back(p.median);
  return m;
}

int rises(const std::vector<double>& v) {
  int n = 0;
  for (std::size_t i = 1; i < v.size(); ++i) n += v[i] > v[i - 1];
  return n;
}

int falls(const std::vector<double>& v) {
  int n = 0;
  for (std::size_t i = 1; i < v.size(); ++i) n += v[i] < v[i - 1];
  return n;
}

}  // namespace

TEST_CASE("size noise statistics") {
  std::mt19937_64 rng(99);
  const int n = 10'000;
  std::vector<double> draws;
  for (int i = 0; i < n; ++i) draws.push_back(double(os::sample_positive(200'000'000, 0.1, rng)));
  double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / n;
  double var = 0;
  for (double d : draws) var += (d - mean) * (d - mean);
  double sd = std::sqrt(var / (n - 1));
  CHECK(std::abs(mean - 200e6) < 0.01 * 200e6);
  CHECK(std::abs(sd - 20e6) < 0.1 * 20e6);
}

TEST_CASE("sample_positive edge cases") {
  std::mt19937_64 rng(3);
  CHECK(os::sample_positive(12345, 0.0, rng) == 12345);
  for (int i = 0; i < 1000; ++i) CHECK(os::sample_positive(1000, 5.0, rng) >= 100);
}

TEST_CASE("perturbation") {
  const auto& base = synthetic();
  std::mt19937_64 a(1), b(1);
  CHECK(os::perturb(base, os::NoiseModel::none(), a) == base);
  os::NoiseModel noise{0.1, 0.1, 10};
  std::mt19937_64 r1(8), r2(8);
  auto p1 = os::perturb(base, noise, r1);
  auto p2 = os::perturb(base, noise, r2);
  CHECK(p1 == p2);
  CHECK_FALSE(p1 == base);
  CHECK(p1.time == base.time);
  CHECK(p1.stations == base.stations);
  int diff = p1.target->initial_queue.units - base.target->initial_queue.units;
  CHECK(std::abs(diff) <= 10);
  for (const auto& [sat, units] : p1.trace.units) {
    const auto& orig = base.trace.units.at(sat);
    REQUIRE(units.size() == orig.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
      CHECK(units[i].unit_id == orig[i].unit_id);
      CHECK(units[i].capture_slot == orig[i].capture_slot);
      CHECK(units[i].size_bytes > 0);
    }
  }
  CHECK_THROWS_AS((os::NoiseModel{-0.1, 0, 0}.validate()), os::ValidationError);
}

TEST_CASE("extend_targets") {
  std::vector<std::string> fifo{"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  std::vector<std::string> mid{"d", "e", "f", "g"};
  CHECK(os::extend_targets(mid, fifo, 0) == mid);
  CHECK(os::extend_targets(mid, fifo, 2) == std::vector<std::string>{"b", "c", "d", "e", "f", "g", "h", "i"});
  std::vector<std::string> head{"a", "b"};
  CHECK(os::extend_targets(head, fifo, 3) == std::vector<std::string>{"a", "b", "c", "d", "e"});
  std::vector<std::string> tail{"j"};
  CHECK(os::extend_targets(tail, fifo, 2) == std::vector<std::string>{"h", "i", "j"});
}

TEST_CASE("S0 trials") {
  auto s0 = load("s0.json");
  std::mt19937_64 rng(1);
  auto ok = os::run_trial(s0, fixed_s0(1), rng);
  CHECK(ok.planned);
  CHECK(ok.success);
  CHECK_FALSE(ok.natural);
  CHECK(ok.cost == 1);
  CHECK(ok.planned_slots == std::vector<os::Slot>{2});
  CHECK(ok.targets == std::vector<std::string>{"init-2"});

  auto broke = os::run_trial(s0, fixed_s0(0), rng);
  CHECK_FALSE(broke.planned);
  CHECK_FALSE(broke.success);
  CHECK(broke.note.find("budget") != std::string::npos);

  auto ovf = load("s0ovf.json");
  auto settings = fixed_s0(10);
  settings.kind = os::AttackKind::Overflow;
  auto dropped = os::run_trial(ovf, settings, rng);
  CHECK(dropped.success);
  CHECK(dropped.planned_slots == std::vector<os::Slot>{4, 6});
}

TEST_CASE("without noise a planned attack always works") {
  os::EvalWorld world(synthetic());
  int planned = 0;
  for (auto kind : {os::AttackKind::Delay, os::AttackKind::Overflow}) {
    os::TrialSettings s;
    s.kind = kind;
    s.noise = os::NoiseModel::none();
    s.target_duration_hours = 1.0;
    for (std::uint64_t k = 0; k < 40; ++k) {
      std::mt19937_64 rng(os::trial_seed(5, os::SweepAxis::Base, k));
      auto r = os::run_trial(world, s, rng);
      CHECK(r.success == r.planned);
      planned += r.planned;
    }
  }
  CHECK(planned > 0);
}

TEST_CASE("trial seeds") {
  CHECK(os::trial_seed(1, os::SweepAxis::Budget, 0) == os::trial_seed(1, os::SweepAxis::Budget, 0));
  CHECK(os::trial_seed(1, os::SweepAxis::Budget, 0) != os::trial_seed(2, os::SweepAxis::Budget, 0));
  CHECK(os::trial_seed(1, os::SweepAxis::Budget, 0) != os::trial_seed(1, os::SweepAxis::NHigh, 0));
  CHECK(os::trial_seed(1, os::SweepAxis::Budget, 0) != os::trial_seed(1, os::SweepAxis::Budget, 1));
}

TEST_CASE("a one-trial sweep reports the trial verdict") {
  os::EvalConfig cfg;
  cfg.axis = os::SweepAxis::Base;
  cfg.values = {0};
  cfg.trials = 1;
  cfg.master_seeds = {11};
  cfg.settings.noise = os::NoiseModel::none();
  cfg.settings.target_duration_hours = 1.0;
  auto report = os::sweep(cfg, synthetic());
  std::mt19937_64 rng(os::trial_seed(11, os::SweepAxis::Base, 0));
  auto direct = os::run_trial(synthetic(), cfg.settings, rng);
  REQUIRE(report.trials.size() == 1);
  CHECK(report.trials[0].success == direct.success);
  CHECK(report.trials[0].planned_slots == direct.planned_slots);
  CHECK(report.points[0].successes == int(direct.success));
}

TEST_CASE("identical axis values give identical aggregates") {
  os::EvalConfig cfg;
  cfg.axis = os::SweepAxis::NoiseRatio;
  cfg.values = {0.2, 0.2};
  cfg.trials = 10;
  cfg.master_seeds = {3, 4};
  cfg.settings.target_duration_hours = 1.0;
  auto r = os::sweep(cfg, synthetic());
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[0].successes == r.points[1].successes);
  CHECK(r.points[0].median == r.points[1].median);
  CHECK(r.points[0].q1 == r.points[1].q1);
  CHECK(r.points[0].q3 == r.points[1].q3);
}

TEST_CASE("sweeps are deterministic and match the serial reference") {
  os::EvalConfig cfg;
  cfg.axis = os::SweepAxis::Budget;
  cfg.values = {10, 40};
  cfg.trials = 8;
  cfg.master_seeds = {21, 22};
  cfg.settings.target_duration_hours = 1.0;
  auto a = os::sweep(cfg, synthetic());
  auto b = os::sweep(cfg, synthetic());
  auto s = os::sweep_serial(cfg, synthetic());
  CHECK(os::format_report_csv(a) == os::format_report_csv(b));
  CHECK(os::format_report_csv(a) == os::format_report_csv(s));
  CHECK(os::format_aggregate_csv(a) == os::format_aggregate_csv(s));
  CHECK(os::format_report_json(a) == os::format_report_json(s));
  auto csv = os::format_report_csv(a);
  CHECK(csv.rfind("axis,value,trial,success,natural,cost,planned_slots\nbudget,10,0,", 0) == 0);
  CHECK(os::format_aggregate_csv(a).rfind("axis,value,q1,median,q3,min,max,success_ratio\nbudget,10,", 0) == 0);
}

TEST_CASE("points that cannot be built are reported, not thrown") {
  os::EvalConfig cfg;
  cfg.axis = os::SweepAxis::NHigh;
  cfg.values = {2, 50};
  cfg.trials = 2;
  cfg.settings.target_duration_hours = 1.0;
  auto r = os::sweep(cfg, synthetic());
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[1].successes == 0);
  CHECK_FALSE(r.trials.back().note.empty());
}

TEST_CASE("quantiles") {
  std::vector<double> v{1, 2, 3, 4};
  CHECK(os::quantile(v, 0) == 1);
  CHECK(os::quantile(v, 1) == 4);
  CHECK(os::quantile(v, 0.5) == 2.5);
  CHECK(os::quantile(v, 0.25) == doctest::Approx(1.75));
  std::vector<double> one{7};
  CHECK(os::quantile(one, 0.3) == 7);
}

TEST_CASE("sweep points") {
  const auto& base = synthetic();
  auto img = os::scenario_for_point(base, os::SweepAxis::ImageSize, 100);
  for (const auto& [sat, units] : img.trace.units)
    for (const auto& u : units) CHECK(u.size_bytes == 100'000'000);
  CHECK(img.target->initial_queue.unit_bytes == 100'000'000);
  auto rate = os::scenario_for_point(base, os::SweepAxis::DataRate, 80);
  for (const auto* s : rate.low_priority()) CHECK(s->downlink_rate_bps == 80'000'000);
  auto few = os::scenario_for_point(base, os::SweepAxis::NHigh, 5);
  CHECK(few.high_priority().size() == 5);
  CHECK(few.high_priority()[0]->id == base.high_priority()[0]->id);
  CHECK_THROWS_AS(os::scenario_for_point(base, os::SweepAxis::NHigh, 21), os::ValidationError);
  CHECK_THROWS_AS(os::validate_axis_value(os::SweepAxis::NoiseRatio, -0.1), os::ValidationError);
  CHECK_THROWS_AS(os::validate_axis_value(os::SweepAxis::Budget, -1), os::ValidationError);
  auto s = os::settings_for_point({}, os::SweepAxis::ExtraM, 3);
  CHECK(s.extra_m == 3);
  CHECK(os::settings_for_point({}, os::SweepAxis::TargetDuration, 6).target_duration_hours == 6);
  CHECK(os::parse_sweep_axis("extra_M") == os::SweepAxis::ExtraM);
  CHECK(os::to_string(os::SweepAxis::NHigh) == "n_high");
  CHECK_THROWS(os::parse_sweep_axis("colour"));
}

TEST_CASE("success trends on the synthetic scenario") {
  const auto& base = synthetic();
  SUBCASE("more high-priority satellites help") {
    auto m = medians(os::sweep(curve(os::SweepAxis::NHigh, {1, 5, 20}, 0), base));
    CHECK(falls(m) == 0);
    CHECK(m.back() > m.front());
  }
  SUBCASE("longer delays are harder") {
    auto m = medians(os::sweep(curve(os::SweepAxis::TargetDuration, {0.5, 1, 2, 4}, 0), base));
    CHECK(rises(m) <= 1);
    CHECK(m.back() < m.front());
  }
  SUBCASE("widening the target helps under noise") {
    auto m = medians(os::sweep(curve(os::SweepAxis::ExtraM, {0, 3}, 0.1), base));
    CHECK(m[1] >= m[0]);
  }
}

TEST_CASE("noise does not raise the success ratio") {
  // Paired trials share seeds; a bootstrap over pairs bounds the difference.
  auto r = os::sweep(curve(os::SweepAxis::NoiseRatio, {0, 0.2}, 0), synthetic());
  const std::size_t n = r.trials.size() / 2;
  std::vector<int> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = int(r.trials[n + i].success) - int(r.trials[i].success);
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> means;
  for (int b = 0; b < 2000; ++b) {
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += diff[pick(rng)];
    means.push_back(sum / double(n));
  }
  std::sort(means.begin(), means.end());
  CHECK(os::quantile(means, 0.025) <= 0.0);
  CHECK(r.points[1].success_ratio <= r.points[0].success_ratio);
}
