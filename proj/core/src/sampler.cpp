#include "qaia/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <variant>

#include "qaia/descent.hpp"

namespace qaia {

namespace {

using Clock = std::chrono::steady_clock;

struct ShotSlot {
  std::optional<ShotResult> result;
  std::optional<DivergedShot> failure;
};

ShotSlot run_one(const IsingInstance& inst, const SamplingPlan& plan, std::size_t index) {
  const std::uint64_t seed = split_seed(plan.base_seed, index);
  try {
    if (plan.apply_descent) {
      return {single_shot_plus_descent(inst, plan.variant, plan.params, seed), std::nullopt};
    }
    return {run_shot(plan.variant, inst, plan.params, seed), std::nullopt};
  } catch (const DivergenceError& err) {
    return {std::nullopt, DivergedShot{index, err.step(), err.what()}};
  }
}

std::size_t resolve_workers(const SamplingPlan& plan) {
  std::size_t w = plan.worker_limit.value_or(std::thread::hardware_concurrency());
  if (w == 0) w = 1;
  return std::min(w, plan.shots);
}

}  // namespace

std::uint64_t split_seed(std::uint64_t base_seed, std::uint64_t shot_index) {
  std::uint64_t z = base_seed + (shot_index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void check_plan(const SamplingPlan& plan) {
  if (plan.shots == 0) throw std::invalid_argument("sampling plan needs at least one shot");
  if (plan.worker_limit && *plan.worker_limit == 0) {
    throw std::invalid_argument("worker limit must be positive");
  }
  if (!(plan.hit_tolerance >= 0.0)) throw std::invalid_argument("hit tolerance must be >= 0");
  check_params(plan.variant, plan.params);
}

EnsembleReport run_ensemble(const IsingInstance& inst, const SamplingPlan& plan,
                            std::optional<double> reference) {
  check_plan(plan);
  const auto start = Clock::now();

  std::vector<ShotSlot> slots(plan.shots);
  const std::size_t workers = resolve_workers(plan);
  if (workers <= 1) {
    for (std::size_t i = 0; i < plan.shots; ++i) slots[i] = run_one(inst, plan, i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < plan.shots; i = next.fetch_add(1)) {
          slots[i] = run_one(inst, plan, i);
        }
      });
    }
  }

  EnsembleReport report;
  report.energies.assign(plan.shots, std::numeric_limits<double>::quiet_NaN());
  std::optional<std::size_t> best_index;
  std::chrono::nanoseconds shot_time_sum{0};
  std::size_t completed = 0;
  for (std::size_t i = 0; i < plan.shots; ++i) {
    auto& slot = slots[i];
    if (!slot.result) {
      report.diverged.push_back(*slot.failure);
      continue;
    }
    const auto& r = *slot.result;
    report.energies[i] = r.energy;
    shot_time_sum += r.wall_time;
    if (completed == 0) {
      report.shot_min_wall_time = report.shot_max_wall_time = r.wall_time;
    } else {
      report.shot_min_wall_time = std::min(report.shot_min_wall_time, r.wall_time);
      report.shot_max_wall_time = std::max(report.shot_max_wall_time, r.wall_time);
    }
    ++completed;
    if (!best_index || r.energy < slots[*best_index].result->energy) best_index = i;
  }
  if (!best_index) {
    const auto& first = report.diverged.front();
    throw DivergenceError(first.step, "all " + std::to_string(plan.shots) +
                                          " shots diverged; first: " + first.message);
  }
  report.best = std::move(*slots[*best_index].result);

  report.reference_energy = reference ? reference : inst.metadata().reference_energy;
  if (report.reference_energy) {
    report.hit_count = count_hits(report, *report.reference_energy, plan.hit_tolerance);
    report.samples_to_first_hit =
        samples_to_solution(report, *report.reference_energy, plan.hit_tolerance);
  }
  report.per_shot_mean_wall_time = shot_time_sum / static_cast<std::int64_t>(completed);
  report.total_wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return report;
}

std::optional<std::size_t> samples_to_solution(const EnsembleReport& report, double reference,
                                               double tol) {
  for (std::size_t i = 0; i < report.energies.size(); ++i) {
    if (report.energies[i] <= reference + tol) return i + 1;
  }
  return std::nullopt;
}

std::size_t count_hits(const EnsembleReport& report, double reference, double tol) {
  return static_cast<std::size_t>(
      std::count_if(report.energies.begin(), report.energies.end(),
                    [&](double e) { return e <= reference + tol; }));
}

double mean_energy(const EnsembleReport& report) {
  double sum = 0.0;
  std::size_t count = 0;
  for (double e : report.energies) {
    if (std::isnan(e)) continue;
    sum += e;
    ++count;
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(count);
}

ShotResult single_shot_plus_descent(const IsingInstance& inst, Variant variant,
                                    const SolverParams& params, std::uint64_t seed) {
  const auto start = Clock::now();
  ShotResult shot = run_shot(variant, inst, params, seed);
  auto refined = steepest_descent(inst, shot.config);
  shot.raw_energy_before_descent = shot.energy;
  shot.config = std::move(refined.config);
  shot.energy = refined.energy;
  shot.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return shot;
}

TtsStats measure_tts(const IsingInstance& inst, const SamplingPlan& plan) {
  const auto report = run_ensemble(inst, plan);
  TtsStats s;
  s.total = report.total_wall_time;
  s.per_shot_mean = report.per_shot_mean_wall_time;
  s.shot_min = report.shot_min_wall_time;
  s.shot_max = report.shot_max_wall_time;
  s.shots = plan.shots;
  s.best_energy = report.best.energy;
  return s;
}

}  // namespace qaia
