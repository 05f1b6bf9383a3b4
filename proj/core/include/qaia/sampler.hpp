#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qaia/model.hpp"
#include "qaia/solvers.hpp"

namespace qaia {

inline constexpr double kDefaultHitTolerance = 1e-6;

struct SamplingPlan {
  Variant variant = Variant::cfc;
  SolverParams params;
  std::size_t shots = 1;
  std::uint64_t base_seed = 0;
  bool apply_descent = true;
  std::optional<std::size_t> worker_limit;  // default: hardware concurrency
  double hit_tolerance = kDefaultHitTolerance;
};

struct DivergedShot {
  std::size_t shot_index;
  std::int64_t step;
  std::string message;
};

struct EnsembleReport {
  ShotResult best;
  // Per-shot energies in shot order; NaN marks a diverged shot.
  std::vector<double> energies;
  std::vector<DivergedShot> diverged;
  std::optional<double> reference_energy;
  std::size_t hit_count = 0;
  std::optional<std::size_t> samples_to_first_hit;
  std::chrono::nanoseconds total_wall_time{0};
  std::chrono::nanoseconds per_shot_mean_wall_time{0};
  std::chrono::nanoseconds shot_min_wall_time{0};
  std::chrono::nanoseconds shot_max_wall_time{0};
};

// Per-shot seed: splitmix64 finalizer applied to base_seed + (shot_index + 1) * golden gamma.
std::uint64_t split_seed(std::uint64_t base_seed, std::uint64_t shot_index);

// Throws std::invalid_argument for an unusable plan.
void check_plan(const SamplingPlan& plan);

// Runs plan.shots independent shots (optionally refined by steepest descent).
// The report is independent of worker count. Hits are scored against the
// instance's metadata.reference_energy unless `reference` is given. Throws
// DivergenceError only when every shot diverged.
EnsembleReport run_ensemble(const IsingInstance& inst, const SamplingPlan& plan,
                            std::optional<double> reference = std::nullopt);

// 1-based index of the first energy <= reference + tol, scanning in shot order.
std::optional<std::size_t> samples_to_solution(const EnsembleReport& report, double reference,
                                               double tol);

// Shots whose energy is <= reference + tol.
std::size_t count_hits(const EnsembleReport& report, double reference, double tol);

double mean_energy(const EnsembleReport& report);

// run_shot followed by steepest_descent; raw_energy_before_descent is set.
ShotResult single_shot_plus_descent(const IsingInstance& inst, Variant variant,
                                    const SolverParams& params, std::uint64_t seed);

struct TtsStats {
  std::chrono::nanoseconds total{0};
  std::chrono::nanoseconds per_shot_mean{0};
  std::chrono::nanoseconds shot_min{0};
  std::chrono::nanoseconds shot_max{0};
  std::size_t shots = 0;
  double best_energy = 0.0;
};

// Wall-clock timing of a full ensemble (integration, descent, aggregation).
TtsStats measure_tts(const IsingInstance& inst, const SamplingPlan& plan);

}  // namespace qaia
