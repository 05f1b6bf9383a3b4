#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qaia/model.hpp"

namespace qaia {

// Solver families. The three CIM emulations differ in their error-feedback law:
//   cac - error driven by the soft-spin amplitude
//   cfc - error driven by the feedback (mean) field
//   sfc - linear error tracking with a tanh output nonlinearity
//   dsb - discrete simulated bifurcation with inelastic walls at +-1
enum class Variant { cac, cfc, sfc, dsb };

inline constexpr Variant kAllVariants[] = {Variant::cac, Variant::cfc, Variant::sfc, Variant::dsb};

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view name);
bool is_cim(Variant v);

struct CimParams {
  double p_end = 2.0;  // gain at the end of the linear pump ramp
  double alpha = 1.0;  // target amplitude
  double beta = 0.3;   // error-variable rate
  double zeta = 1.0;   // coupling strength (auto-scaled by default_params)
  double c = 1.0;      // sfc: tanh steepness
  double k = 0.1;      // sfc: mean-field tracking gain
  double dt = 0.05;
  std::int64_t steps = 2000;
  double noise_sigma0 = 0.1;
  double noise_per_step = 0.0;
  double amplitude_clamp = 1.5;

  bool operator==(const CimParams&) const = default;
};

struct SbParams {
  double a0 = 1.0;  // detuning; the pump a(t) ramps linearly 0 -> a0
  double c0 = 1.0;  // coupling strength (auto-scaled by default_params)
  double dt = 0.25;
  std::int64_t steps = 1000;
  double noise_sigma0 = 0.1;

  bool operator==(const SbParams&) const = default;
};

using SolverParams = std::variant<CimParams, SbParams>;

// Bounds applied to the multiplicative cac/cfc error variables after each step.
inline constexpr double kErrorFloor = 1e-4;
inline constexpr double kErrorCeiling = 1e4;

class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Integration produced a non-finite value.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::int64_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

// Defaults with zeta = 1/(rms_J sqrt(n)) and c0 = a0/(2 rms_J sqrt(n)).
SolverParams default_params(Variant variant, const IsingInstance& inst);

// Throws ParamError when params do not match the variant or are out of range.
void check_params(Variant variant, const SolverParams& params);

// Names accepted by apply_override for the given variant.
std::vector<std::string> param_names(Variant variant);
// Sets one named field from text. Throws ParamError naming an unknown key or bad value.
void apply_override(SolverParams& params, std::string_view key, std::string_view value);

// Linear ramp end_value * t / t_total.
double pump_schedule(double t, double t_total, double end_value);

struct SolverState {
  std::vector<double> x;         // soft spins / oscillator positions
  std::vector<double> e;         // error variables (cim variants)
  std::vector<double> momentum;  // dsb only
  double t = 0.0;
  std::int64_t step_index = 0;
  // Set by step_dsb: 1 where the wall fired during the last step.
  std::vector<std::uint8_t> wall_fired;
  // Scratch for the coupling product; contents are not part of the state.
  std::vector<double> scratch;
};

// Fresh state: x ~ N(0, noise_sigma0), e = 1, momentum = 0.
SolverState initial_state(Variant variant, std::size_t n, const SolverParams& params,
                          std::mt19937_64& rng);

// One fixed-step update each. The pump value is taken from state.t on a ramp
// of length params.dt * params.steps. `noise` is only consulted when
// noise_per_step > 0. All throw DivergenceError on non-finite results.
void step_cac(SolverState& state, const IsingInstance& inst, const CimParams& params, double dt,
              std::mt19937_64* noise = nullptr);
void step_cfc(SolverState& state, const IsingInstance& inst, const CimParams& params, double dt,
              std::mt19937_64* noise = nullptr);
void step_sfc(SolverState& state, const IsingInstance& inst, const CimParams& params, double dt,
              std::mt19937_64* noise = nullptr);
void step_dsb(SolverState& state, const IsingInstance& inst, const SbParams& params, double dt);

using StepObserver = std::function<void(const SolverState&)>;

// Runs params.steps steps from `state`, calling `observer` after each one.
void integrate(Variant variant, const IsingInstance& inst, const SolverParams& params,
               SolverState& state, std::mt19937_64& rng, const StepObserver& observer = {});

// sign(x) with exact zeros resolved by a draw from rng.
SpinConfig binarize(std::span<const double> x, std::mt19937_64& rng);

struct ShotResult {
  SpinConfig config;
  double energy = 0.0;
  std::optional<double> raw_energy_before_descent;
  std::int64_t steps_run = 0;
  std::chrono::nanoseconds wall_time{0};
  std::uint64_t seed = 0;
};

// Seeded single trajectory: initial_state -> integrate -> binarize.
ShotResult run_shot(Variant variant, const IsingInstance& inst, const SolverParams& params,
                    std::uint64_t seed, const StepObserver& observer = {});

}  // namespace qaia
