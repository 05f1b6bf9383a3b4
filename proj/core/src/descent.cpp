#include "qaia/descent.hpp"

namespace qaia {

namespace {

void check_dims(const IsingInstance& inst, const SpinConfig& cfg) {
  if (cfg.size() != inst.size()) {
    throw InstanceError("configuration has " + std::to_string(cfg.size()) +
                        " spins, instance has " + std::to_string(inst.size()));
  }
}

}  // namespace

DescentOutcome steepest_descent(const IsingInstance& inst, const SpinConfig& start,
                                bool record_trace) {
  check_dims(inst, start);
  const std::size_t n = inst.size();

  DescentOutcome out;
  out.config = start;
  std::vector<double> field(n);
  for (std::size_t i = 0; i < n; ++i) field[i] = local_field(inst, start, i);

  for (;;) {
    std::size_t best = n;
    double best_delta = -kEnergyTolerance;
    for (std::size_t i = 0; i < n; ++i) {
      const double delta = -2.0 * out.config[i] * field[i];
      if (delta < best_delta) {
        best_delta = delta;
        best = i;
      }
    }
    if (best == n) break;

    out.config.flip(best);
    const double change = 2.0 * out.config[best];
    for (const auto& nb : inst.neighbors(best)) field[nb.index] += nb.weight * change;
    ++out.flips_applied;
    if (record_trace) out.flip_trace.push_back(best);
  }

  out.energy = energy(inst, out.config);
  return out;
}

bool is_local_minimum(const IsingInstance& inst, const SpinConfig& cfg) {
  check_dims(inst, cfg);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (flip_delta(inst, cfg, i) < -kEnergyTolerance) return false;
  }
  return true;
}

}  // namespace qaia
