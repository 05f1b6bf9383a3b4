#include "qaia/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qaia/descent.hpp"

namespace qaia {

namespace {

// Re-derive the running energy and fields from scratch this often so that
// incremental rounding cannot accumulate over millions of flips.
constexpr std::uint64_t kResyncInterval = std::uint64_t{1} << 16;

void resync(const IsingInstance& inst, const SpinConfig& cfg, double& e,
            std::vector<double>& field) {
  e = energy(inst, cfg);
  for (std::size_t i = 0; i < inst.size(); ++i) field[i] = local_field(inst, cfg, i);
}

}  // namespace

SpinConfig config_from_mask(std::uint64_t mask, std::size_t n) {
  std::vector<std::int8_t> spins(n);
  for (std::size_t i = 0; i < n; ++i) spins[i] = ((mask >> i) & 1u) ? -1 : 1;
  return SpinConfig(std::move(spins));
}

ExactSolution brute_force(const IsingInstance& inst) {
  const std::size_t n = inst.size();
  if (n > kBruteForceMaxSpins) {
    throw OracleCapError("brute force refuses n=" + std::to_string(n) + " (cap is " +
                         std::to_string(kBruteForceMaxSpins) + " spins)");
  }
  const std::uint64_t total = std::uint64_t{1} << n;

  SpinConfig cfg = SpinConfig::all_up(n);
  std::vector<double> field(n);
  double e = 0.0;
  resync(inst, cfg, e, field);

  // Candidate minima are tracked by Gray-code mask with a loose window, then
  // re-evaluated exactly at the end.
  double best = e;
  std::vector<std::uint64_t> candidates{0};
  std::uint64_t gray = 0;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(k));
    gray ^= std::uint64_t{1} << bit;
    e += -2.0 * cfg[bit] * field[bit];
    cfg.flip(bit);
    const double change = 2.0 * cfg[bit];
    for (const auto& nb : inst.neighbors(bit)) field[nb.index] += nb.weight * change;
    if (k % kResyncInterval == 0) resync(inst, cfg, e, field);

    if (e < best - kEnergyTolerance) {
      best = e;
      candidates.clear();
      candidates.push_back(gray);
    } else if (e <= best + kEnergyTolerance) {
      best = std::min(best, e);
      candidates.push_back(gray);
    }
  }

  ExactSolution out;
  out.evaluations = total;
  std::vector<std::pair<double, SpinConfig>> exact;
  exact.reserve(candidates.size());
  for (auto mask : candidates) {
    auto c = config_from_mask(mask, n);
    const double ce = energy(inst, c);
    exact.emplace_back(ce, std::move(c));
  }
  double ground = exact.front().first;
  for (const auto& [ce, c] : exact) ground = std::min(ground, ce);
  out.ground_energy = ground;
  for (auto& [ce, c] : exact) {
    if (ce <= ground + kEnergyTolerance) out.ground_configs.push_back(std::move(c));
  }
  std::sort(out.ground_configs.begin(), out.ground_configs.end());
  return out;
}

std::vector<LocalMinimum> enumerate_local_minima(const IsingInstance& inst) {
  const std::size_t n = inst.size();
  if (n > kLocalMinimaMaxSpins) {
    throw OracleCapError("local-minimum enumeration refuses n=" + std::to_string(n) +
                         " (cap is " + std::to_string(kLocalMinimaMaxSpins) + " spins)");
  }
  std::vector<LocalMinimum> out;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    auto cfg = config_from_mask(mask, n);
    if (is_local_minimum(inst, cfg)) {
      const double e = energy(inst, cfg);
      out.push_back({std::move(cfg), e});
    }
  }
  std::sort(out.begin(), out.end(), [](const LocalMinimum& a, const LocalMinimum& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.config < b.config;
  });
  return out;
}

}  // namespace qaia
