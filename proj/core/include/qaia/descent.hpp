#pragma once

#include <cstddef>
#include <vector>

#include "qaia/model.hpp"

namespace qaia {

struct DescentOutcome {
  SpinConfig config;
  double energy = 0.0;
  std::size_t flips_applied = 0;
  std::vector<std::size_t> flip_trace;  // filled only when requested
};

// Greedy single-flip descent: repeatedly flips the spin with the most negative
// flip_delta (lowest index on ties) until no flip lowers the energy by more
// than kEnergyTolerance.
DescentOutcome steepest_descent(const IsingInstance& inst, const SpinConfig& start,
                                bool record_trace = false);

// True iff no single flip lowers the energy by more than kEnergyTolerance.
bool is_local_minimum(const IsingInstance& inst, const SpinConfig& cfg);

}  // namespace qaia
