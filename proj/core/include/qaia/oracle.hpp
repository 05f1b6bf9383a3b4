#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qaia/model.hpp"

namespace qaia {

inline constexpr std::size_t kBruteForceMaxSpins = 24;
inline constexpr std::size_t kLocalMinimaMaxSpins = 16;

class OracleCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct ExactSolution {
  double ground_energy = 0.0;
  std::vector<SpinConfig> ground_configs;  // every degenerate minimum, sorted
  std::uint64_t evaluations = 0;           // 2^n
};

// Exhaustive Gray-code enumeration of all 2^n configurations. n <= 24.
ExactSolution brute_force(const IsingInstance& inst);

struct LocalMinimum {
  SpinConfig config;
  double energy;
};

// Every single-flip local minimum, ascending by energy then configuration. n <= 16.
std::vector<LocalMinimum> enumerate_local_minima(const IsingInstance& inst);

// Configuration for the bits of `mask`: bit i set means spin i is -1.
SpinConfig config_from_mask(std::uint64_t mask, std::size_t n);

}  // namespace qaia
