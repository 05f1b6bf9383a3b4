#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qaia {

// Absolute tolerance used for every energy comparison in the library.
inline constexpr double kEnergyTolerance = 1e-9;

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InstanceMetadata {
  std::string label;
  std::optional<double> bond_length;
  std::optional<int> r;
  std::optional<double> reference_energy;
  std::optional<double> dissociation_limit;

  bool operator==(const InstanceMetadata&) const = default;
};

struct Coupling {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;

  bool operator==(const Coupling&) const = default;
};

// Unvalidated instance data as it arrives from a file or a generator.
// IsingInstance::create() is the only way to turn it into a usable instance.
struct InstanceData {
  std::size_t n = 0;
  std::vector<double> h;
  std::vector<Coupling> couplings;
  double offset = 0.0;
  InstanceMetadata metadata;
};

struct Violation {
  enum class Kind {
    zero_spins,
    field_length,
    non_finite_field,
    non_finite_offset,
    diagonal_coupling,
    index_out_of_range,
    duplicate_pair,
    non_finite_coupling,
    bad_metadata,
  };
  Kind kind;
  std::size_t entry = 0;  // index into h or couplings, where meaningful
  std::string message;
};

// Every invariant violation in `data`; empty means the data is valid.
std::vector<Violation> validate(const InstanceData& data);

class SpinConfig {
 public:
  SpinConfig() = default;
  // Throws InstanceError if any entry is not exactly +1 or -1.
  explicit SpinConfig(std::vector<std::int8_t> spins);
  static SpinConfig all_up(std::size_t n);

  std::size_t size() const { return spins_.size(); }
  std::int8_t operator[](std::size_t i) const { return spins_[i]; }
  std::span<const std::int8_t> spins() const { return spins_; }

  void flip(std::size_t i) { spins_[i] = static_cast<std::int8_t>(-spins_[i]); }
  SpinConfig flipped(std::size_t i) const;
  SpinConfig negated() const;

  std::string to_string() const;  // "+-+" form

  auto operator<=>(const SpinConfig&) const = default;

 private:
  std::vector<std::int8_t> spins_;
};

// Ising problem E(z) = offset + sum_i h_i z_i + sum_{i<j} J_ij z_i z_j.
// Immutable after construction; safe to share across threads.
class IsingInstance {
 public:
  // Throws InstanceError listing every violation when `data` is invalid.
  // Couplings are canonicalized to i < j and sorted by (i, j).
  static IsingInstance create(InstanceData data);

  std::size_t size() const { return n_; }
  std::span<const double> fields() const { return h_; }
  std::span<const Coupling> couplings() const { return couplings_; }
  double offset() const { return offset_; }
  const InstanceMetadata& metadata() const { return metadata_; }

  InstanceData data() const;
  IsingInstance with_metadata(InstanceMetadata metadata) const;

  // out_i = sum_j J_ij v_j with J treated as symmetric. out must have size n.
  void couple(std::span<const double> v, std::span<double> out) const;

  struct Neighbor {
    std::size_t index;
    double weight;
  };
  std::span<const Neighbor> neighbors(std::size_t i) const {
    return {adjacency_.data() + row_start_[i], adjacency_.data() + row_start_[i + 1]};
  }

 private:
  IsingInstance() = default;

  std::size_t n_ = 0;
  std::vector<double> h_;
  std::vector<Coupling> couplings_;
  double offset_ = 0.0;
  InstanceMetadata metadata_;
  // Symmetric CSR view of the couplings, ordered by neighbor index per row.
  std::vector<std::size_t> row_start_;
  std::vector<Neighbor> adjacency_;
};

double energy(const IsingInstance& inst, const SpinConfig& cfg);

// h_i + sum_{j != i} J_ij z_j
double local_field(const IsingInstance& inst, const SpinConfig& cfg, std::size_t i);

// E(cfg with spin i flipped) - E(cfg), i.e. -2 z_i * local_field.
double flip_delta(const IsingInstance& inst, const SpinConfig& cfg, std::size_t i);

// Ising instance equivalent to x^T Q x + constant under x_i = (1 + z_i) / 2.
IsingInstance qubo_to_ising(const std::vector<std::vector<double>>& q, double constant);

// Binary quadratic form x^T Q x + constant, x_i in {0, 1}.
double qubo_value(const std::vector<std::vector<double>>& q, double constant,
                  std::span<const std::uint8_t> x);

// RMS of the nonzero coupling magnitudes; 1.0 when there are none.
double coupling_rms(const IsingInstance& inst);

}  // namespace qaia
