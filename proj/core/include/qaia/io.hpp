#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qaia/model.hpp"
#include "qaia/oracle.hpp"
#include "qaia/sampler.hpp"

namespace qaia {

// Malformed document. line/column are 1-based and 0 when not applicable;
// `field` is a JSON-path-like locator such as "J[3]".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line, std::size_t column, std::string field);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- instances -------------------------------------------------------------

IsingInstance parse_instance(std::string_view text);

// Canonical text form: fixed key order and layout, couplings sorted by (i, j),
// shortest round-trip decimal for every real, offset always present.
std::string serialize_instance(const IsingInstance& inst);

// Shortest decimal text that parses back to exactly `v`.
std::string format_real(double v);

struct QuboProblem {
  std::vector<std::vector<double>> q;
  double constant = 0.0;
  InstanceMetadata metadata;
};

// {"Q": [[...], ...], "constant": c, "metadata": {...}}
QuboProblem parse_qubo(std::string_view text);

enum class InstanceKind { spin_glass, ferro_ring, ferro_complete };

std::optional<InstanceKind> parse_instance_kind(std::string_view name);
std::string_view to_string(InstanceKind kind);

// spin_glass: N(0,1) couplings on every pair, h = 0; ferro_ring: J = -1 on ring
// edges; ferro_complete: J = -1 on every pair. Deterministic in seed.
IsingInstance generate_random_instance(InstanceKind kind, std::size_t n, std::uint64_t seed);

// --- sweeps ----------------------------------------------------------------

struct ManifestEntry {
  std::string instance_path;  // relative paths resolve against the manifest directory
  double bond_length = 0.0;
  int r = 1;
};

struct SweepManifest {
  std::string label;
  std::vector<ManifestEntry> entries;
  std::vector<std::pair<double, double>> reference_curve;  // (bond_length, energy)
  std::optional<double> dissociation_limit;
};

SweepManifest parse_manifest(std::string_view text);
std::string serialize_manifest(const SweepManifest& manifest);

// Reference energy on the manifest's curve at exactly this bond length.
std::optional<double> curve_reference(const SweepManifest& manifest, double bond_length);

struct ProfilePoint {
  double bond_length = 0.0;
  int r = 1;
  std::optional<double> best_energy;  // empty for failed entries
  std::optional<double> mean_energy;
  std::optional<double> hit_rate;     // only with a reference energy
  double wall_ms = 0.0;
  std::string note;

  bool operator==(const ProfilePoint&) const = default;
};

// Outcome of one manifest entry: a report, or a note explaining the failure.
struct EntryReport {
  std::optional<EnsembleReport> report;
  std::string note;
};

inline constexpr std::string_view kProfileHeader =
    "bond_length,r,best_energy,mean_energy,hit_rate,wall_ms,note";

std::vector<ProfilePoint> make_profile(const SweepManifest& manifest,
                                       std::span<const EntryReport> reports);

// Header plus one row per entry, ordered by (r, bond_length).
std::string export_profile(const SweepManifest& manifest, std::span<const EntryReport> reports);
std::string format_profile(std::vector<ProfilePoint> points);
std::vector<ProfilePoint> parse_profile(std::string_view text);

// --- results ---------------------------------------------------------------

std::string serialize_report(const EnsembleReport& report, const SamplingPlan& plan,
                             const IsingInstance& inst);
std::string serialize_exact(const ExactSolution& solution, const IsingInstance& inst);
std::string serialize_params(const SolverParams& params);

// --- files -----------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temporary and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace qaia
