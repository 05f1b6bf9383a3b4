#include "qaia/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace qaia {

namespace {

std::string join_violations(const std::vector<Violation>& violations) {
  std::ostringstream os;
  os << "invalid Ising instance:";
  for (const auto& v : violations) os << "\n  " << v.message;
  return os.str();
}

void check_index(const IsingInstance& inst, std::size_t i) {
  if (i >= inst.size()) {
    throw std::out_of_range("spin index " + std::to_string(i) + " out of range for n=" +
                            std::to_string(inst.size()));
  }
}

void check_dims(const IsingInstance& inst, const SpinConfig& cfg) {
  if (cfg.size() != inst.size()) {
    throw InstanceError("configuration has " + std::to_string(cfg.size()) +
                        " spins, instance has " + std::to_string(inst.size()));
  }
}

}  // namespace

std::vector<Violation> validate(const InstanceData& data) {
  std::vector<Violation> out;
  auto add = [&out](Violation::Kind kind, std::size_t entry, std::string msg) {
    out.push_back({kind, entry, std::move(msg)});
  };

  if (data.n == 0) add(Violation::Kind::zero_spins, 0, "instance has zero spins");
  if (data.h.size() != data.n) {
    add(Violation::Kind::field_length, 0,
        "field vector has length " + std::to_string(data.h.size()) + ", expected " +
            std::to_string(data.n));
  }
  for (std::size_t i = 0; i < data.h.size(); ++i) {
    if (!std::isfinite(data.h[i])) {
      add(Violation::Kind::non_finite_field, i, "non-finite field at index " + std::to_string(i));
    }
  }
  if (!std::isfinite(data.offset)) add(Violation::Kind::non_finite_offset, 0, "non-finite offset");

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t k = 0; k < data.couplings.size(); ++k) {
    const auto& c = data.couplings[k];
    const std::string where = " at entry " + std::to_string(k);
    if (c.i == c.j) {
      add(Violation::Kind::diagonal_coupling, k, "diagonal coupling" + where);
      continue;
    }
    if (c.i >= data.n || c.j >= data.n) {
      add(Violation::Kind::index_out_of_range, k, "coupling index out of range" + where);
      continue;
    }
    if (!std::isfinite(c.value)) {
      add(Violation::Kind::non_finite_coupling, k, "non-finite coupling" + where);
    }
    if (!seen.insert(std::minmax(c.i, c.j)).second) {
      add(Violation::Kind::duplicate_pair, k,
          "duplicate pair (" + std::to_string(std::min(c.i, c.j)) + ", " +
              std::to_string(std::max(c.i, c.j)) + ")" + where);
    }
  }

  const auto& m = data.metadata;
  if (m.r && *m.r < 1) add(Violation::Kind::bad_metadata, 0, "metadata r must be >= 1");
  auto finite_opt = [&](const std::optional<double>& v, const char* name) {
    if (v && !std::isfinite(*v)) {
      add(Violation::Kind::bad_metadata, 0, std::string("non-finite metadata ") + name);
    }
  };
  finite_opt(m.bond_length, "bond_length");
  finite_opt(m.reference_energy, "reference_energy");
  finite_opt(m.dissociation_limit, "dissociation_limit");
  return out;
}

// ---------------------------------------------------------------------------

SpinConfig::SpinConfig(std::vector<std::int8_t> spins) : spins_(std::move(spins)) {
  for (std::size_t i = 0; i < spins_.size(); ++i) {
    if (spins_[i] != 1 && spins_[i] != -1) {
      throw InstanceError("spin " + std::to_string(i) + " is not +1 or -1");
    }
  }
}

SpinConfig SpinConfig::all_up(std::size_t n) { return SpinConfig(std::vector<std::int8_t>(n, 1)); }

SpinConfig SpinConfig::flipped(std::size_t i) const {
  SpinConfig out = *this;
  out.flip(i);
  return out;
}

SpinConfig SpinConfig::negated() const {
  SpinConfig out = *this;
  for (auto& s : out.spins_) s = static_cast<std::int8_t>(-s);
  return out;
}

std::string SpinConfig::to_string() const {
  std::string s;
  s.reserve(spins_.size());
  for (auto z : spins_) s.push_back(z > 0 ? '+' : '-');
  return s;
}

// ---------------------------------------------------------------------------

IsingInstance IsingInstance::create(InstanceData data) {
  if (auto violations = validate(data); !violations.empty()) {
    throw InstanceError(join_violations(violations));
  }

  IsingInstance inst;
  inst.n_ = data.n;
  inst.h_ = std::move(data.h);
  inst.offset_ = data.offset;
  inst.metadata_ = std::move(data.metadata);

  inst.couplings_.reserve(data.couplings.size());
  for (auto c : data.couplings) {
    if (c.i > c.j) std::swap(c.i, c.j);
    inst.couplings_.push_back(c);
  }
  std::sort(inst.couplings_.begin(), inst.couplings_.end(),
            [](const Coupling& a, const Coupling& b) {
              return std::pair(a.i, a.j) < std::pair(b.i, b.j);
            });

  std::vector<std::size_t> degree(inst.n_, 0);
  for (const auto& c : inst.couplings_) {
    ++degree[c.i];
    ++degree[c.j];
  }
  inst.row_start_.assign(inst.n_ + 1, 0);
  for (std::size_t i = 0; i < inst.n_; ++i) inst.row_start_[i + 1] = inst.row_start_[i] + degree[i];
  inst.adjacency_.resize(inst.row_start_.back());
  std::vector<std::size_t> fill(inst.row_start_.begin(), inst.row_start_.end() - 1);
  for (const auto& c : inst.couplings_) {
    inst.adjacency_[fill[c.i]++] = {c.j, c.value};
    inst.adjacency_[fill[c.j]++] = {c.i, c.value};
  }
  for (std::size_t i = 0; i < inst.n_; ++i) {
    std::sort(inst.adjacency_.begin() + static_cast<std::ptrdiff_t>(inst.row_start_[i]),
              inst.adjacency_.begin() + static_cast<std::ptrdiff_t>(inst.row_start_[i + 1]),
              [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
  }
  return inst;
}

InstanceData IsingInstance::data() const {
  return InstanceData{n_, h_, couplings_, offset_, metadata_};
}

IsingInstance IsingInstance::with_metadata(InstanceMetadata metadata) const {
  auto d = data();
  d.metadata = std::move(metadata);
  return create(std::move(d));
}

void IsingInstance::couple(std::span<const double> v, std::span<double> out) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (const auto& nb : neighbors(i)) acc += nb.weight * v[nb.index];
    out[i] = acc;
  }
}

// ---------------------------------------------------------------------------

double energy(const IsingInstance& inst, const SpinConfig& cfg) {
  check_dims(inst, cfg);
  double e = inst.offset();
  const auto h = inst.fields();
  for (std::size_t i = 0; i < inst.size(); ++i) e += h[i] * cfg[i];
  for (const auto& c : inst.couplings()) e += c.value * cfg[c.i] * cfg[c.j];
  return e;
}

double local_field(const IsingInstance& inst, const SpinConfig& cfg, std::size_t i) {
  check_dims(inst, cfg);
  check_index(inst, i);
  double f = inst.fields()[i];
  for (const auto& nb : inst.neighbors(i)) f += nb.weight * cfg[nb.index];
  return f;
}

double flip_delta(const IsingInstance& inst, const SpinConfig& cfg, std::size_t i) {
  const double f = local_field(inst, cfg, i);
  return -2.0 * cfg[i] * f;
}

IsingInstance qubo_to_ising(const std::vector<std::vector<double>>& q, double constant) {
  const std::size_t n = q.size();
  if (n == 0) throw InstanceError("QUBO matrix is empty");
  for (std::size_t i = 0; i < n; ++i) {
    if (q[i].size() != n) {
      throw InstanceError("QUBO matrix is not square: row " + std::to_string(i) + " has " +
                          std::to_string(q[i].size()) + " entries, expected " +
                          std::to_string(n));
    }
    for (double v : q[i]) {
      if (!std::isfinite(v)) throw InstanceError("QUBO matrix has a non-finite entry");
    }
  }
  if (!std::isfinite(constant)) throw InstanceError("QUBO constant is not finite");

  // x_i = (1 + z_i)/2:  x_i^2 = x_i = (1 + z_i)/2,
  // x_i x_j = (1 + z_i + z_j + z_i z_j)/4.
  InstanceData d;
  d.n = n;
  d.h.assign(n, 0.0);
  d.offset = constant;
  for (std::size_t i = 0; i < n; ++i) {
    d.h[i] += 0.5 * q[i][i];
    d.offset += 0.5 * q[i][i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = 0.25 * (q[i][j] + q[j][i]);
      if (w == 0.0) continue;
      d.h[i] += w;
      d.h[j] += w;
      d.offset += w;
      d.couplings.push_back({i, j, w});
    }
  }
  return IsingInstance::create(std::move(d));
}

double qubo_value(const std::vector<std::vector<double>>& q, double constant,
                  std::span<const std::uint8_t> x) {
  double v = constant;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!x[i]) continue;
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (x[j]) v += q[i][j];
    }
  }
  return v;
}

double coupling_rms(const IsingInstance& inst) {
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (const auto& c : inst.couplings()) {
    if (c.value == 0.0) continue;
    sum_sq += c.value * c.value;
    ++count;
  }
  return count == 0 ? 1.0 : std::sqrt(sum_sq / static_cast<double>(count));
}

}  // namespace qaia
