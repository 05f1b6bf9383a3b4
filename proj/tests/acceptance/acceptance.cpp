// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli/commands.hpp"
#include "qaia/descent.hpp"
#include "qaia/io.hpp"
#include "qaia/oracle.hpp"
#include "qaia/sampler.hpp"
#include "qaia/solvers.hpp"
#include "support/reference.hpp"

#ifndef QAIA_GOLDEN_DIR
#error "QAIA_GOLDEN_DIR must point at tests/acceptance/golden"
#endif

using namespace qaia;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::size_t kCorpusSize = 50;
constexpr std::uint64_t kCorpusSeed = 1000;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<IsingInstance> spin_glass_corpus() {
  std::vector<IsingInstance> out;
  for (std::size_t k = 0; k < kCorpusSize; ++k) {
    out.push_back(generate_random_instance(InstanceKind::spin_glass, 10, kCorpusSeed + k));
  }
  return out;
}

// Ground energies from the test-side dense enumerator, not the library oracle.
std::vector<double> corpus_grounds(const std::vector<IsingInstance>& corpus) {
  std::vector<double> g;
  for (const auto& inst : corpus) g.push_back(qaia::testing::naive_ground(inst).energy);
  return g;
}

Outcome ac1_multishot(const std::vector<IsingInstance>& corpus, const std::vector<double>& grounds) {
  const auto start = Clock::now();
  bool pass = true;
  std::ostringstream detail;
  for (auto v : kAllVariants) {
    std::size_t solved = 0;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
      SamplingPlan plan;
      plan.variant = v;
      plan.params = default_params(v, corpus[k]);
      plan.shots = 100;
      plan.base_seed = 7;
      plan.apply_descent = true;
      const auto rep = run_ensemble(corpus[k], plan);
      if (std::abs(rep.best.energy - grounds[k]) <= 1e-9) ++solved;
    }
    const std::size_t need = v == Variant::cfc ? corpus.size() : 48;
    pass = pass && solved >= need;
    detail << to_string(v) << ' ' << solved << '/' << corpus.size() << " (need " << need << "), ";
  }
  const double secs = seconds_since(start);
  pass = pass && secs < 60.0;
  detail << std::fixed;
  detail.precision(1);
  detail << secs << " s (budget 60 s)";
  return {pass, detail.str()};
}

Outcome ac2_single_shot() {
  bool pass = true;
  std::ostringstream detail;
  for (auto kind : {InstanceKind::ferro_ring, InstanceKind::ferro_complete}) {
    for (std::size_t n : {8u, 16u}) {
      const auto inst = generate_random_instance(kind, n, 0);
      const double ground = qaia::testing::naive_ground(inst).energy;
      detail << to_string(kind) << n << ':';
      for (auto v : kAllVariants) {
        const auto params = default_params(v, inst);
        std::size_t hits = 0;
        for (std::uint64_t s = 0; s < 100; ++s) {
          const auto r = single_shot_plus_descent(inst, v, params, split_seed(2024, s));
          if (std::abs(r.energy - ground) <= 1e-9) ++hits;
        }
        pass = pass && hits >= 90;
        detail << ' ' << to_string(v) << '=' << hits;
      }
      detail << "; ";
    }
  }
  detail << "need >= 90/100 each";
  return {pass, detail.str()};
}

Outcome ac3_descent() {
  std::mt19937_64 rng(31);
  std::size_t failures = 0, flips = 0;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    const auto inst = trial % 2 ? qaia::testing::random_instance(10, 70000 + trial, 0.5)
                                : generate_random_instance(InstanceKind::spin_glass, 10, 70000 + trial);
    const auto start = qaia::testing::random_config(10, rng);
    const auto out = steepest_descent(inst, start, true);
    flips += out.flips_applied;

    bool ok = is_local_minimum(inst, out.config);
    // independent check with the dense evaluator
    std::vector<int> z(out.config.spins().begin(), out.config.spins().end());
    const double e_out = qaia::testing::naive_energy(inst, z);
    for (std::size_t i = 0; i < 10 && ok; ++i) {
      z[i] = -z[i];
      ok = qaia::testing::naive_energy(inst, z) - e_out >= -kEnergyTolerance;
      z[i] = -z[i];
    }
    std::vector<int> walk(start.spins().begin(), start.spins().end());
    double prev = qaia::testing::naive_energy(inst, walk);
    for (auto i : out.flip_trace) {
      walk[i] = -walk[i];
      const double e = qaia::testing::naive_energy(inst, walk);
      ok = ok && e < prev;
      prev = e;
    }
    ok = ok && walk == z;

    const auto minima = enumerate_local_minima(inst);
    ok = ok && std::any_of(minima.begin(), minima.end(), [&](const LocalMinimum& m) { return m.config == out.config; });
    if (!ok) ++failures;
  }
  return {failures == 0, "1000 pairs at n=10, " + std::to_string(failures) + " failures, " + std::to_string(flips) +
                             " flips checked"};
}

Outcome ac4_dsb_walls() {
  std::size_t violations = 0, wall_events = 0, steps = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = generate_random_instance(InstanceKind::spin_glass, 16, 4000 + seed);
    const auto params = default_params(Variant::dsb, inst);
    run_shot(Variant::dsb, inst, params, split_seed(99, seed), [&](const SolverState& s) {
      ++steps;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!(std::abs(s.x[i]) <= 1.0)) ++violations;
        if (s.wall_fired[i]) {
          ++wall_events;
          if (s.momentum[i] != 0.0 || std::abs(s.x[i]) != 1.0) ++violations;
        }
      }
    });
  }
  return {violations == 0 && wall_events > 0, "100 runs at n=16, " + std::to_string(steps) + " steps, " +
                                                  std::to_string(wall_events) + " wall events, " +
                                                  std::to_string(violations) + " violations"};
}

bool same_bytes(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

Outcome ac5_determinism() {
  const std::size_t max_workers = std::max(1u, std::thread::hardware_concurrency());
  std::size_t mismatches = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const auto inst = generate_random_instance(InstanceKind::spin_glass, 8 + trial % 9, 8000 + trial);
    SamplingPlan plan;
    plan.variant = kAllVariants[trial % 4];
    plan.params = default_params(plan.variant, inst);
    plan.shots = 24;
    plan.base_seed = 500 + trial;
    plan.apply_descent = trial % 2 == 0;
    std::vector<std::vector<double>> runs;
    for (std::size_t w : {std::size_t{1}, std::size_t{4}, max_workers}) {
      plan.worker_limit = w;
      runs.push_back(run_ensemble(inst, plan).energies);
    }
    if (!same_bytes(runs[0], runs[1]) || !same_bytes(runs[0], runs[2])) ++mismatches;
  }
  return {mismatches == 0, "20 trials over workers {1, 4, " + std::to_string(max_workers) + "}, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome ac6_bench(const std::vector<IsingInstance>& corpus) {
  const auto dir = fs::temp_directory_path() / "qaia_acceptance_bench";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::vector<std::string> args{"bench", "--shots", "100", "--seed", "11", "--out", (dir / "table.csv").string()};
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto path = dir / ("sg" + std::to_string(k) + ".json");
    write_file_atomic(path, serialize_instance(corpus[k]));
    args.push_back(path.string());
  }
  std::ostringstream out, err;
  const int status = cli::run_cli(args, out, err);
  if (status != 0) return {false, "bench exited " + std::to_string(status) + ": " + err.str()};

  std::istringstream table(read_text_file(dir / "table.csv"));
  fs::remove_all(dir);
  std::string line;
  std::getline(table, line);
  std::vector<std::pair<std::string, double>> medians;
  while (std::getline(table, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    const double med = cols[3] == "inf" ? INFINITY : std::stod(cols[3]);
    medians.emplace_back(cols[0], med);
  }
  double cfc = INFINITY;
  for (auto& [name, m] : medians) {
    if (name == "cfc") cfc = m;
  }
  bool pass = medians.size() == 4 && std::isfinite(cfc);
  std::ostringstream detail;
  detail << "median samples_to_solution (descent off):";
  for (auto& [name, m] : medians) {
    detail << ' ' << name << '=' << m;
    pass = pass && cfc <= 2.0 * m;
  }
  detail << "; cfc <= 2x each other";
  return {pass, detail.str()};
}

Outcome ac7_tts() {
  bool pass = true;
  std::ostringstream detail;
  detail << std::fixed;
  detail.precision(3);
  for (auto [n, budget] : {std::pair<std::size_t, double>{13, 5.0}, {30, 10.0}}) {
    const auto inst = generate_random_instance(InstanceKind::spin_glass, n, 13000 + n);
    SamplingPlan plan;
    plan.variant = Variant::cfc;
    plan.params = default_params(Variant::cfc, inst);
    plan.shots = 100;
    plan.base_seed = 3;
    plan.apply_descent = true;
    const auto start = Clock::now();
    const auto rep = run_ensemble(inst, plan);
    const double secs = seconds_since(start);
    pass = pass && secs < budget && rep.diverged.empty();
    detail << "n=" << n << ' ' << secs << " s (budget " << budget << " s); ";
  }
  return {pass, detail.str() + "100-shot cfc with descent"};
}

Outcome ac8_formats() {
  std::size_t failures = 0;
  std::mt19937_64 rng(88);
  std::normal_distribution<double> gauss;
  for (std::size_t n = 1; n <= 10; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
      for (auto& row : q) {
        for (auto& v : row) v = (rng() % 3 == 0) ? 0.0 : gauss(rng);
      }
      const double constant = gauss(rng);
      const auto inst = qubo_to_ising(q, constant);
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        double direct = constant;
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) direct += q[i][j] * ((m >> i) & 1) * ((m >> j) & 1);
        }
        // x_i = 1 corresponds to z_i = +1, i.e. a clear bit in the spin mask
        const auto z = qaia::testing::spins_of(~m & ((std::uint64_t{1} << n) - 1), n);
        if (std::abs(qaia::testing::naive_energy(inst, z) - direct) > 1e-9) ++failures;
      }
    }
  }
  const std::size_t conversion_failures = failures;

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 1 + seed % 10;
    const auto inst = qaia::testing::random_instance(n, 600 + seed, 0.6);
    const auto text = serialize_instance(inst);
    const auto back = parse_instance(text);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      const auto z = qaia::testing::spins_of(m, n);
      if (qaia::testing::naive_energy(inst, z) != qaia::testing::naive_energy(back, z)) ++failures;
    }
    if (serialize_instance(back) != text || serialize_instance(inst) != text) ++failures;
  }
  const std::size_t roundtrip_failures = failures - conversion_failures;

  // Byte stability across runs: compare against files written by earlier builds.
  std::size_t golden_failures = 0;
  const std::pair<InstanceKind, std::size_t> golden[] = {{InstanceKind::spin_glass, 6}, {InstanceKind::ferro_ring, 5}};
  for (auto [kind, n] : golden) {
    const auto name = std::string(to_string(kind)) + "_n" + std::to_string(n) + "_s3.json";
    const auto expected = read_text_file(fs::path(QAIA_GOLDEN_DIR) / name);
    if (serialize_instance(generate_random_instance(kind, n, 3)) != expected) ++golden_failures;
  }
  failures += golden_failures;
  return {failures == 0, "qubo conversion " + std::to_string(conversion_failures) + ", round trip " +
                             std::to_string(roundtrip_failures) + ", golden bytes " +
                             std::to_string(golden_failures) + " failures"};
}

SolverState negated(SolverState s) {
  for (auto& v : s.x) v = -v;
  for (auto& v : s.momentum) v = -v;
  return s;
}

Outcome ac9_symmetry() {
  std::size_t negation_failures = 0, permutation_failures = 0;
  double worst_drift = 0.0;
  for (auto v : kAllVariants) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto inst = generate_random_instance(InstanceKind::spin_glass, 12, 9000 + seed);
      const auto params = default_params(v, inst);
      std::mt19937_64 rng(split_seed(17, seed));
      auto a = initial_state(v, inst.size(), params, rng);
      auto b = negated(a);
      std::mt19937_64 ra(1), rb(1);
      integrate(v, inst, params, a, ra);
      integrate(v, inst, params, b, rb);
      const auto ca = binarize(a.x, ra);
      const auto cb = binarize(b.x, rb);
      bool ok = cb == ca.negated();
      ok = ok && steepest_descent(inst, cb).config == steepest_descent(inst, ca).config.negated();
      if (!ok) ++negation_failures;
    }

    std::mt19937_64 prng(404);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto inst = generate_random_instance(InstanceKind::spin_glass, 12, 9500 + seed);
      const auto perm = qaia::testing::random_permutation(12, prng);
      const auto moved = qaia::testing::permuted(inst, perm);
      const auto params = default_params(v, inst);
      std::mt19937_64 rng(split_seed(23, seed));
      auto a = initial_state(v, 12, params, rng);
      SolverState b = a;
      for (std::size_t i = 0; i < 12; ++i) {
        b.x[perm[i]] = a.x[i];
        if (!a.e.empty()) b.e[perm[i]] = a.e[i];
        if (!a.momentum.empty()) b.momentum[perm[i]] = a.momentum[i];
      }
      std::vector<std::vector<double>> traj;
      std::mt19937_64 ra(1), rb(1);
      integrate(v, inst, params, a, ra, [&](const SolverState& s) { traj.push_back(s.x); });
      std::size_t step = 0;
      double drift = 0.0;
      integrate(v, moved, params, b, rb, [&](const SolverState& s) {
        for (std::size_t i = 0; i < 12; ++i) drift = std::max(drift, std::abs(s.x[perm[i]] - traj[step][i]));
        ++step;
      });
      worst_drift = std::max(worst_drift, drift);
      bool ok = step == traj.size() && drift <= 1e-9;
      const auto ca = binarize(a.x, ra);
      const auto cb = binarize(b.x, rb);
      for (std::size_t i = 0; i < 12; ++i) ok = ok && cb[perm[i]] == ca[i];
      if (!ok) ++permutation_failures;
    }
  }
  std::ostringstream detail;
  detail << "negation " << negation_failures << "/200 failures, permutation " << permutation_failures
         << "/80 failures (max trajectory drift " << worst_drift << ")";
  return {negation_failures == 0 && permutation_failures == 0, detail.str()};
}

}  // namespace

int main() {
  const auto corpus = spin_glass_corpus();
  const auto grounds = corpus_grounds(corpus);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 multi-shot oracle equivalence", [&] { return ac1_multishot(corpus, grounds); }},
      {"AC2 single-shot plus descent parity", ac2_single_shot},
      {"AC3 descent correctness", ac3_descent},
      {"AC4 dsb wall invariant", ac4_dsb_walls},
      {"AC5 determinism across worker counts", ac5_determinism},
      {"AC6 samples-to-solution benchmark", [&] { return ac6_bench(corpus); }},
      {"AC7 time-to-solution budget", ac7_tts},
      {"AC8 conversion and format correctness", ac8_formats},
      {"AC9 symmetry", ac9_symmetry},
  };

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
