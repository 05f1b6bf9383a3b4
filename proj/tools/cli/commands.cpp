#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "qaia/io.hpp"
#include "qaia/oracle.hpp"
#include "qaia/sampler.hpp"
#include "qaia/solvers.hpp"

namespace qaia::cli {
namespace {

namespace fs = std::filesystem;

// Failure that has already been explained; maps to exit status 1.
struct CommandError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::string variant = "cfc";
  std::size_t shots = 100;
  std::uint64_t seed = 0;
  std::string descent;  // empty: command default
  std::size_t workers = 0;
  std::vector<std::string> overrides;
  std::string out;
};

double to_ms(std::chrono::nanoseconds d) { return std::chrono::duration<double, std::milli>(d).count(); }

Variant variant_or_throw(const std::string& name) {
  if (auto v = parse_variant(name)) return *v;
  throw CommandError("unknown variant '" + name + "' (expected cac, cfc, sfc or dsb)");
}

SolverParams tuned_params(Variant v, const IsingInstance& inst, const std::vector<std::string>& overrides) {
  auto params = default_params(v, inst);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw CommandError("--set expects key=value, got '" + kv + "'");
    }
    apply_override(params, std::string_view(kv).substr(0, eq), std::string_view(kv).substr(eq + 1));
  }
  check_params(v, params);
  return params;
}

SamplingPlan make_plan(const RunOptions& o, Variant v, const IsingInstance& inst, bool descent_default) {
  SamplingPlan plan;
  plan.variant = v;
  plan.params = tuned_params(v, inst, o.overrides);
  plan.shots = o.shots;
  plan.base_seed = o.seed;
  plan.apply_descent = o.descent.empty() ? descent_default : o.descent == "on";
  if (o.workers > 0) plan.worker_limit = o.workers;
  return plan;
}

IsingInstance load_instance(const fs::path& path) {
  const auto text = read_text_file(path);
  try {
    return parse_instance(text);
  } catch (const ParseError& e) {
    std::ostringstream os;
    os << path.string();
    if (e.line() > 0) os << ':' << e.line() << ':' << e.column();
    os << ": " << e.what();
    throw CommandError(os.str());
  }
}

// Artifact goes to --out when given, otherwise to stdout.
void emit(const RunOptions& o, std::ostream& out, const std::string& artifact) {
  if (o.out.empty()) {
    out << artifact;
  } else {
    write_file_atomic(o.out, artifact);
  }
}

std::ostream& summary(const RunOptions& o, std::ostream& out, std::ostream& err) {
  return o.out.empty() ? err : out;
}

void add_run_options(CLI::App* cmd, RunOptions& o, bool descent_on) {
  cmd->add_option("--variant", o.variant, "Solver variant: cac, cfc, sfc or dsb")->capture_default_str();
  cmd->add_option("--shots", o.shots, "Independent trajectories per instance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Base seed; shot k uses a seed split from it")->capture_default_str();
  cmd->add_option("--descent", o.descent,
                  std::string("Steepest descent on every shot (default ") + (descent_on ? "on" : "off") + ")")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--workers", o.workers, "Worker threads (default: all hardware threads)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--set", o.overrides, "Hyperparameter override key=value (repeatable)");
  cmd->add_option("--out", o.out, "Output file, written atomically (default: stdout)");
}

std::string override_help() {
  std::ostringstream os;
  os << "Hyperparameter override keys for --set key=value:\n";
  for (auto v : kAllVariants) {
    os << "  " << to_string(v) << ":";
    for (const auto& name : param_names(v)) os << ' ' << name;
    os << '\n';
  }
  os << "zeta (cim) and c0 (dsb) default to a scale derived from the coupling RMS.";
  return os.str();
}

// --- commands ---------------------------------------------------------------

int cmd_gen(const std::string& kind_name, std::size_t n, std::uint64_t seed, const std::string& out_path,
            std::ostream& out) {
  auto kind = parse_instance_kind(kind_name);
  if (!kind) throw CommandError("unknown kind '" + kind_name + "' (expected spin_glass, ferro_ring or ferro_complete)");
  auto inst = generate_random_instance(*kind, n, seed);
  write_file_atomic(out_path, serialize_instance(inst));
  out << "wrote " << inst.metadata().label << " to " << out_path << '\n';
  return 0;
}

int cmd_solve(const RunOptions& o, const std::string& instance_path, std::ostream& out, std::ostream& err) {
  const auto inst = load_instance(instance_path);
  const auto v = variant_or_throw(o.variant);
  const auto plan = make_plan(o, v, inst, true);
  const auto report = run_ensemble(inst, plan);
  emit(o, out, serialize_report(report, plan, inst));

  auto& s = summary(o, out, err);
  s << "best energy " << format_real(report.best.energy) << " (" << report.best.config.to_string() << ")\n";
  if (!report.diverged.empty()) s << report.diverged.size() << " of " << plan.shots << " shots diverged\n";
  if (report.reference_energy) {
    s << (report.hit_count > 0 ? "hit" : "miss") << ": " << report.hit_count << '/' << plan.shots
      << " shots at reference " << format_real(*report.reference_energy) << '\n';
  }
  return 0;
}

int cmd_exact(const RunOptions& o, const std::string& instance_path, std::ostream& out, std::ostream& err) {
  const auto inst = load_instance(instance_path);
  const auto solution = brute_force(inst);
  emit(o, out, serialize_exact(solution, inst));
  summary(o, out, err) << "ground energy " << format_real(solution.ground_energy) << ", "
                       << solution.ground_configs.size() << " configs\n";
  return 0;
}

int cmd_convert(const std::string& qubo_path, const std::string& out_path, std::ostream& out) {
  const auto text = read_text_file(qubo_path);
  QuboProblem problem;
  try {
    problem = parse_qubo(text);
  } catch (const ParseError& e) {
    throw CommandError(qubo_path + ": " + e.what());
  }
  auto inst = qubo_to_ising(problem.q, problem.constant).with_metadata(problem.metadata);
  write_file_atomic(out_path, serialize_instance(inst));
  out << "wrote " << inst.size() << "-spin instance to " << out_path << '\n';
  return 0;
}

int cmd_sweep(const RunOptions& o, const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  SweepManifest manifest;
  try {
    manifest = parse_manifest(read_text_file(manifest_path));
  } catch (const ParseError& e) {
    throw CommandError(manifest_path + ": " + e.what());
  }
  const auto v = variant_or_throw(o.variant);
  const fs::path base = fs::path(manifest_path).parent_path();

  std::vector<EntryReport> reports;
  std::size_t failed = 0;
  for (const auto& entry : manifest.entries) {
    EntryReport er;
    try {
      const fs::path p = fs::path(entry.instance_path).is_absolute() ? fs::path(entry.instance_path)
                                                                      : base / entry.instance_path;
      const auto inst = load_instance(p);
      auto ref = inst.metadata().reference_energy;
      if (!ref) ref = curve_reference(manifest, entry.bond_length);
      er.report = run_ensemble(inst, make_plan(o, v, inst, true), ref);
      if (!er.report->diverged.empty()) er.note = std::to_string(er.report->diverged.size()) + " shots diverged";
    } catch (const ParamError&) {
      throw;
    } catch (const std::exception& e) {
      er.note = e.what();
      ++failed;
      err << "entry " << entry.instance_path << ": " << e.what() << '\n';
    }
    reports.push_back(std::move(er));
  }
  emit(o, out, export_profile(manifest, reports));
  summary(o, out, err) << manifest.entries.size() << " entries, " << failed << " failed\n";
  return 0;
}

struct BenchRow {
  Variant variant;
  std::size_t instances = 0;
  std::size_t unsolved = 0;
  std::optional<double> median_sts;  // empty: more than half unsolved
  double mean_ensemble_ms = 0.0;
  double per_shot_ms = 0.0;
  std::optional<double> tts_ms;  // mean over solved instances of sts * per-shot time
};

std::string sts_text(const std::optional<double>& v) { return v ? format_real(*v) : "inf"; }

int cmd_bench(const RunOptions& o, const std::vector<std::string>& instance_paths,
              const std::string& manifest_path, const std::string& variants_csv, std::ostream& out,
              std::ostream& err) {
  std::vector<std::string> paths = instance_paths;
  if (!manifest_path.empty()) {
    SweepManifest manifest;
    try {
      manifest = parse_manifest(read_text_file(manifest_path));
    } catch (const ParseError& e) {
      throw CommandError(manifest_path + ": " + e.what());
    }
    const fs::path base = fs::path(manifest_path).parent_path();
    for (const auto& e : manifest.entries) {
      paths.push_back(fs::path(e.instance_path).is_absolute() ? e.instance_path
                                                               : (base / e.instance_path).string());
    }
  }
  if (paths.empty()) throw CommandError("bench needs instance files or --manifest");

  std::vector<Variant> variants;
  if (variants_csv.empty()) {
    variants.assign(std::begin(kAllVariants), std::end(kAllVariants));
  } else {
    std::stringstream ss(variants_csv);
    for (std::string name; std::getline(ss, name, ',');) variants.push_back(variant_or_throw(name));
  }

  std::vector<IsingInstance> instances;
  std::vector<double> references;
  for (const auto& p : paths) {
    instances.push_back(load_instance(p));
    const auto& inst = instances.back();
    if (auto ref = inst.metadata().reference_energy) {
      references.push_back(*ref);
    } else if (inst.size() <= kBruteForceMaxSpins) {
      references.push_back(brute_force(inst).ground_energy);
    } else {
      throw CommandError(p + ": no reference_energy and " + std::to_string(inst.size()) +
                         " spins exceeds the exact solver cap of " + std::to_string(kBruteForceMaxSpins));
    }
  }

  std::vector<BenchRow> rows;
  for (auto v : variants) {
    BenchRow row;
    row.variant = v;
    std::vector<double> sts;
    double ensemble_ms = 0.0, shot_ms = 0.0, tts_sum = 0.0;
    for (std::size_t k = 0; k < instances.size(); ++k) {
      const auto plan = make_plan(o, v, instances[k], false);
      const auto report = run_ensemble(instances[k], plan, references[k]);
      const double per_shot = to_ms(report.per_shot_mean_wall_time);
      ensemble_ms += to_ms(report.total_wall_time);
      shot_ms += per_shot;
      if (report.samples_to_first_hit) {
        sts.push_back(static_cast<double>(*report.samples_to_first_hit));
        tts_sum += static_cast<double>(*report.samples_to_first_hit) * per_shot;
      } else {
        sts.push_back(std::numeric_limits<double>::infinity());
        ++row.unsolved;
      }
    }
    row.instances = instances.size();
    std::sort(sts.begin(), sts.end());
    const std::size_t m = sts.size();
    const double med = m % 2 ? sts[m / 2] : 0.5 * (sts[m / 2 - 1] + sts[m / 2]);
    if (std::isfinite(med)) row.median_sts = med;
    row.mean_ensemble_ms = ensemble_ms / static_cast<double>(m);
    row.per_shot_ms = shot_ms / static_cast<double>(m);
    if (row.unsolved < m) row.tts_ms = tts_sum / static_cast<double>(m - row.unsolved);
    rows.push_back(row);
  }

  std::ostringstream csv;
  csv << "variant,instances,unsolved,median_samples_to_solution,ensemble_ms,per_shot_ms,tts_ms\n";
  for (const auto& r : rows) {
    csv << to_string(r.variant) << ',' << r.instances << ',' << r.unsolved << ',' << sts_text(r.median_sts) << ','
        << format_real(r.mean_ensemble_ms) << ',' << format_real(r.per_shot_ms) << ','
        << (r.tts_ms ? format_real(*r.tts_ms) : "") << '\n';
  }
  emit(o, out, csv.str());

  auto& s = summary(o, out, err);
  s << std::left << std::setw(8) << "variant" << std::right << std::setw(10) << "unsolved" << std::setw(12)
    << "median sts" << std::setw(14) << "ensemble ms" << std::setw(12) << "shot ms" << std::setw(12) << "tts ms"
    << '\n';
  s << std::fixed;
  for (const auto& r : rows) {
    s << std::left << std::setw(8) << to_string(r.variant) << std::right << std::setw(10)
      << (std::to_string(r.unsolved) + "/" + std::to_string(r.instances)) << std::setw(12)
      << sts_text(r.median_sts) << std::setprecision(2) << std::setw(14) << r.mean_ensemble_ms
      << std::setprecision(4) << std::setw(12) << r.per_shot_ms << std::setprecision(3) << std::setw(12);
    if (r.tts_ms) {
      s << *r.tts_ms;
    } else {
      s << "-";
    }
    s << '\n';
  }
  s << std::defaultfloat;
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ising solvers based on simulated coherent Ising machines and bifurcation dynamics", "qaia"};
  app.require_subcommand(1);
  app.footer(override_help());

  RunOptions o;
  std::string instance_path, manifest_path, qubo_path, kind = "spin_glass", variants_csv;
  std::vector<std::string> bench_paths;
  std::size_t n = 0;

  auto* gen = app.add_subcommand("gen", "Generate a seeded benchmark instance");
  gen->add_option("--kind", kind, "spin_glass, ferro_ring or ferro_complete")->capture_default_str();
  gen->add_option("--n", n, "Number of spins")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", o.out, "Output instance file")->required();

  auto* solve = app.add_subcommand("solve", "Run a multi-shot ensemble on one instance");
  solve->add_option("instance", instance_path, "Instance file")->required();
  add_run_options(solve, o, true);
  solve->footer(override_help());

  auto* sweep = app.add_subcommand("sweep", "Solve every manifest entry and export an energy profile");
  sweep->add_option("manifest", manifest_path, "Sweep manifest file")->required();
  add_run_options(sweep, o, true);
  sweep->footer(override_help());

  auto* exact = app.add_subcommand("exact", "Exhaustive ground states (up to 24 spins)");
  exact->add_option("instance", instance_path, "Instance file")->required();
  exact->add_option("--out", o.out, "Output file, written atomically (default: stdout)");

  auto* bench = app.add_subcommand("bench", "Samples-to-solution and TTS table per variant");
  bench->add_option("instances", bench_paths, "Instance files");
  bench->add_option("--manifest", manifest_path, "Take instances from a sweep manifest");
  bench->add_option("--variants", variants_csv, "Comma-separated variants (default: all)");
  add_run_options(bench, o, false);
  bench->footer(override_help());

  auto* convert = app.add_subcommand("convert", "Convert a QUBO document to an Ising instance");
  convert->add_option("qubo", qubo_path, "QUBO file")->required();
  convert->add_option("--out", o.out, "Output instance file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gen) return cmd_gen(kind, n, o.seed, o.out, out);
    if (*solve) return cmd_solve(o, instance_path, out, err);
    if (*sweep) return cmd_sweep(o, manifest_path, out, err);
    if (*exact) return cmd_exact(o, instance_path, out, err);
    if (*bench) return cmd_bench(o, bench_paths, manifest_path, variants_csv, out, err);
    if (*convert) return cmd_convert(qubo_path, o.out, out);
  } catch (const std::exception& e) {
    err << "qaia: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace qaia::cli
