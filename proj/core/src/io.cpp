#include "qaia/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <system_error>

#include <json.hpp>
#include <unistd.h>

#include "normal.hpp"

namespace qaia {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& err) {
    // nlohmann reports the byte just past the offending token.
    const std::size_t byte = err.byte > 0 ? err.byte - 1 : 0;
    auto [line, col] = line_col(text, byte);
    throw ParseError(std::string(what) + " syntax error at line " + std::to_string(line) +
                         ", column " + std::to_string(col) + ": " + err.what(),
                     line, col, "");
  }
}

[[noreturn]] void field_error(const std::string& field, const std::string& msg) {
  throw ParseError(field + ": " + msg, 0, 0, field);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) field_error(where.empty() ? key : where + "." + key, "missing field");
  return *it;
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      field_error(where.empty() ? it.key() : where + "." + it.key(), "unknown field");
    }
  }
}

double as_real(const json& v, const std::string& field) {
  if (!v.is_number()) field_error(field, "expected a number");
  return v.get<double>();
}

std::uint64_t as_index(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) field_error(field, "expected a non-negative integer");
  field_error(field, "expected an integer");
}

std::string as_string(const json& v, const std::string& field) {
  if (!v.is_string()) field_error(field, "expected a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& field) {
  if (!v.is_array()) field_error(field, "expected an array");
  return v;
}

InstanceMetadata parse_metadata(const json& m, const std::string& where) {
  if (!m.is_object()) field_error(where, "expected an object");
  reject_unknown(m, {"label", "bond_length", "r", "reference_energy", "dissociation_limit"}, where);
  InstanceMetadata md;
  if (auto it = m.find("label"); it != m.end()) md.label = as_string(*it, where + ".label");
  if (auto it = m.find("bond_length"); it != m.end()) {
    md.bond_length = as_real(*it, where + ".bond_length");
  }
  if (auto it = m.find("r"); it != m.end()) {
    const auto r = as_index(*it, where + ".r");
    if (r < 1 || r > 1'000'000) field_error(where + ".r", "must be a positive integer");
    md.r = static_cast<int>(r);
  }
  if (auto it = m.find("reference_energy"); it != m.end()) {
    md.reference_energy = as_real(*it, where + ".reference_energy");
  }
  if (auto it = m.find("dissociation_limit"); it != m.end()) {
    md.dissociation_limit = as_real(*it, where + ".dissociation_limit");
  }
  return md;
}

std::string quoted(const std::string& s) { return json(s).dump(); }

std::string csv_field(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

std::string sanitize_note(std::string note) {
  std::replace_if(note.begin(), note.end(), [](char ch) { return ch == ',' || ch == '\n' || ch == '\r'; }, ';');
  return note;
}

double to_ms(std::chrono::nanoseconds ns) { return static_cast<double>(ns.count()) / 1e6; }

ojson params_json(const SolverParams& params) {
  return std::visit(
      [](const auto& p) -> ojson {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, CimParams>) {
          return {{"p_end", p.p_end},
                  {"alpha", p.alpha},
                  {"beta", p.beta},
                  {"zeta", p.zeta},
                  {"c", p.c},
                  {"k", p.k},
                  {"dt", p.dt},
                  {"steps", p.steps},
                  {"noise_sigma0", p.noise_sigma0},
                  {"noise_per_step", p.noise_per_step},
                  {"amplitude_clamp", p.amplitude_clamp}};
        } else {
          return {{"a0", p.a0},
                  {"c0", p.c0},
                  {"dt", p.dt},
                  {"steps", p.steps},
                  {"noise_sigma0", p.noise_sigma0}};
        }
      },
      params);
}

}  // namespace

ParseError::ParseError(std::string message, std::size_t line, std::size_t column,
                       std::string field)
    : std::runtime_error(std::move(message)), line_(line), column_(column), field_(std::move(field)) {}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw IoError("cannot format number");
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------

IsingInstance parse_instance(std::string_view text) {
  const json doc = parse_json(text, "instance");
  if (!doc.is_object()) field_error("$", "instance document must be a JSON object");
  reject_unknown(doc, {"n", "h", "J", "offset", "metadata"}, "");

  InstanceData d;
  d.n = as_index(require(doc, "n", ""), "n");
  if (d.n == 0) field_error("n", "must be positive");

  const auto& h = as_array(require(doc, "h", ""), "h");
  d.h.reserve(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) d.h.push_back(as_real(h[i], "h[" + std::to_string(i) + "]"));

  const auto& jarr = as_array(require(doc, "J", ""), "J");
  d.couplings.reserve(jarr.size());
  for (std::size_t k = 0; k < jarr.size(); ++k) {
    const std::string where = "J[" + std::to_string(k) + "]";
    const auto& e = jarr[k];
    if (!e.is_array() || e.size() != 3) field_error(where, "expected an [i, j, value] triple");
    d.couplings.push_back({as_index(e[0], where + "[0]"), as_index(e[1], where + "[1]"),
                           as_real(e[2], where + "[2]")});
  }

  if (auto it = doc.find("offset"); it != doc.end()) d.offset = as_real(*it, "offset");
  if (auto it = doc.find("metadata"); it != doc.end()) d.metadata = parse_metadata(*it, "metadata");

  if (auto violations = validate(d); !violations.empty()) {
    const auto& v = violations.front();
    std::string field;
    switch (v.kind) {
      case Violation::Kind::diagonal_coupling:
      case Violation::Kind::index_out_of_range:
      case Violation::Kind::duplicate_pair:
      case Violation::Kind::non_finite_coupling:
        field = "J[" + std::to_string(v.entry) + "]";
        break;
      case Violation::Kind::non_finite_field:
        field = "h[" + std::to_string(v.entry) + "]";
        break;
      case Violation::Kind::field_length:
        field = "h";
        break;
      case Violation::Kind::non_finite_offset:
        field = "offset";
        break;
      case Violation::Kind::bad_metadata:
        field = "metadata";
        break;
      case Violation::Kind::zero_spins:
        field = "n";
        break;
    }
    std::string msg = v.message;
    for (std::size_t k = 1; k < violations.size(); ++k) msg += "; " + violations[k].message;
    throw ParseError(msg, 0, 0, field);
  }
  return IsingInstance::create(std::move(d));
}

std::string serialize_instance(const IsingInstance& inst) {
  std::ostringstream os;
  os << "{\n  \"n\": " << inst.size() << ",\n  \"h\": [";
  const auto h = inst.fields();
  for (std::size_t i = 0; i < h.size(); ++i) os << (i ? ", " : "") << format_real(h[i]);
  os << "],\n  \"J\": [";
  const auto cs = inst.couplings();
  for (std::size_t k = 0; k < cs.size(); ++k) {
    os << (k ? ",\n    " : "\n    ") << '[' << cs[k].i << ", " << cs[k].j << ", "
       << format_real(cs[k].value) << ']';
  }
  os << (cs.empty() ? "]" : "\n  ]") << ",\n  \"offset\": " << format_real(inst.offset());

  const auto& m = inst.metadata();
  os << ",\n  \"metadata\": {\n    \"label\": " << quoted(m.label);
  if (m.bond_length) os << ",\n    \"bond_length\": " << format_real(*m.bond_length);
  if (m.r) os << ",\n    \"r\": " << *m.r;
  if (m.reference_energy) os << ",\n    \"reference_energy\": " << format_real(*m.reference_energy);
  if (m.dissociation_limit) {
    os << ",\n    \"dissociation_limit\": " << format_real(*m.dissociation_limit);
  }
  os << "\n  }\n}\n";
  return os.str();
}

QuboProblem parse_qubo(std::string_view text) {
  const json doc = parse_json(text, "QUBO");
  if (!doc.is_object()) field_error("$", "QUBO document must be a JSON object");
  reject_unknown(doc, {"Q", "constant", "metadata"}, "");
  QuboProblem p;
  const auto& rows = as_array(require(doc, "Q", ""), "Q");
  if (rows.empty()) field_error("Q", "must have at least one row");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = "Q[" + std::to_string(i) + "]";
    const auto& row = as_array(rows[i], where);
    if (row.size() != rows.size()) field_error(where, "Q must be square");
    std::vector<double> r;
    r.reserve(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) r.push_back(as_real(row[j], where + "[" + std::to_string(j) + "]"));
    p.q.push_back(std::move(r));
  }
  if (auto it = doc.find("constant"); it != doc.end()) p.constant = as_real(*it, "constant");
  if (auto it = doc.find("metadata"); it != doc.end()) p.metadata = parse_metadata(*it, "metadata");
  return p;
}

std::optional<InstanceKind> parse_instance_kind(std::string_view name) {
  for (auto k : {InstanceKind::spin_glass, InstanceKind::ferro_ring, InstanceKind::ferro_complete}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

std::string_view to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::spin_glass: return "spin_glass";
    case InstanceKind::ferro_ring: return "ferro_ring";
    case InstanceKind::ferro_complete: return "ferro_complete";
  }
  return "?";
}

IsingInstance generate_random_instance(InstanceKind kind, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InstanceError("generated instance needs n >= 1");
  InstanceData d;
  d.n = n;
  d.h.assign(n, 0.0);
  d.metadata.label = std::string(to_string(kind)) + "_n" + std::to_string(n) + "_s" + std::to_string(seed);
  switch (kind) {
    case InstanceKind::spin_glass: {
      std::mt19937_64 rng(seed);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) d.couplings.push_back({i, j, detail::standard_normal(rng)});
      }
      break;
    }
    case InstanceKind::ferro_ring:
      if (n == 2) {
        d.couplings.push_back({0, 1, -1.0});
      } else if (n > 2) {
        for (std::size_t i = 0; i < n; ++i) d.couplings.push_back({i, (i + 1) % n, -1.0});
      }
      break;
    case InstanceKind::ferro_complete:
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) d.couplings.push_back({i, j, -1.0});
      }
      break;
  }
  return IsingInstance::create(std::move(d));
}

// ---------------------------------------------------------------------------

SweepManifest parse_manifest(std::string_view text) {
  const json doc = parse_json(text, "manifest");
  if (!doc.is_object()) field_error("$", "manifest document must be a JSON object");
  reject_unknown(doc, {"label", "entries", "reference_curve", "dissociation_limit"}, "");
  SweepManifest m;
  if (auto it = doc.find("label"); it != doc.end()) m.label = as_string(*it, "label");

  const auto& entries = as_array(require(doc, "entries", ""), "entries");
  if (entries.empty()) field_error("entries", "must not be empty");
  std::set<std::pair<double, int>> seen;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string where = "entries[" + std::to_string(k) + "]";
    const auto& e = entries[k];
    if (!e.is_object()) field_error(where, "expected an object");
    reject_unknown(e, {"instance", "bond_length", "r"}, where);
    ManifestEntry entry;
    entry.instance_path = as_string(require(e, "instance", where), where + ".instance");
    entry.bond_length = as_real(require(e, "bond_length", where), where + ".bond_length");
    const auto r = as_index(require(e, "r", where), where + ".r");
    if (r < 1 || r > 1'000'000) field_error(where + ".r", "must be a positive integer");
    entry.r = static_cast<int>(r);
    if (!seen.insert({entry.bond_length, entry.r}).second) {
      field_error(where, "duplicate (bond_length, r) pair");
    }
    m.entries.push_back(std::move(entry));
  }

  if (auto it = doc.find("reference_curve"); it != doc.end()) {
    const auto& curve = as_array(*it, "reference_curve");
    for (std::size_t k = 0; k < curve.size(); ++k) {
      const std::string where = "reference_curve[" + std::to_string(k) + "]";
      if (!curve[k].is_array() || curve[k].size() != 2) {
        field_error(where, "expected a [bond_length, energy] pair");
      }
      m.reference_curve.emplace_back(as_real(curve[k][0], where + "[0]"),
                                     as_real(curve[k][1], where + "[1]"));
    }
  }
  if (auto it = doc.find("dissociation_limit"); it != doc.end()) {
    m.dissociation_limit = as_real(*it, "dissociation_limit");
  }
  return m;
}

std::string serialize_manifest(const SweepManifest& manifest) {
  std::ostringstream os;
  os << "{\n  \"label\": " << quoted(manifest.label) << ",\n  \"entries\": [";
  for (std::size_t k = 0; k < manifest.entries.size(); ++k) {
    const auto& e = manifest.entries[k];
    os << (k ? ",\n    " : "\n    ") << "{\"instance\": " << quoted(e.instance_path)
       << ", \"bond_length\": " << format_real(e.bond_length) << ", \"r\": " << e.r << '}';
  }
  os << "\n  ]";
  if (!manifest.reference_curve.empty()) {
    os << ",\n  \"reference_curve\": [";
    for (std::size_t k = 0; k < manifest.reference_curve.size(); ++k) {
      const auto& [b, e] = manifest.reference_curve[k];
      os << (k ? ", " : "") << '[' << format_real(b) << ", " << format_real(e) << ']';
    }
    os << ']';
  }
  if (manifest.dissociation_limit) {
    os << ",\n  \"dissociation_limit\": " << format_real(*manifest.dissociation_limit);
  }
  os << "\n}\n";
  return os.str();
}

std::optional<double> curve_reference(const SweepManifest& manifest, double bond_length) {
  for (const auto& [b, e] : manifest.reference_curve) {
    if (b == bond_length) return e;
  }
  return std::nullopt;
}

std::vector<ProfilePoint> make_profile(const SweepManifest& manifest,
                                       std::span<const EntryReport> reports) {
  if (reports.size() != manifest.entries.size()) {
    throw std::invalid_argument("profile export needs one report per manifest entry (" +
                                std::to_string(manifest.entries.size()) + " entries, " +
                                std::to_string(reports.size()) + " reports)");
  }
  std::vector<ProfilePoint> points;
  points.reserve(reports.size());
  for (std::size_t k = 0; k < reports.size(); ++k) {
    ProfilePoint p;
    p.bond_length = manifest.entries[k].bond_length;
    p.r = manifest.entries[k].r;
    p.note = sanitize_note(reports[k].note);
    if (const auto& rep = reports[k].report) {
      p.best_energy = rep->best.energy;
      p.mean_energy = mean_energy(*rep);
      if (rep->reference_energy) {
        p.hit_rate = static_cast<double>(rep->hit_count) / static_cast<double>(rep->energies.size());
      }
      p.wall_ms = to_ms(rep->total_wall_time);
    }
    points.push_back(std::move(p));
  }
  return points;
}

std::string format_profile(std::vector<ProfilePoint> points) {
  std::stable_sort(points.begin(), points.end(), [](const ProfilePoint& a, const ProfilePoint& b) {
    return std::pair(a.r, a.bond_length) < std::pair(b.r, b.bond_length);
  });
  std::ostringstream os;
  os << kProfileHeader << '\n';
  for (const auto& p : points) {
    os << format_real(p.bond_length) << ',' << p.r << ',' << csv_field(p.best_energy) << ','
       << csv_field(p.mean_energy) << ',' << csv_field(p.hit_rate) << ',' << format_real(p.wall_ms)
       << ',' << sanitize_note(p.note) << '\n';
  }
  return os.str();
}

std::string export_profile(const SweepManifest& manifest, std::span<const EntryReport> reports) {
  return format_profile(make_profile(manifest, reports));
}

std::vector<ProfilePoint> parse_profile(std::string_view text) {
  std::vector<ProfilePoint> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto parse_double = [&](std::string_view s, std::size_t col, const char* name) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ParseError(std::string("profile: bad ") + name + " on line " + std::to_string(line_no),
                       line_no, col, name);
    }
    return v;
  };
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != kProfileHeader) throw ParseError("profile: unexpected header", 1, 1, "header");
      continue;
    }
    if (line.empty()) continue;

    std::vector<std::string_view> cols;
    std::size_t start = 0;
    for (std::size_t k = 0; k < 6; ++k) {
      auto comma = line.find(',', start);
      if (comma == std::string_view::npos) {
        throw ParseError("profile: too few columns on line " + std::to_string(line_no), line_no,
                         start + 1, "");
      }
      cols.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    cols.push_back(line.substr(start));

    ProfilePoint p;
    p.bond_length = parse_double(cols[0], 1, "bond_length");
    const double r = parse_double(cols[1], 2, "r");
    p.r = static_cast<int>(r);
    auto opt = [&](std::string_view s, std::size_t col, const char* name) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return parse_double(s, col, name);
    };
    p.best_energy = opt(cols[2], 3, "best_energy");
    p.mean_energy = opt(cols[3], 4, "mean_energy");
    p.hit_rate = opt(cols[4], 5, "hit_rate");
    p.wall_ms = parse_double(cols[5], 6, "wall_ms");
    p.note = std::string(cols[6]);
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string serialize_params(const SolverParams& params) { return params_json(params).dump(2); }

std::string serialize_report(const EnsembleReport& report, const SamplingPlan& plan,
                             const IsingInstance& inst) {
  ojson doc;
  doc["instance"] = inst.metadata().label;
  doc["n"] = inst.size();
  doc["variant"] = std::string(to_string(plan.variant));
  doc["shots"] = plan.shots;
  doc["base_seed"] = plan.base_seed;
  doc["descent"] = plan.apply_descent;
  doc["params"] = params_json(plan.params);

  ojson best;
  best["energy"] = report.best.energy;
  best["config"] = report.best.config.to_string();
  best["seed"] = report.best.seed;
  best["steps_run"] = report.best.steps_run;
  if (report.best.raw_energy_before_descent) {
    best["raw_energy_before_descent"] = *report.best.raw_energy_before_descent;
  }
  doc["best"] = best;

  ojson energies = ojson::array();
  for (double e : report.energies) energies.push_back(std::isnan(e) ? ojson(nullptr) : ojson(e));
  doc["energies"] = energies;
  ojson diverged = ojson::array();
  for (const auto& d : report.diverged) {
    diverged.push_back({{"shot", d.shot_index}, {"step", d.step}, {"message", d.message}});
  }
  doc["diverged"] = diverged;

  doc["reference_energy"] = report.reference_energy ? ojson(*report.reference_energy) : ojson(nullptr);
  doc["hit_count"] = report.hit_count;
  doc["samples_to_first_hit"] =
      report.samples_to_first_hit ? ojson(*report.samples_to_first_hit) : ojson(nullptr);
  doc["timing"] = {{"total_ms", to_ms(report.total_wall_time)},
                   {"per_shot_mean_ms", to_ms(report.per_shot_mean_wall_time)},
                   {"shot_min_ms", to_ms(report.shot_min_wall_time)},
                   {"shot_max_ms", to_ms(report.shot_max_wall_time)}};
  return doc.dump(2) + "\n";
}

std::string serialize_exact(const ExactSolution& solution, const IsingInstance& inst) {
  ojson doc;
  doc["instance"] = inst.metadata().label;
  doc["n"] = inst.size();
  doc["ground_energy"] = solution.ground_energy;
  ojson configs = ojson::array();
  for (const auto& c : solution.ground_configs) configs.push_back(c.to_string());
  doc["ground_configs"] = configs;
  doc["evaluations"] = solution.evaluations;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

}  // namespace qaia
