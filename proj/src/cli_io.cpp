#include "myxo/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "myxo/errors.hpp"
#include "myxo/kinetic_transport_1d.hpp"
#include "myxo/macro_limit.hpp"

namespace myxo {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kNormalization = "mass = dphi * sum_k f_k; dphi = pi / n; angles phi_k = (k - n) pi / n";

const std::vector<std::string> kTimeseriesColumns = {
    "t",  "mass", "rho_plus", "rho_minus", "phibar_plus", "phibar_minus", "first_moment",
    "variance", "m1", "w2_equilibrium", "w2_partial", "lyapunov_H"};

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

// Reads the members of one JSON object and rejects any it was not asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(label() + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string name(const std::string& key) const { return join_path(path_, key); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(name(key) + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(name(key) + " must be finite");
    return d;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_unsigned()) {
      throw ConfigError(name(key) + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(name(key) + " must be an integer");
    return v.get<long long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(name(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(name(key) + " must be a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key \"" + key + "\" in " + label());
    }
  }

 private:
  std::string label() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
auto wrap_invalid(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

ScenarioSpec parse_scenario(Section s) {
  ScenarioSpec spec;
  spec.kind = wrap_invalid(s.name("kind"), [&] { return scenario_kind_from_string(s.string("kind", "two_group_uniform")); });
  spec.mass = s.number("mass", spec.mass);
  spec.mass_plus = s.number("mass_plus", spec.mass_plus);
  spec.mass_minus = s.number("mass_minus", spec.mass_minus);
  spec.band_half_width = s.number("band_half_width", spec.band_half_width);
  spec.amplitude = s.number("amplitude", spec.amplitude);
  if (s.has("point_index")) spec.point_index = s.unsigned_integer("point_index", 0);
  if (s.has("patches")) {
    const auto& arr = s.raw("patches");
    if (!arr.is_array()) throw ConfigError(s.name("patches") + " must be an array");
    spec.patches.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Section p(arr[i], s.name("patches") + "[" + std::to_string(i) + "]");
      Patch patch;
      patch.center = p.number("center", 0.0);
      patch.half_width = p.number("half_width", 0.0);
      patch.mass = p.number("mass", 0.0);
      p.finish();
      spec.patches.push_back(patch);
    }
  }
  if (s.has("atoms")) {
    const auto& arr = s.raw("atoms");
    if (!arr.is_array()) throw ConfigError(s.name("atoms") + " must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Section a(arr[i], s.name("atoms") + "[" + std::to_string(i) + "]");
      Atom atom;
      atom.angle = a.number("angle", 0.0);
      atom.mass = a.number("mass", 0.0);
      a.finish();
      spec.atoms.push_back(atom);
    }
  }
  s.finish();
  return spec;
}

ProfileSpec parse_profile(Section s, ProfileSpec p) {
  p.kind = s.string("kind", p.kind);
  if (p.kind != "constant" && p.kind != "sine" && p.kind != "bump") {
    throw ConfigError(s.name("kind") + " must be constant, sine or bump (got \"" + p.kind + "\")");
  }
  p.base = s.number("base", p.base);
  p.amplitude = s.number("amplitude", p.amplitude);
  p.phase = s.number("phase", p.phase);
  p.center = s.number("center", p.center);
  p.width = s.number("width", p.width);
  if (p.kind == "bump" && !(p.width > 0.0)) throw ConfigError(s.name("width") + " must be > 0");
  s.finish();
  return p;
}

MacroConfig parse_macro(Section s) {
  MacroConfig m;
  const long long cells = s.integer("cells", static_cast<long long>(m.cells));
  if (cells < 1) throw ConfigError(s.name("cells") + " must be >= 1");
  m.cells = static_cast<std::size_t>(cells);
  m.length = s.number("length", m.length);
  if (!(m.length > 0.0)) throw ConfigError(s.name("length") + " must be > 0");
  m.t_end = s.number("t_end", m.t_end);
  if (!(m.t_end >= 0.0)) throw ConfigError(s.name("t_end") + " must be >= 0");
  m.cfl = s.number("cfl", m.cfl);
  if (!(m.cfl > 0.0 && m.cfl <= 1.0)) throw ConfigError(s.name("cfl") + " must lie in (0, 1]");
  m.snapshot_every = s.unsigned_integer("snapshot_every", m.snapshot_every);
  m.rho_floor = s.optional_number("rho_floor");
  if (m.rho_floor && !(*m.rho_floor > 0.0)) throw ConfigError(s.name("rho_floor") + " must be > 0");
  if (s.has("rho_plus")) m.rho_plus = parse_profile(Section(s.raw("rho_plus"), s.name("rho_plus")), m.rho_plus);
  if (s.has("rho_minus")) m.rho_minus = parse_profile(Section(s.raw("rho_minus"), s.name("rho_minus")), m.rho_minus);
  if (s.has("phi_plus")) m.phi_plus = parse_profile(Section(s.raw("phi_plus"), s.name("phi_plus")), m.phi_plus);
  s.finish();
  return m;
}

KineticConfig parse_kinetic(Section s) {
  KineticConfig k;
  k.knudsen = s.number("knudsen", k.knudsen);
  if (!(k.knudsen > 0.0)) throw ConfigError(s.name("knudsen") + " must be > 0");
  k.dt_hom = s.number("dt_hom", k.dt_hom);
  if (!(k.dt_hom > 0.0)) throw ConfigError(s.name("dt_hom") + " must be > 0");
  k.cfl = s.number("cfl", k.cfl);
  if (!(k.cfl > 0.0 && k.cfl <= 1.0)) throw ConfigError(s.name("cfl") + " must lie in (0, 1]");
  k.compare_macro = s.boolean("compare_macro", k.compare_macro);
  s.finish();
  return k;
}

SweepConfig parse_sweep(Section s) {
  SweepConfig sw;
  if (s.has("axes")) {
    const auto& arr = s.raw("axes");
    if (!arr.is_array()) throw ConfigError(s.name("axes") + " must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Section a(arr[i], s.name("axes") + "[" + std::to_string(i) + "]");
      SweepAxis axis;
      axis.key = a.string("key", "");
      if (axis.key.empty()) throw ConfigError(a.name("key") + " must be a non-empty dotted path");
      if (axis.key == "mode" || axis.key.rfind("sweep", 0) == 0 || axis.key == "output_dir") {
        throw ConfigError(a.name("key") + " cannot sweep over \"" + axis.key + "\"");
      }
      if (!a.has("values") || !a.raw("values").is_array()) throw ConfigError(a.name("values") + " must be an array");
      for (const auto& v : a.raw("values")) axis.values.push_back(v);
      if (axis.values.empty()) throw ConfigError("sweep axis \"" + axis.key + "\" is empty");
      a.finish();
      sw.axes.push_back(std::move(axis));
    }
  }
  if (s.has("fit")) {
    Section f(s.raw("fit"), s.name("fit"));
    sw.fit.kind = f.string("kind", sw.fit.kind);
    if (sw.fit.kind != "exponential" && sw.fit.kind != "power" && sw.fit.kind != "none") {
      throw ConfigError(f.name("kind") + " must be exponential, power or none");
    }
    sw.fit.quantity = f.string("quantity", sw.fit.quantity);
    if (sw.fit.quantity == "t" ||
        std::find(kTimeseriesColumns.begin(), kTimeseriesColumns.end(), sw.fit.quantity) == kTimeseriesColumns.end()) {
      throw ConfigError(f.name("quantity") + " must name a timeseries column other than t");
    }
    sw.fit.t_min = f.optional_number("t_min");
    sw.fit.t_max = f.optional_number("t_max");
    f.finish();
  }
  s.finish();
  return sw;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte > 0 ? byte - 1 : 0, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// ---- output ----

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  close_output(out, path);
}

std::optional<double> column_value(const MomentRecord& r, const std::string& col) {
  if (col == "t") return r.time;
  if (col == "mass") return r.total_mass;
  if (col == "rho_plus") return r.rho_plus;
  if (col == "rho_minus") return r.rho_minus;
  if (col == "phibar_plus") return r.phibar_plus;
  if (col == "phibar_minus") return r.phibar_minus;
  if (col == "first_moment") return r.first_moment;
  if (col == "variance") return r.variance;
  if (col == "m1") return r.m1;
  if (col == "w2_equilibrium") return r.w2_to_equilibrium;
  if (col == "w2_partial") return r.w2_to_partial;
  if (col == "lyapunov_H") return r.lyapunov_H;
  return std::nullopt;
}

void write_timeseries(const std::filesystem::path& path, const std::vector<MomentRecord>& records) {
  auto out = open_output(path);
  for (std::size_t c = 0; c < kTimeseriesColumns.size(); ++c) out << (c ? "," : "") << kTimeseriesColumns[c];
  out << '\n';
  for (const auto& r : records) {
    for (std::size_t c = 0; c < kTimeseriesColumns.size(); ++c) {
      out << (c ? "," : "") << format_number(column_value(r, kTimeseriesColumns[c]));
    }
    out << '\n';
  }
  close_output(out, path);
}

void write_heatmap(const std::filesystem::path& path, const AngularGrid& grid, const std::vector<double>& times,
                   const std::vector<std::vector<double>>& columns) {
  auto out = open_output(path);
  out << "angle";
  for (double t : times) out << ',' << format_number(t);
  out << '\n';
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out << format_number(grid.angle(k));
    for (const auto& col : columns) out << ',' << format_number(col[k]);
    out << '\n';
  }
  close_output(out, path);
}

void write_macro_csv(const std::filesystem::path& path, const std::vector<MacroState1D>& states) {
  auto out = open_output(path);
  out << "t,x,rho_plus,rho_minus,phi_plus\n";
  for (const auto& s : states) {
    for (std::size_t i = 0; i < s.cells(); ++i) {
      out << format_number(s.time) << ',' << format_number(s.cell_center(i)) << ',' << format_number(s.rho_plus[i])
          << ',' << format_number(s.rho_minus[i]) << ',' << format_number(s.phi_plus[i]) << '\n';
    }
  }
  close_output(out, path);
}

void write_phase_space(const std::filesystem::path& path, const AngularGrid& grid, const KineticField1D& f) {
  auto out = open_output(path);
  out << "angle";
  for (std::size_t i = 0; i < f.cells; ++i) out << ',' << format_number((static_cast<double>(i) + 0.5) * f.dx());
  out << '\n';
  for (std::size_t k = 0; k < f.angles; ++k) {
    out << format_number(grid.angle(k));
    for (std::size_t i = 0; i < f.cells; ++i) out << ',' << format_number(f.values[i * f.angles + k]);
    out << '\n';
  }
  close_output(out, path);
}

double relative_drift(double initial, double value) {
  const double scale = std::fabs(initial) > 0.0 ? std::fabs(initial) : 1.0;
  return std::fabs(value - initial) / scale;
}

json base_meta(const RunConfig& config) {
  json meta;
  meta["version"] = kVersion;
  meta["mode"] = std::string(to_string(config.mode));
  meta["prng"] = {{"name", std::string(CounterRng::kName)}, {"version", CounterRng::kVersion}};
  meta["normalization"] = kNormalization;
  meta["config"] = to_json(config);
  return meta;
}

MacroState1D initial_macro(const MacroConfig& m) {
  return wrap_invalid("macro", [&] {
    return sample_macro_state(
        m.cells, m.length, [&](double x) { return m.rho_plus(x, m.length); },
        [&](double x) { return m.rho_minus(x, m.length); }, [&](double x) { return m.phi_plus(x, m.length); });
  });
}

std::array<double, 3> conserved_integrals(const MacroState1D& s) {
  std::array<double, 3> q{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < s.cells(); ++i) {
    q[0] += s.rho_plus[i];
    q[1] += s.rho_minus[i];
    q[2] += (s.rho_plus[i] + s.rho_minus[i]) * s.phi_plus[i];
  }
  for (auto& v : q) v *= s.dx();
  return q;
}

struct HomogeneousResult {
  std::vector<MomentRecord> records;
  std::size_t steps = 0;
  json meta;
};

HomogeneousResult run_homogeneous(const RunConfig& config) {
  const auto grid = build_grid(config.n);
  const auto tables = build_tables(grid, config.cross_section, config.compensated_summation);
  ScenarioSpec spec = config.scenario;
  spec.seed = config.seed;
  const auto initial = make_initial(grid, spec);

  std::vector<double> times;
  std::vector<std::vector<double>> columns;
  IntegrateOptions opts;
  opts.keep_states = false;
  opts.observer = [&](const DistributionState& s, const MomentRecord&) {
    times.push_back(s.time);
    columns.push_back(s.values);
  };
  const auto traj = integrate(tables, initial, config.integration, opts);

  ensure_dir(config.output_dir);
  write_timeseries(config.output_dir / "timeseries.csv", traj.records);
  write_heatmap(config.output_dir / "heatmap.csv", grid, times, columns);

  HomogeneousResult res;
  res.steps = traj.steps;
  res.meta = base_meta(config);
  const auto& r0 = traj.records.front();
  json drift = {{"mass", 0.0}, {"rho_plus", 0.0}, {"rho_minus", 0.0}, {"first_moment", 0.0}};
  for (const auto& r : traj.records) {
    drift["mass"] = std::max(drift["mass"].get<double>(), relative_drift(r0.total_mass, r.total_mass));
    drift["rho_plus"] = std::max(drift["rho_plus"].get<double>(), relative_drift(r0.rho_plus, r.rho_plus));
    drift["rho_minus"] = std::max(drift["rho_minus"].get<double>(), relative_drift(r0.rho_minus, r.rho_minus));
    // The angular moment can vanish (symmetric data); it is measured against pi * mass.
    const double scale = std::max(std::fabs(r0.first_moment), std::numbers::pi * r0.total_mass);
    drift["first_moment"] = std::max(drift["first_moment"].get<double>(), std::fabs(r.first_moment - r0.first_moment) / scale);
  }
  res.meta["drift"] = drift;
  res.meta["drift_note"] = traj.target ? "max relative drift over snapshots"
                                       : "max relative drift over snapshots; group quantities are not conserved "
                                         "for data outside the two groups";
  json events = json::array();
  for (const auto& e : traj.negativity_events) {
    events.push_back({{"step", e.step}, {"time", e.time}, {"clamped", e.clamped}, {"min_value", e.min_value}});
  }
  res.meta["negativity_events"] = events;
  res.meta["steps"] = traj.steps;
  res.meta["snapshots"] = traj.records.size();
  if (spec.kind == ScenarioKind::PerturbedUniformPoint) res.meta["perturbation_index"] = perturbation_index(grid, spec);
  if (traj.target) {
    res.meta["equilibrium_target"] = {{"rho_plus", traj.target->rho_plus},
                                      {"rho_minus", traj.target->rho_minus},
                                      {"phi_plus", traj.target->phi_plus}};
  }
  res.records = traj.records;
  return res;
}

json run_macro_mode(const RunConfig& config, std::size_t& steps) {
  const auto m0 = initial_macro(config.macro);
  MacroOptions opts;
  opts.cfl = config.macro.cfl;
  opts.rho_floor = config.macro.rho_floor;
  const auto run = run_macro(m0, config.macro.t_end, opts, config.macro.snapshot_every);
  ensure_dir(config.output_dir);
  write_macro_csv(config.output_dir / "macro.csv", run.snapshots);

  json meta = base_meta(config);
  const auto q0 = conserved_integrals(m0);
  const auto q1 = conserved_integrals(run.snapshots.back());
  meta["drift"] = {{"rho_plus", relative_drift(q0[0], q1[0])},
                   {"rho_minus", relative_drift(q0[1], q1[1])},
                   {"angle_moment", relative_drift(q0[2], q1[2])}};
  const double tv0 = total_variation_phi(m0);
  meta["phi_plus_total_variation"] = {{"initial", tv0}, {"final", total_variation_phi(run.snapshots.back())}};
  meta["floored_cells"] = run.floored_cells;
  meta["steps"] = run.steps;
  steps = run.steps;
  return meta;
}

json run_kinetic_mode(const RunConfig& config, std::size_t& steps) {
  const auto grid = build_grid(config.n);
  const auto tables = build_tables(grid, config.cross_section, config.compensated_summation);
  const auto m0 = initial_macro(config.macro);
  const auto f0 = wrap_invalid("macro.phi_plus", [&] { return equilibrium_field(grid, m0, config.kinetic.knudsen); });

  KineticOptions kopts;
  kopts.cfl = config.kinetic.cfl;
  kopts.dt_hom = config.kinetic.dt_hom;
  kopts.negativity_policy = config.integration.negativity_policy;
  const auto run = run_kinetic(tables, f0, config.macro.t_end, kopts, config.macro.snapshot_every);

  ensure_dir(config.output_dir);
  std::vector<MacroState1D> projected;
  json phase_files = json::array();
  for (std::size_t s = 0; s < run.snapshots.size(); ++s) {
    projected.push_back(macro_projection(grid, run.snapshots[s]));
    char name[32];
    std::snprintf(name, sizeof name, "phase_%04zu.csv", s);
    write_phase_space(config.output_dir / name, grid, run.snapshots[s]);
    phase_files.push_back({{"file", name}, {"t", run.snapshots[s].time}});
  }
  write_macro_csv(config.output_dir / "kinetic_moments.csv", projected);

  json meta = base_meta(config);
  const double mass0 = kinetic_mass(grid, run.snapshots.front());
  meta["drift"] = {{"mass", relative_drift(mass0, kinetic_mass(grid, run.snapshots.back()))}};
  meta["phase_space_snapshots"] = phase_files;
  meta["steps"] = run.steps;
  steps = run.steps;

  if (config.kinetic.compare_macro) {
    MacroOptions mopts;
    mopts.cfl = config.macro.cfl;
    mopts.rho_floor = config.macro.rho_floor;
    const auto mrun = run_macro(m0, config.macro.t_end, mopts, config.macro.snapshot_every);
    write_macro_csv(config.output_dir / "macro.csv", mrun.snapshots);
    const double tv0 = total_variation_phi(m0);
    const double tv1 = total_variation_phi(mrun.snapshots.back());
    meta["comparison"] = {
        {"l1_moment_discrepancy", l1_moment_discrepancy(projected.back(), mrun.snapshots.back())},
        {"t", projected.back().time},
        {"macro_tv_ratio", tv0 > 0.0 ? tv1 / tv0 : 1.0},
        {"within_smooth_window", tv0 > 0.0 ? tv1 <= 2.0 * tv0 : true},
    };
  }
  return meta;
}

void set_path(json& doc, std::string_view key_path, json value) {
  if (key_path.empty()) throw ConfigError("empty override key");
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key_path.find('.', start);
    const std::string key(key_path.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (key.empty()) throw ConfigError("malformed key path \"" + std::string(key_path) + "\"");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError("key path \"" + std::string(key_path) + "\" crosses a non-object value");
      *node = json::object();
    }
    if (dot == std::string_view::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::string csv_cell(const json& v) {
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

json run_sweep_mode(const RunConfig& config, std::size_t& steps) {
  const auto& axes = config.sweep.axes;
  if (axes.empty()) throw ConfigError("sweep.axes must list at least one axis");
  for (const auto& a : axes) {
    if (a.values.empty()) throw ConfigError("sweep axis \"" + a.key + "\" is empty");
  }
  ensure_dir(config.output_dir);
  const auto summary_path = config.output_dir / "summary.csv";
  auto summary = open_output(summary_path);
  summary << "run";
  for (const auto& a : axes) summary << ',' << a.key;
  summary << ",status,error_class,fit_kind,fit_value,fit_intercept,fit_residual_rms,fit_points,output_dir\n";

  std::vector<std::size_t> idx(axes.size(), 0);
  std::size_t run_id = 0, failures = 0;
  steps = 0;
  json runs = json::array();
  while (true) {
    json doc = config.source;
    doc.erase("sweep");
    doc["mode"] = "homogeneous";
    char dirname[32];
    std::snprintf(dirname, sizeof dirname, "run_%04zu", run_id);
    doc["output_dir"] = (config.output_dir / dirname).string();

    std::string status = "ok", error_class;
    std::optional<FitResult> fit;
    try {
      for (std::size_t a = 0; a < axes.size(); ++a) set_path(doc, axes[a].key, axes[a].values[idx[a]]);
      const auto sub = parse_config(doc);
      auto res = run_homogeneous(sub);
      steps += res.steps;
      write_json(sub.output_dir / "meta.json", res.meta);
      if (config.sweep.fit.kind != "none") {
        std::vector<double> t, y;
        for (const auto& r : res.records) {
          const auto v = column_value(r, config.sweep.fit.quantity);
          if (!v) continue;
          t.push_back(r.time);
          y.push_back(*v);
        }
        const FitWindow w{config.sweep.fit.t_min.value_or(0.0), config.sweep.fit.t_max.value_or(sub.integration.t_end)};
        try {
          fit = config.sweep.fit.kind == "exponential" ? fit_exponential(t, y, w) : fit_power(t, y, w);
        } catch (const Error& e) {
          status = "fit_failed";
          error_class = e.error_class();
        }
      }
    } catch (const Error& e) {
      status = "failed";
      error_class = e.error_class();
      ++failures;
    } catch (const std::exception& e) {
      status = "failed";
      error_class = "std::exception";
      ++failures;
    }

    summary << run_id;
    for (std::size_t a = 0; a < axes.size(); ++a) summary << ',' << csv_cell(axes[a].values[idx[a]]);
    summary << ',' << status << ',' << error_class << ',' << config.sweep.fit.kind << ','
            << (fit ? format_number(fit->value) : "") << ',' << (fit ? format_number(fit->intercept) : "") << ','
            << (fit ? format_number(fit->residual_rms) : "") << ',' << (fit ? std::to_string(fit->points) : "")
            << ',' << dirname << '\n';
    runs.push_back({{"run", run_id}, {"status", status}, {"error_class", error_class}});

    ++run_id;
    bool done = true;
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++idx[a] < axes[a].values.size()) {
        done = false;
        break;
      }
      idx[a] = 0;
    }
    if (done) break;
  }
  close_output(summary, summary_path);

  json meta = base_meta(config);
  meta["runs"] = runs;
  meta["failures"] = failures;
  meta["steps"] = steps;
  return meta;
}

}  // namespace

std::string_view to_string(RunMode mode) noexcept {
  switch (mode) {
    case RunMode::Homogeneous: return "homogeneous";
    case RunMode::Macro: return "macro";
    case RunMode::Kinetic1D: return "kinetic1d";
    case RunMode::Sweep: return "sweep";
  }
  return "homogeneous";
}

RunMode run_mode_from_string(std::string_view name) {
  if (name == "homogeneous") return RunMode::Homogeneous;
  if (name == "macro") return RunMode::Macro;
  if (name == "kinetic1d") return RunMode::Kinetic1D;
  if (name == "sweep") return RunMode::Sweep;
  throw ConfigError("mode must be homogeneous, macro, kinetic1d or sweep (got \"" + std::string(name) + "\")");
}

double ProfileSpec::operator()(double x, double length) const {
  if (kind == "sine") return base + amplitude * std::sin(2.0 * std::numbers::pi * x / length + phase);
  if (kind == "bump") {
    double d = std::fmod(std::fabs(x - center), length);
    d = std::min(d, length - d);
    return base + amplitude * std::exp(-(d / width) * (d / width));
  }
  return base;
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::string msg = e.what();
    const auto head = msg.find("parse error");
    const auto colon = head == std::string::npos ? std::string::npos : msg.find(": ", head);
    throw ConfigError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                      (colon == std::string::npos ? msg : msg.substr(colon + 2)));
  }
  return parse_config(doc);
}

RunConfig parse_config(const json& doc) {
  RunConfig c;
  Section top(doc, "");
  c.mode = run_mode_from_string(top.string("mode", "homogeneous"));
  if (top.has("grid")) {
    Section g(top.raw("grid"), "grid");
    const long long n = g.integer("n", c.n);
    if (n < 3 || n % 2 == 0) throw ConfigError("grid.n must be odd and >= 3 (got " + std::to_string(n) + ")");
    if (n > 100001) throw ConfigError("grid.n is unreasonably large");
    c.n = static_cast<int>(n);
    g.finish();
  }
  c.cross_section =
      wrap_invalid("cross_section", [&] { return cross_section_from_string(top.string("cross_section", "maxwellian")); });
  if (top.has("scenario")) c.scenario = parse_scenario(Section(top.raw("scenario"), "scenario"));
  if (top.has("integration")) {
    Section s(top.raw("integration"), "integration");
    c.integration.dt = s.number("dt", c.integration.dt);
    c.integration.t_end = s.number("t_end", c.integration.t_end);
    c.integration.snapshot_stride = s.unsigned_integer("snapshot_stride", c.integration.snapshot_stride);
    c.integration.negativity_policy = wrap_invalid(s.name("negativity_policy"), [&] {
      return negativity_policy_from_string(s.string("negativity_policy", "abort"));
    });
    s.finish();
    wrap_invalid("integration", [&] {
      c.integration.validate();
      return 0;
    });
  }
  c.compensated_summation = top.boolean("compensated_summation", false);
  c.output_dir = top.string("output_dir", "out");
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
  c.seed = top.unsigned_integer("seed", 0);
  if (top.has("macro")) c.macro = parse_macro(Section(top.raw("macro"), "macro"));
  if (top.has("kinetic")) c.kinetic = parse_kinetic(Section(top.raw("kinetic"), "kinetic"));
  if (top.has("sweep")) c.sweep = parse_sweep(Section(top.raw("sweep"), "sweep"));
  top.finish();

  // Semantic validation of the pieces this mode uses.
  c.scenario.seed = c.seed;
  if (c.mode == RunMode::Homogeneous || c.mode == RunMode::Sweep) {
    const auto grid = build_grid(c.n);
    if (c.mode == RunMode::Homogeneous) wrap_invalid("scenario", [&] { return make_initial(grid, c.scenario); });
  }
  if (c.mode == RunMode::Macro || c.mode == RunMode::Kinetic1D) {
    const auto m0 = initial_macro(c.macro);
    if (c.mode == RunMode::Kinetic1D) {
      wrap_invalid("macro.phi_plus", [&] { return equilibrium_field(build_grid(c.n), m0, c.kinetic.knudsen); });
    }
  }
  if (c.mode == RunMode::Sweep && c.sweep.axes.empty()) throw ConfigError("sweep.axes must list at least one axis");
  c.source = doc;
  return c;
}

void apply_override(json& doc, std::string_view key_path, std::string_view raw) {
  json value;
  try {
    value = json::parse(raw.begin(), raw.end());
  } catch (const json::parse_error&) {
    value = std::string(raw);
  }
  set_path(doc, key_path, std::move(value));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

json to_json(const RunConfig& c) {
  json j;
  j["mode"] = std::string(to_string(c.mode));
  j["grid"] = {{"n", c.n}};
  j["cross_section"] = std::string(to_string(c.cross_section));
  json sc = {{"kind", std::string(to_string(c.scenario.kind))},
             {"mass", c.scenario.mass},
             {"mass_plus", c.scenario.mass_plus},
             {"mass_minus", c.scenario.mass_minus},
             {"band_half_width", c.scenario.band_half_width},
             {"amplitude", c.scenario.amplitude}};
  if (c.scenario.point_index) sc["point_index"] = *c.scenario.point_index;
  json patches = json::array();
  for (const auto& p : c.scenario.patches) {
    patches.push_back({{"center", p.center}, {"half_width", p.half_width}, {"mass", p.mass}});
  }
  sc["patches"] = patches;
  json atoms = json::array();
  for (const auto& a : c.scenario.atoms) atoms.push_back({{"angle", a.angle}, {"mass", a.mass}});
  sc["atoms"] = atoms;
  j["scenario"] = sc;
  j["integration"] = {{"dt", c.integration.dt},
                      {"t_end", c.integration.t_end},
                      {"snapshot_stride", c.integration.snapshot_stride},
                      {"negativity_policy", std::string(to_string(c.integration.negativity_policy))}};
  j["compensated_summation"] = c.compensated_summation;
  j["output_dir"] = c.output_dir.string();
  j["seed"] = c.seed;
  const auto profile = [](const ProfileSpec& p) {
    return json{{"kind", p.kind},     {"base", p.base},     {"amplitude", p.amplitude},
                {"phase", p.phase},   {"center", p.center}, {"width", p.width}};
  };
  j["macro"] = {{"cells", c.macro.cells},
                {"length", c.macro.length},
                {"t_end", c.macro.t_end},
                {"cfl", c.macro.cfl},
                {"snapshot_every", c.macro.snapshot_every},
                {"rho_plus", profile(c.macro.rho_plus)},
                {"rho_minus", profile(c.macro.rho_minus)},
                {"phi_plus", profile(c.macro.phi_plus)}};
  if (c.macro.rho_floor) j["macro"]["rho_floor"] = *c.macro.rho_floor;
  j["kinetic"] = {{"knudsen", c.kinetic.knudsen},
                  {"dt_hom", c.kinetic.dt_hom},
                  {"cfl", c.kinetic.cfl},
                  {"compare_macro", c.kinetic.compare_macro}};
  if (c.mode == RunMode::Sweep) {
    json axes = json::array();
    for (const auto& a : c.sweep.axes) axes.push_back({{"key", a.key}, {"values", a.values}});
    json fit = {{"kind", c.sweep.fit.kind}, {"quantity", c.sweep.fit.quantity}};
    if (c.sweep.fit.t_min) fit["t_min"] = *c.sweep.fit.t_min;
    if (c.sweep.fit.t_max) fit["t_max"] = *c.sweep.fit.t_max;
    j["sweep"] = {{"axes", axes}, {"fit", fit}};
  }
  return j;
}

RunOutcome run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  out.output_dir = config.output_dir;
  switch (config.mode) {
    case RunMode::Homogeneous: {
      auto res = run_homogeneous(config);
      out.steps = res.steps;
      out.meta = std::move(res.meta);
      break;
    }
    case RunMode::Macro: out.meta = run_macro_mode(config, out.steps); break;
    case RunMode::Kinetic1D: out.meta = run_kinetic_mode(config, out.steps); break;
    case RunMode::Sweep: out.meta = run_sweep_mode(config, out.steps); break;
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.meta["wall_clock_seconds"] = out.wall_seconds;
  write_json(config.output_dir / "meta.json", out.meta);
  return out;
}

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const NegativityDetected*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e)) return 4;
  if (dynamic_cast<const Error*>(&e)) return 5;
  return 1;
}

json error_json(const std::exception& e) {
  const auto* me = dynamic_cast<const Error*>(&e);
  json j = {{"error_class", me ? me->error_class() : "InternalError"}, {"message", e.what()}};
  if (const auto* neg = dynamic_cast<const NegativityDetected*>(&e)) {
    j["step"] = neg->step();
    j["min_value"] = neg->min_value();
  }
  return j;
}

int run_guarded(const RunConfig& config, std::ostream& err) {
  try {
    run(config);
    return 0;
  } catch (const std::exception& e) {
    err << error_json(e).dump() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace myxo
