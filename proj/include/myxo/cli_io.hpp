#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "myxo/collision_kernel.hpp"
#include "myxo/scenarios.hpp"
#include "myxo/time_integrator.hpp"

namespace myxo {

enum class RunMode { Homogeneous, Macro, Kinetic1D, Sweep };

std::string_view to_string(RunMode mode) noexcept;
RunMode run_mode_from_string(std::string_view name);

/// Spatial profile p(x) on [0, length):
///  constant: base
///  sine:     base + amplitude sin(2 pi x / length + phase)
///  bump:     base + amplitude exp(-((x - center) / width)^2)   (periodic distance)
struct ProfileSpec {
  std::string kind = "constant";
  double base = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double center = 0.5;
  double width = 0.1;

  double operator()(double x, double length) const;
};

struct MacroConfig {
  std::size_t cells = 200;
  double length = 1.0;
  double t_end = 0.5;
  double cfl = 0.9;
  std::size_t snapshot_every = 0;
  std::optional<double> rho_floor;
  ProfileSpec rho_plus{"constant", 0.5};
  ProfileSpec rho_minus{"constant", 0.5};
  ProfileSpec phi_plus{"constant", 1.0471975511965976};
};

struct KineticConfig {
  double knudsen = 0.1;
  double dt_hom = 0.01;
  double cfl = 0.9;
  bool compare_macro = true;
};

struct FitSpec {
  std::string kind = "exponential";  ///< exponential | power | none
  std::string quantity = "variance";  ///< any numeric timeseries column
  std::optional<double> t_min;
  std::optional<double> t_max;
};

struct SweepAxis {
  std::string key;  ///< dotted config path, e.g. "integration.dt"
  std::vector<nlohmann::json> values;
};

struct SweepConfig {
  std::vector<SweepAxis> axes;
  FitSpec fit;
};

/// Fully validated description of one invocation.
struct RunConfig {
  RunMode mode = RunMode::Homogeneous;
  int n = 201;
  CrossSection cross_section = CrossSection::Maxwellian;
  ScenarioSpec scenario;
  IntegrationConfig integration;
  bool compensated_summation = false;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  MacroConfig macro;
  KineticConfig kinetic;
  SweepConfig sweep;
  /// Document the config was parsed from, after overrides.
  nlohmann::json source;
};

/// Parses and validates a JSON config. Unknown keys, type errors and invalid
/// values throw ConfigError naming the offending field; syntax errors report
/// line and column.
RunConfig parse_config(std::string_view text);
RunConfig parse_config(const nlohmann::json& doc);
inline RunConfig parse_config(const char* text) { return parse_config(std::string_view(text)); }

/// Sets a dotted path in a JSON document, creating objects on the way.
/// `raw` is parsed as JSON when possible and taken as a string otherwise.
void apply_override(nlohmann::json& doc, std::string_view key_path, std::string_view raw);

/// Shortest round-trip decimal form; empty for an absent value.
std::string format_number(double v);
std::string format_number(const std::optional<double>& v);

/// Normalised config as written to meta.json.
nlohmann::json to_json(const RunConfig& config);

struct RunOutcome {
  std::filesystem::path output_dir;
  std::size_t steps = 0;
  double wall_seconds = 0.0;
  nlohmann::json meta;
};

/// Runs the configured mode and writes its files into output_dir. Throws
/// myxo::Error subclasses on failure (IoError if files cannot be written).
RunOutcome run(const RunConfig& config);

/// Exit code for an exception thrown by run():
///  2 ConfigError, 3 NegativityDetected, 4 IoError, 5 other library error,
///  1 anything else.
int exit_code_for(const std::exception& e) noexcept;

/// {"error_class": ..., "message": ...}
nlohmann::json error_json(const std::exception& e);

/// run() with errors mapped to exit codes; the error JSON goes to `err`.
int run_guarded(const RunConfig& config, std::ostream& err);

}  // namespace myxo
