#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "myxo/cli_io.hpp"
#include "myxo/errors.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
  std::string cross_section;
  std::optional<long long> n;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<unsigned long long> seed;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("config", f.config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  sub->add_option("--set", f.overrides, "Override a config key, e.g. --set integration.dt=0.01")->take_all();
  sub->add_option("-o,--output-dir", f.output_dir, "Output directory (overrides output_dir)");
  sub->add_option("--cross-section", f.cross_section, "maxwellian or rod");
  sub->add_option("-n,--n", f.n, "Grid parameter n (grid.n)");
  sub->add_option("--dt", f.dt, "Time step (integration.dt)");
  sub->add_option("--t-end", f.t_end, "Final time (integration.t_end, or macro.t_end for macro/kinetic1d)");
  sub->add_option("--seed", f.seed, "PRNG seed");
}

nlohmann::json load(const CommonFlags& f, const char* mode) {
  std::ifstream in(f.config_path, std::ios::binary);
  if (!in) throw myxo::ConfigError("cannot read config file " + f.config_path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  // parse_config reports syntax errors with line and column.
  myxo::parse_config(std::string_view(text).empty() ? std::string_view("{}") : std::string_view(text));
  auto doc = nlohmann::json::parse(text.empty() ? std::string("{}") : text);
  if (mode != nullptr) doc["mode"] = mode;
  const bool spatial = mode != nullptr && (std::string(mode) == "macro" || std::string(mode) == "kinetic1d");
  if (!f.output_dir.empty()) doc["output_dir"] = f.output_dir;
  if (!f.cross_section.empty()) doc["cross_section"] = f.cross_section;
  if (f.n) doc["grid"]["n"] = *f.n;
  if (f.dt) doc["integration"]["dt"] = *f.dt;
  if (f.t_end) doc[spatial ? "macro" : "integration"]["t_end"] = *f.t_end;
  if (f.seed) doc["seed"] = *f.seed;
  for (const auto& o : f.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw myxo::ConfigError("--set expects key.path=value, got \"" + o + "\"");
    myxo::apply_override(doc, o.substr(0, eq), o.substr(eq + 1));
  }
  return doc;
}

int report(const std::exception& e) {
  std::cerr << myxo::error_json(e).dump() << '\n';
  return myxo::exit_code_for(e);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic nematic alignment simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "myxo 0.1.0");

  CommonFlags sim, mac, kin, swp, val;
  auto* s_sim = app.add_subcommand("simulate", "Spatially homogeneous run");
  auto* s_mac = app.add_subcommand("macro", "Macroscopic finite-volume run");
  auto* s_kin = app.add_subcommand("kinetic1d", "1D kinetic run with optional macro comparison");
  auto* s_swp = app.add_subcommand("sweep", "Parameter sweep of homogeneous runs");
  auto* s_val = app.add_subcommand("validate-config", "Parse and validate a config, print it normalised");
  add_common(s_sim, sim);
  add_common(s_mac, mac);
  add_common(s_kin, kin);
  add_common(s_swp, swp);
  add_common(s_val, val);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (s_val->parsed()) {
      const auto cfg = myxo::parse_config(load(val, nullptr));
      std::cout << myxo::to_json(cfg).dump(2) << '\n';
      return 0;
    }
    CommonFlags* flags = &sim;
    const char* mode = "homogeneous";
    if (s_mac->parsed()) flags = &mac, mode = "macro";
    if (s_kin->parsed()) flags = &kin, mode = "kinetic1d";
    if (s_swp->parsed()) flags = &swp, mode = "sweep";
    const auto cfg = myxo::parse_config(load(*flags, mode));
    const auto out = myxo::run(cfg);
    std::cout << "wrote " << out.output_dir.string() << " (" << out.steps << " steps, " << out.wall_seconds
              << " s)\n";
    return 0;
  } catch (const std::exception& e) {
    return report(e);
  }
}
