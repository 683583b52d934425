// oamsat: OAM detection probabilities for turbulent satellite downlinks.
//
//   oamsat channel-params <config> [--json <path|->]
//   oamsat run <config> --out <csv> [--seed n] [--realizations n] [--ao on|off] [--threads n]
//   oamsat sweep <config> --axis altitude|wavelength|ground --values v1,v2,... --out <csv>
//
// Exit codes: 0 success, 1 I/O or unexpected failure, 2 config error,
// 3 validity error, 4 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include "oamsat/config.hpp"
#include "oamsat/errors.hpp"
#include "oamsat/lg_modes.hpp"
#include "oamsat/report.hpp"
#include "oamsat/simulation.hpp"

namespace {

using namespace oamsat;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigFailure = 2,
  kValidityFailure = 3,
  kNumericalFailure = 4,
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> realizations;
  std::optional<std::string> ao;
  std::optional<int> threads;

  void apply(SimConfig& cfg) const {
    if (seed) cfg.master_seed = *seed;
    if (realizations) cfg.n_realizations = *realizations;
    if (threads) cfg.threads = *threads;
    if (ao) {
      if (*ao == "on") cfg.ao.enabled = true;
      else if (*ao == "off") cfg.ao.enabled = false;
      else throw ConfigError("--ao expects on or off");
    }
  }
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Master seed (overrides config)");
  cmd->add_option("--realizations", o.realizations, "Number of turbulence realizations");
  cmd->add_option("--ao", o.ao, "Ideal adaptive optics: on|off")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--threads", o.threads, "Worker threads (default: OAMSAT_THREADS or all cores)");
}

// "500km", "3000m", "1550nm", "1.55um" or a bare number in metres.
double parse_length(const std::string& text) {
  static const std::pair<const char*, double> units[] = {
      {"km", 1e3}, {"nm", 1e-9}, {"um", 1e-6}, {"mm", 1e-3}, {"cm", 1e-2}, {"m", 1.0}};
  for (const auto& [suffix, factor] : units) {
    const std::string s(suffix);
    if (text.size() > s.size() && text.compare(text.size() - s.size(), s.size(), s) == 0) {
      return std::stod(text.substr(0, text.size() - s.size())) * factor;
    }
  }
  return std::stod(text);
}

std::vector<double> parse_values(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& item : items) {
    try {
      const double v = parse_length(item);
      if (!std::isfinite(v)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--values: cannot parse '" + item + "'");
    }
  }
  return out;
}

int cmd_channel_params(const std::string& config_path, const std::string& json_target) {
  const SimConfig cfg = load_config(config_path);
  cfg.validate();
  const TurbulenceStats stats = channel_stats(cfg.geometry, cfg.atmosphere, cfg.waist);
  const double L = cfg.geometry.path_length();
  const ApertureSpec rec = recommended_aperture(cfg.l_max, cfg.waist, cfg.geometry.wavelength, L);
  const double w_rx = beam_width(LGMode(0, 0, cfg.waist, cfg.geometry.wavelength), L);

  nlohmann::json j;
  j["path_length_m"] = L;
  j["beam_width_at_receiver_m"] = w_rx;
  j["stats"] = stats_to_json(stats);
  j["recommended_aperture"] = {{"transmitter_radius_m", rec.transmitter_radius},
                               {"receiver_radius_m", rec.receiver_radius},
                               {"l_max", cfg.l_max}};

  if (json_target == "-") {
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  std::printf("path length L             : %.6g m\n", L);
  std::printf("beam width w(L)           : %.6g m\n", w_rx);
  std::printf("Rytov variance            : %.6g\n", stats.rytov_variance);
  std::printf("scintillation index       : %.6g\n", stats.scintillation_index);
  std::printf("Fried parameter r_F       : %.6g m\n", stats.fried_parameter);
  std::printf("Fresnel ratio Omega       : %.6g\n", stats.fresnel_ratio);
  std::printf("centroid variance <x0^2>  : %.6g m^2\n", stats.var_x0);
  std::printf("<Theta>, Var, Cov         : %.6g, %.6g, %.6g\n", stats.theta_mean, stats.var_theta,
              stats.cov_theta);
  std::printf("recommended r_t (l_max=%d) : %.4f m\n", cfg.l_max, rec.transmitter_radius);
  std::printf("recommended r_a (l_max=%d) : %.4f m\n", cfg.l_max, rec.receiver_radius);
  if (!json_target.empty()) write_file_atomically(json_target, j.dump(2) + "\n");
  return kOk;
}

void write_outputs(const std::filesystem::path& csv_path, const std::string& csv,
                   const nlohmann::json& manifest) {
  const auto manifest_path = manifest_path_for(csv_path);
  write_file_atomically(csv_path, csv);
  try {
    write_file_atomically(manifest_path, manifest.dump(2) + "\n");
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(csv_path, ignored);
    throw;
  }
  std::cerr << "wrote " << csv_path.string() << " and " << manifest_path.string() << '\n';
}

int cmd_run(const std::string& config_path, const std::string& out, const Overrides& overrides) {
  SimConfig cfg = load_config(config_path);
  overrides.apply(cfg);
  cfg.validate();
  const RunResult result = run(cfg);
  write_outputs(out, crosstalk_csv(result.primary()), run_manifest(cfg, result));
  return kOk;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_name,
              const std::vector<std::string>& raw_values, const std::string& out,
              const Overrides& overrides) {
  SimConfig cfg = load_config(config_path);
  overrides.apply(cfg);
  const SweepAxis axis = parse_sweep_axis(axis_name);
  if (axis == SweepAxis::ao) throw ConfigError("--axis must be altitude, wavelength or ground");
  const std::vector<double> values = parse_values(raw_values);
  const SweepResult result = sweep(cfg, axis, values);
  write_outputs(out, sweep_csv(result), sweep_manifest(result));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OAM detection probabilities for turbulent satellite-to-ground channels"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  std::string config_path;
  std::string json_target;
  auto* params = app.add_subcommand("channel-params", "Print derived turbulence statistics");
  params->add_option("config", config_path, "Configuration file")->required();
  params->add_option("--json", json_target, "Also write JSON to this path ('-' prints JSON only)");

  std::string out;
  Overrides run_overrides;
  auto* run_cmd = app.add_subcommand("run", "Monte Carlo crosstalk matrix for one configuration");
  run_cmd->add_option("config", config_path, "Configuration file or run manifest")->required();
  run_cmd->add_option("--out", out, "Output CSV path (manifest written alongside)")->required();
  add_overrides(run_cmd, run_overrides);

  std::string axis;
  std::vector<std::string> values;
  Overrides sweep_overrides;
  auto* sweep_cmd = app.add_subcommand("sweep", "Repeat the run over one parameter axis");
  sweep_cmd->add_option("config", config_path, "Configuration file or manifest")->required();
  sweep_cmd->add_option("--axis", axis, "altitude|wavelength|ground")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values, e.g. 200km,350km,500km")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--out", out, "Output CSV path (manifest written alongside)")->required();
  add_overrides(sweep_cmd, sweep_overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  try {
    if (*params) return cmd_channel_params(config_path, json_target);
    if (*run_cmd) return cmd_run(config_path, out, run_overrides);
    if (*sweep_cmd) return cmd_sweep(config_path, axis, values, out, sweep_overrides);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const ValidityError& e) {
    std::cerr << "validity error: " << e.what() << '\n';
    return kValidityFailure;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
