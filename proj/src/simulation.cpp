#include "oamsat/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "oamsat/errors.hpp"
#include "oamsat/lg_modes.hpp"

namespace oamsat {

void SimConfig::validate() const {
  geometry.validate();
  atmosphere.validate();
  if (!(waist > 0.0) || !std::isfinite(waist)) throw ValidityError("config: waist must be positive");
  if (l_max < 0) throw ValidityError("config: l_max must be >= 0");
  if (l0_set.empty()) throw ValidityError("config: l0 set is empty");
  for (int l0 : l0_set) {
    if (std::abs(l0) > l_max)
      throw ValidityError("config: l0=" + std::to_string(l0) + " outside [-l_max, l_max]");
  }
  if (n_realizations < 1) throw ValidityError("config: need at least one realization");
  if (resolution_check_stride < 0) throw ValidityError("config: resolution check stride must be >= 0");
  grid.validate_for(l_max);
  if (aperture) aperture->validate();
}

ApertureSpec recommended_aperture(int l_max, double waist, double wavelength,
                                  double max_path_length) {
  const LGMode widest(0, l_max, waist, wavelength);
  return {effective_radius(widest, max_path_length), effective_radius(widest, 0.0)};
}

ApertureSpec resolve_aperture(const SimConfig& config, double max_satellite_altitude) {
  if (config.aperture) return *config.aperture;
  ChannelGeometry longest = config.geometry;
  longest.satellite_altitude = max_satellite_altitude;
  longest.validate();
  return recommended_aperture(config.l_max, config.waist, config.geometry.wavelength,
                              longest.path_length());
}

const CrosstalkRow& AoResult::row(int l0) const {
  for (const auto& r : rows)
    if (r.l0 == l0) return r;
  throw std::out_of_range("AoResult: no row for l0=" + std::to_string(l0));
}

std::span<const DetectionDistribution> AoResult::samples_for(int l0) const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].l0 == l0) {
      if (i >= samples.size()) throw std::logic_error("AoResult: samples were not kept");
      return samples[i];
    }
  }
  throw std::out_of_range("AoResult: no samples for l0=" + std::to_string(l0));
}

const AoResult& RunResult::result(AoMode ao) const {
  for (const auto& m : modes)
    if (m.ao.enabled == ao.enabled) return m;
  throw std::out_of_range(std::string("RunResult: AO ") + (ao.enabled ? "on" : "off") +
                          " was not evaluated");
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("OAMSAT_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<int>(value);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

RunResult run(const SimConfig& config, const RunOptions& options) {
  config.validate();
  return run(config, resolve_aperture(config, config.geometry.satellite_altitude), options);
}

RunResult run(const SimConfig& config, const ApertureSpec& aperture, const RunOptions& options) {
  config.validate();
  aperture.validate();

  std::vector<AoMode> modes = options.ao_modes;
  if (modes.empty()) modes.push_back(config.ao);

  RunResult result;
  result.stats = channel_stats(config.geometry, config.atmosphere, config.waist);
  result.aperture = aperture;
  result.l0_set = config.l0_set;

  const DetectionEngine engine(aperture, config.grid, result.stats.fried_parameter);
  const double z = config.geometry.path_length();
  const std::size_t n_real = static_cast<std::size_t>(config.n_realizations);
  const std::size_t n_l0 = config.l0_set.size();
  const std::size_t n_modes = modes.size();

  std::vector<LGMode> lg_modes;
  lg_modes.reserve(n_l0);
  for (int l0 : config.l0_set)
    lg_modes.emplace_back(0, l0, config.waist, config.geometry.wavelength);

  // slots[(mode * n_l0 + l0) * n_real + i]
  std::vector<DetectionDistribution> slots(n_modes * n_l0 * n_real);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::size_t error_index = n_real;
  std::string error_message;

  const auto worker = [&] {
    std::vector<DetectionDistribution> coarse(n_modes);
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_real || failed.load()) return;
      try {
        const bool check = config.resolution_check_stride > 0 &&
                           i % static_cast<std::size_t>(config.resolution_check_stride) == 0;
        for (std::size_t li = 0; li < n_l0; ++li) {
          RngStream rng = realization_stream(config.master_seed, i);
          const TurbulenceRealization real =
              sample_realization(result.stats, config.l0_set[li], config.waist, rng);
          const ModalPowerSpectrum spec = engine.spectrum(lg_modes[li], real, z);
          for (std::size_t m = 0; m < n_modes; ++m) {
            coarse[m] = engine.project(spec, modes[m]);
            slots[(m * n_l0 + li) * n_real + i] = coarse[m];
          }
          if (check) engine.check_resolution(lg_modes[li], real, z, coarse, modes);
        }
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error_message = e.what();
        }
        failed.store(true);
      }
    }
  };

  const int n_threads =
      std::min<int>(resolve_thread_count(config.threads), static_cast<int>(n_real));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failed.load()) {
    throw NumericalError("realization " + std::to_string(error_index) + ": " + error_message);
  }

  for (std::size_t m = 0; m < n_modes; ++m) {
    AoResult ao_result;
    ao_result.ao = modes[m];
    for (std::size_t li = 0; li < n_l0; ++li) {
      const std::span<const DetectionDistribution> ensemble(
          slots.data() + (m * n_l0 + li) * n_real, n_real);
      ao_result.rows.push_back(crosstalk_row(config.l0_set[li], ensemble));
      if (options.keep_samples) ao_result.samples.emplace_back(ensemble.begin(), ensemble.end());
    }
    result.modes.push_back(std::move(ao_result));
  }
  return result;
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::altitude: return "altitude";
    case SweepAxis::wavelength: return "wavelength";
    case SweepAxis::ground: return "ground";
    case SweepAxis::ao: return "ao";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "altitude") return SweepAxis::altitude;
  if (name == "wavelength") return SweepAxis::wavelength;
  if (name == "ground") return SweepAxis::ground;
  if (name == "ao") return SweepAxis::ao;
  throw ConfigError("unknown sweep axis '" + name + "' (expected altitude, wavelength or ground)");
}

namespace {

SimConfig with_value(const SimConfig& base, SweepAxis axis, double value) {
  SimConfig cfg = base;
  switch (axis) {
    case SweepAxis::altitude: cfg.geometry.satellite_altitude = value; break;
    case SweepAxis::wavelength: cfg.geometry.wavelength = value; break;
    case SweepAxis::ground: cfg.geometry.ground_altitude = value; break;
    case SweepAxis::ao: cfg.ao.enabled = value != 0.0; break;
  }
  return cfg;
}

}  // namespace

SweepResult sweep(const SimConfig& config, SweepAxis axis, std::span<const double> values,
                  const RunOptions& options) {
  if (axis == SweepAxis::ao) {
    if (!values.empty()) throw ConfigError("the ao axis takes no values");
    return toggle_ao(config, options);
  }
  if (values.empty()) throw ConfigError("sweep: no values given");

  // Validate every point before doing any work.
  for (double v : values) with_value(config, axis, v).validate();

  double max_altitude = config.geometry.satellite_altitude;
  if (axis == SweepAxis::altitude) max_altitude = *std::max_element(values.begin(), values.end());

  SweepResult out;
  out.axis = axis;
  out.values.assign(values.begin(), values.end());
  out.provenance = config;
  for (double v : values) {
    const SimConfig point = with_value(config, axis, v);
    out.points.push_back(run(point, resolve_aperture(point, max_altitude), options));
  }
  return out;
}

SweepResult sweep_altitude(const SimConfig& config, std::span<const double> altitudes,
                           const RunOptions& options) {
  return sweep(config, SweepAxis::altitude, altitudes, options);
}

SweepResult sweep_wavelength(const SimConfig& config, std::span<const double> wavelengths,
                             const RunOptions& options) {
  return sweep(config, SweepAxis::wavelength, wavelengths, options);
}

SweepResult sweep_ground(const SimConfig& config, std::span<const double> ground_altitudes,
                         const RunOptions& options) {
  return sweep(config, SweepAxis::ground, ground_altitudes, options);
}

SweepResult toggle_ao(const SimConfig& config, const RunOptions& options) {
  RunOptions paired = options;
  paired.ao_modes = {AoMode{false}, AoMode{true}};
  const RunResult both = run(config, paired);

  SweepResult out;
  out.axis = SweepAxis::ao;
  out.values = {0.0, 1.0};
  out.provenance = config;
  for (const auto& mode : both.modes) {
    RunResult single;
    single.stats = both.stats;
    single.aperture = both.aperture;
    single.l0_set = both.l0_set;
    single.modes.push_back(mode);
    out.points.push_back(std::move(single));
  }
  return out;
}

}  // namespace oamsat
