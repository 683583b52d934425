#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oamsat/channel_realization.hpp"
#include "oamsat/detection.hpp"
#include "oamsat/turbulence_profile.hpp"

namespace oamsat {

struct SimConfig {
  ChannelGeometry geometry;
  AtmosphereModel atmosphere;
  double waist = 0.15;  ///< w0, m
  int l_max = 4;
  std::vector<int> l0_set{0, 1, 2, 3, 4};
  int n_realizations = 2000;
  AoMode ao;
  std::optional<ApertureSpec> aperture;  ///< nullopt: derive from l_max
  DetectionGrid grid;
  std::uint64_t master_seed = 1;
  int threads = 0;                   ///< 0: OAMSAT_THREADS or hardware concurrency
  int resolution_check_stride = 0;   ///< refine every k-th realization; 0 disables

  /// Throws ValidityError on any violated invariant.
  void validate() const;
};

/// r_t = r_{0 l_max}(0), r_a = r_{0 l_max}(L_max).
ApertureSpec recommended_aperture(int l_max, double waist, double wavelength,
                                  double max_path_length);

/// The configured aperture, or the recommendation for a channel whose
/// longest path ends at `max_satellite_altitude`.
ApertureSpec resolve_aperture(const SimConfig& config, double max_satellite_altitude);

/// Ensemble results for one AO setting.
struct AoResult {
  AoMode ao;
  std::vector<CrosstalkRow> rows;  ///< in l0_set order
  /// samples[l0 index][realization], present only when requested.
  std::vector<std::vector<DetectionDistribution>> samples;

  [[nodiscard]] const CrosstalkRow& row(int l0) const;
  [[nodiscard]] std::span<const DetectionDistribution> samples_for(int l0) const;
};

struct RunResult {
  TurbulenceStats stats;
  ApertureSpec aperture;
  std::vector<int> l0_set;
  std::vector<AoResult> modes;

  [[nodiscard]] const AoResult& result(AoMode ao) const;
  /// Result for the single (or first) evaluated AO mode.
  [[nodiscard]] const AoResult& primary() const { return modes.front(); }
};

struct RunOptions {
  /// AO settings evaluated on the same realizations; empty means {config.ao}.
  std::vector<AoMode> ao_modes;
  bool keep_samples = false;
};

/// Monte Carlo ensemble: channel_stats once, realization i drawn from
/// realization_stream(master_seed, i), detection per l0 and AO mode.
/// Aggregates are bit-identical for any worker count.
RunResult run(const SimConfig& config, const RunOptions& options = {});

/// Same, with an explicitly resolved aperture.
RunResult run(const SimConfig& config, const ApertureSpec& aperture, const RunOptions& options);

enum class SweepAxis { altitude, wavelength, ground, ao };

std::string to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string& name);

struct SweepResult {
  SweepAxis axis = SweepAxis::altitude;
  std::vector<double> values;      ///< SI units (m) or 0/1 for the ao axis
  std::vector<RunResult> points;   ///< one per value
  SimConfig provenance;
};

SweepResult sweep_altitude(const SimConfig& config, std::span<const double> altitudes,
                           const RunOptions& options = {});
SweepResult sweep_wavelength(const SimConfig& config, std::span<const double> wavelengths,
                             const RunOptions& options = {});
SweepResult sweep_ground(const SimConfig& config, std::span<const double> ground_altitudes,
                         const RunOptions& options = {});
SweepResult sweep(const SimConfig& config, SweepAxis axis, std::span<const double> values,
                  const RunOptions& options = {});

/// AO off and on evaluated on one shared realization set; points[0] is off.
SweepResult toggle_ao(const SimConfig& config, const RunOptions& options = {});

/// Worker count: config.threads if positive, else OAMSAT_THREADS, else
/// hardware concurrency.
int resolve_thread_count(int requested);

}  // namespace oamsat
