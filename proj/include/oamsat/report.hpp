#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "oamsat/simulation.hpp"

namespace oamsat {

/// Header of the per-run crosstalk CSV.
inline constexpr const char* kRunCsvHeader = "l0,l_r,mean,p_stderr";
/// Header of the long-format sweep CSV.
inline constexpr const char* kSweepCsvHeader = "axis_value,l0,l_r,mean,p_stderr";

/// %.9g, the float format shared by all CSV outputs.
std::string format_value(double value);

/// One line per (l0, l_r) in l0_set order then ascending l_r.
std::string crosstalk_csv(const AoResult& result);

/// Rows of every sweep point, each prefixed by its axis value (SI units).
std::string sweep_csv(const SweepResult& sweep);

nlohmann::json stats_to_json(const TurbulenceStats& stats);

/// Run manifest: resolved config, derived statistics, aperture, tool
/// version, UTC timestamp and master seed.
nlohmann::json run_manifest(const SimConfig& config, const RunResult& result);
nlohmann::json sweep_manifest(const SweepResult& sweep);

std::string tool_version();

/// Writes via a sibling temporary file and rename; nothing is left behind
/// on failure. Throws IoError naming the path.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

/// "<stem>.manifest.json" next to a CSV output path.
std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path);

}  // namespace oamsat
