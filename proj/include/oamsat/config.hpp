#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>
#include "oamsat/simulation.hpp"

namespace oamsat {

/// Parses the sectioned key/value configuration format:
///
///   [geometry]    satellite_altitude_km|_m, ground_altitude_m|_km,
///                 zenith_angle_deg|_rad, wavelength_nm|_m
///   [atmosphere]  ground_cn2, wind_rms_m_s
///   [mode]        waist_m|_cm, l_max, l0 (comma list or "all")
///   [aperture]    mode = auto|fixed, receiver_radius_m, transmitter_radius_m
///   [grid]        n_radial, n_azimuthal, l_window
///   [simulation]  realizations, seed, ao (on|off), threads,
///                 resolution_check_stride
///
/// Missing keys keep their defaults. Throws ConfigError on syntax errors,
/// unknown keys and unparseable values; physical validity is checked
/// separately by SimConfig::validate().
SimConfig parse_config(const std::string& text);

/// Loads an INI-style config, or a JSON config / run manifest (".json").
SimConfig load_config(const std::filesystem::path& path);

nlohmann::json config_to_json(const SimConfig& config);
SimConfig config_from_json(const nlohmann::json& j);

}  // namespace oamsat
