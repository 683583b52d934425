#include "oamsat/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <system_error>

#include "oamsat/config.hpp"
#include "oamsat/errors.hpp"

#ifndef OAMSAT_VERSION
#define OAMSAT_VERSION "0.0.0"
#endif

namespace oamsat {

std::string format_value(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

namespace {

void append_rows(std::string& out, const std::string& prefix, const AoResult& result) {
  for (const auto& row : result.rows) {
    for (int l_r = row.l_min; l_r <= row.l_max(); ++l_r) {
      out += prefix;
      out += std::to_string(row.l0);
      out += ',';
      out += std::to_string(l_r);
      out += ',';
      out += format_value(row.mean_at(l_r));
      out += ',';
      out += format_value(row.std_error_at(l_r));
      out += '\n';
    }
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json aperture_to_json(const ApertureSpec& a) {
  return {{"receiver_radius_m", a.receiver_radius}, {"transmitter_radius_m", a.transmitter_radius}};
}

}  // namespace

std::string crosstalk_csv(const AoResult& result) {
  std::string out = kRunCsvHeader;
  out += '\n';
  append_rows(out, "", result);
  return out;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (std::size_t i = 0; i < sweep.points.size(); ++i)
    append_rows(out, format_value(sweep.values[i]) + ",", sweep.points[i].primary());
  return out;
}

nlohmann::json stats_to_json(const TurbulenceStats& s) {
  return {{"rytov_variance", s.rytov_variance},
          {"scintillation_index", s.scintillation_index},
          {"fried_parameter_m", s.fried_parameter},
          {"fresnel_ratio", s.fresnel_ratio},
          {"theta_mean", s.theta_mean},
          {"var_x0_m2", s.var_x0},
          {"var_theta", s.var_theta},
          {"cov_theta", s.cov_theta}};
}

std::string tool_version() { return OAMSAT_VERSION; }

nlohmann::json run_manifest(const SimConfig& config, const RunResult& result) {
  nlohmann::json j;
  j["tool"] = "oamsat";
  j["version"] = tool_version();
  j["timestamp"] = utc_timestamp();
  j["master_seed"] = config.master_seed;
  j["config"] = config_to_json(config);
  j["stats"] = stats_to_json(result.stats);
  j["aperture"] = aperture_to_json(result.aperture);
  j["csv_columns"] = kRunCsvHeader;
  return j;
}

nlohmann::json sweep_manifest(const SweepResult& sweep) {
  nlohmann::json j;
  j["tool"] = "oamsat";
  j["version"] = tool_version();
  j["timestamp"] = utc_timestamp();
  j["master_seed"] = sweep.provenance.master_seed;
  j["config"] = config_to_json(sweep.provenance);
  j["axis"] = to_string(sweep.axis);
  j["values"] = sweep.values;
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < sweep.points.size(); ++i) {
    points.push_back({{"axis_value", sweep.values[i]},
                      {"stats", stats_to_json(sweep.points[i].stats)},
                      {"aperture", aperture_to_json(sweep.points[i].aperture)}});
  }
  j["points"] = points;
  j["csv_columns"] = kSweepCsvHeader;
  return j;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".partial";
  try {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      out.flush();
      if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
  } catch (const fs::filesystem_error& e) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot write '" + path.string() + "': " + e.code().message());
  } catch (...) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw;
  }
}

std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path) {
  std::filesystem::path out = csv_path;
  out.replace_extension(".manifest.json");
  return out;
}

}  // namespace oamsat
