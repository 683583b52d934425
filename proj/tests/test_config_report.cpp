#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oamsat/config.hpp"
#include "oamsat/errors.hpp"
#include "oamsat/report.hpp"

using namespace oamsat;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("oamsat_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SimConfig tiny_config() {
  SimConfig c;
  c.geometry.ground_altitude = 3000.0;
  c.l_max = 1;
  c.l0_set = {0, 1};
  c.n_realizations = 3;
  c.grid.n_radial = 32;
  c.grid.n_azimuthal = 256;
  c.grid.l_half_width = 5;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("parse_config reads every section with unit suffixes") {
  const SimConfig c = parse_config(R"(
[geometry]
satellite_altitude_km = 350
ground_altitude_m = 1000
zenith_angle_deg = 30
wavelength_nm = 800

[atmosphere]
ground_cn2 = 1.7e-14
wind_rms_m_s = 21

[mode]
waist_cm = 10
l_max = 3
l0 = -3, 0, 2

[aperture]
mode = fixed
receiver_radius_m = 2.5
transmitter_radius_m = 0.2

[grid]
n_radial = 96
n_azimuthal = 512
l_window = 9

[simulation]
realizations = 77
seed = 18446744073709551615
ao = on
threads = 2
resolution_check_stride = 10
)");
  CHECK(c.geometry.satellite_altitude == 350e3);
  CHECK(c.geometry.ground_altitude == 1000.0);
  CHECK(c.geometry.zenith_angle == doctest::Approx(kPi / 6.0).epsilon(1e-15));
  CHECK(c.geometry.wavelength == doctest::Approx(800e-9).epsilon(1e-15));
  CHECK(c.atmosphere.ground_cn2 == 1.7e-14);
  CHECK(c.atmosphere.wind_rms == 21.0);
  CHECK(c.waist == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(c.l_max == 3);
  CHECK(c.l0_set == std::vector<int>{-3, 0, 2});
  REQUIRE(c.aperture.has_value());
  CHECK(c.aperture->receiver_radius == 2.5);
  CHECK(c.aperture->transmitter_radius == 0.2);
  CHECK(c.grid.n_radial == 96);
  CHECK(c.grid.n_azimuthal == 512);
  CHECK(c.grid.l_half_width == 9);
  CHECK(c.n_realizations == 77);
  CHECK(c.master_seed == 18446744073709551615ULL);
  CHECK(c.ao.enabled);
  CHECK(c.threads == 2);
  CHECK(c.resolution_check_stride == 10);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("parse_config defaults") {
  const SimConfig c = parse_config("");
  const SimConfig d;
  CHECK(c.geometry.satellite_altitude == d.geometry.satellite_altitude);
  CHECK(c.waist == d.waist);
  CHECK(c.l0_set == std::vector<int>{0, 1, 2, 3, 4});
  CHECK_FALSE(c.aperture.has_value());
  CHECK(c.n_realizations == 2000);

  const SimConfig all = parse_config("[mode]\nl_max = 2\nl0 = all\n");
  CHECK(all.l0_set == std::vector<int>{-2, -1, 0, 1, 2});
  const SimConfig implicit = parse_config("[mode]\nl_max = 2\n");
  CHECK(implicit.l0_set == std::vector<int>{0, 1, 2});
}

TEST_CASE("parse_config rejects malformed input") {
  const char* bad[] = {
      "[geometry]\nsatellite_altitude_km = high\n",
      "[geometry]\nsatellite_altitude_km = 500\nsatellite_altitude_m = 500000\n",
      "[geometry]\naltitude = 500\n",
      "[weather]\nrain = 1\n",
      "stray = 1\n",
      "[simulation]\nao = maybe\n",
      "[simulation]\nrealizations = 2.5\n",
      "[mode]\nl0 = 1,,2\n",
      "[aperture]\nmode = fixed\nreceiver_radius_m = 3\n",
      "[aperture]\nreceiver_radius_m = 3\n",
      "[aperture]\nmode = adaptive\n",
      "[geometry\nwavelength_nm = 1550\n",
      "[grid]\nn_radial = 64\nn_radial = 32\n",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }
}

TEST_CASE("validity is separate from parsing") {
  const SimConfig c = parse_config("[geometry]\nsatellite_altitude_m = 3000\nground_altitude_m = 3000\n");
  CHECK_THROWS_AS(c.validate(), ValidityError);
  const SimConfig z = parse_config("[geometry]\nzenith_angle_deg = 45\n");
  CHECK_THROWS_AS(z.validate(), ValidityError);
}

TEST_CASE("config JSON round trip is exact") {
  SimConfig c = parse_config("[geometry]\nwavelength_nm = 808.3\nzenith_angle_deg = 12.7\n"
                             "[mode]\nwaist_cm = 13.3\nl0 = -4,4\n[simulation]\nseed = 987654321987\n");
  const SimConfig back = config_from_json(nlohmann::json::parse(config_to_json(c).dump()));
  CHECK(back.geometry.wavelength == c.geometry.wavelength);
  CHECK(back.geometry.zenith_angle == c.geometry.zenith_angle);
  CHECK(back.waist == c.waist);
  CHECK(back.l0_set == c.l0_set);
  CHECK(back.master_seed == c.master_seed);
  CHECK_FALSE(back.aperture.has_value());

  c.aperture = ApertureSpec{1.1, 0.3};
  const SimConfig fixed = config_from_json(config_to_json(c));
  REQUIRE(fixed.aperture.has_value());
  CHECK(fixed.aperture->receiver_radius == 1.1);

  CHECK_THROWS_AS(config_from_json(nlohmann::json::object()), ConfigError);
}

TEST_CASE("format_value uses nine significant digits") {
  CHECK(format_value(0.123456789123) == "0.123456789");
  CHECK(format_value(1.0) == "1");
  CHECK(format_value(0.0) == "0");
  CHECK(format_value(1.5e-12) == "1.5e-12");
  CHECK(format_value(2.0 / 3.0) == "0.666666667");
}

TEST_CASE("run CSV schema and manifest") {
  const SimConfig c = tiny_config();
  const RunResult r = run(c);
  const auto rows = lines_of(crosstalk_csv(r.primary()));
  REQUIRE(rows.size() == 1 + 2 * 11);
  CHECK(rows[0] == "l0,l_r,mean,p_stderr");
  CHECK(rows[1].rfind("0,-5,", 0) == 0);
  CHECK(rows[11].rfind("0,5,", 0) == 0);
  CHECK(rows[12].rfind("1,-5,", 0) == 0);
  // Each value appears exactly as format_value prints it.
  const std::string diag = "1,1," + format_value(r.primary().row(1).mean_at(1)) + "," +
                           format_value(r.primary().row(1).std_error_at(1));
  CHECK(rows[18] == diag);

  const auto m = run_manifest(c, r);
  CHECK(m.at("tool") == "oamsat");
  CHECK(m.at("version") == tool_version());
  CHECK(m.at("master_seed") == c.master_seed);
  CHECK(m.at("csv_columns") == "l0,l_r,mean,p_stderr");
  CHECK(m.at("stats").at("rytov_variance").get<double>() == r.stats.rytov_variance);
  CHECK(m.at("stats").at("fried_parameter_m").get<double>() == r.stats.fried_parameter);
  CHECK(m.at("aperture").at("receiver_radius_m").get<double>() == r.aperture.receiver_radius);
  CHECK(m.at("timestamp").get<std::string>().size() == 20);

  // Re-running from the manifest reproduces the CSV byte for byte.
  const SimConfig again = config_from_json(nlohmann::json::parse(m.dump()).at("config"));
  CHECK(crosstalk_csv(run(again).primary()) == crosstalk_csv(r.primary()));
}

TEST_CASE("sweep CSV schema") {
  SimConfig c = tiny_config();
  c.l0_set = {1};
  const double h[] = {200e3, 500e3};
  const SweepResult s = sweep_altitude(c, h);
  const auto rows = lines_of(sweep_csv(s));
  REQUIRE(rows.size() == 1 + 2 * 11);
  CHECK(rows[0] == "axis_value,l0,l_r,mean,p_stderr");
  CHECK(rows[1].rfind("200000,1,-5,", 0) == 0);
  CHECK(rows[12].rfind("500000,1,-5,", 0) == 0);
  // The last point's rows are the run CSV rows with the axis value prepended.
  const auto single = lines_of(crosstalk_csv(s.points[1].primary()));
  for (std::size_t i = 1; i < single.size(); ++i) CHECK(rows[11 + i] == "500000," + single[i]);

  const auto m = sweep_manifest(s);
  CHECK(m.at("axis") == "altitude");
  CHECK(m.at("points").size() == 2);
  CHECK(m.at("csv_columns") == "axis_value,l0,l_r,mean,p_stderr");
}

TEST_CASE("write_file_atomically") {
  const fs::path dir = scratch_dir("atomic");
  const fs::path target = dir / "out.csv";
  write_file_atomically(target, "a,b\n1,2\n");
  CHECK(read_file(target) == "a,b\n1,2\n");
  write_file_atomically(target, "x\n");
  CHECK(read_file(target) == "x\n");
  for (const auto& entry : fs::directory_iterator(dir)) CHECK(entry.path().filename() == "out.csv");

  write_file_atomically(dir / "nested" / "deeper" / "out.csv", "y\n");
  CHECK(read_file(dir / "nested" / "deeper" / "out.csv") == "y\n");

  // A regular file where a directory is needed.
  write_file_atomically(dir / "blocker", "");
  CHECK_THROWS_AS(write_file_atomically(dir / "blocker" / "out.csv", "x"), IoError);
  // The target itself is a non-empty directory: the rename fails and the
  // temporary file is cleaned up.
  CHECK_THROWS_AS(write_file_atomically(dir / "nested", "x"), IoError);
  CHECK_FALSE(fs::exists(dir / "nested.partial"));
  fs::remove_all(dir);
}

TEST_CASE("manifest_path_for") {
  CHECK(manifest_path_for("results/run.csv") == fs::path("results/run.manifest.json"));
  CHECK(manifest_path_for("run") == fs::path("run.manifest.json"));
}

TEST_CASE("load_config from INI, JSON and manifest files") {
  const fs::path dir = scratch_dir("load");
  {
    std::ofstream(dir / "c.ini") << "[simulation]\nrealizations = 9\n";
  }
  CHECK(load_config(dir / "c.ini").n_realizations == 9);

  SimConfig c = tiny_config();
  c.master_seed = 5;
  {
    std::ofstream(dir / "c.json") << config_to_json(c).dump(2);
  }
  CHECK(load_config(dir / "c.json").master_seed == 5);
  {
    std::ofstream(dir / "m.json") << nlohmann::json{{"config", config_to_json(c)}}.dump();
  }
  CHECK(load_config(dir / "m.json").n_realizations == 3);
  {
    std::ofstream(dir / "broken.json") << "{";
  }
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "absent.ini"), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("shipped configurations parse and validate") {
  for (const char* name : {"paper.ini", "smoke.ini"}) {
    const SimConfig c = load_config(fs::path(OAMSAT_SOURCE_DIR) / "configs" / name);
    CHECK_NOTHROW(c.validate());
  }
  const SimConfig paper = load_config(fs::path(OAMSAT_SOURCE_DIR) / "configs" / "paper.ini");
  CHECK(paper.geometry.path_length() == 497e3);
  CHECK(paper.n_realizations == 2000);
}
