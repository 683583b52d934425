#include "oamsat/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "oamsat/errors.hpp"

namespace oamsat {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out))
    throw ConfigError("config: '" + key + "' expects a number, got '" + raw + "'");
  return out;
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError("config: '" + key + "' expects an integer, got '" + raw + "'");
  return out;
}

bool parse_switch(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (value == "on" || value == "true" || value == "yes" || value == "1") return true;
  if (value == "off" || value == "false" || value == "no" || value == "0") return false;
  throw ConfigError("config: '" + key + "' expects on/off, got '" + raw + "'");
}

// A section's keys, consumed one by one so leftovers can be reported.
class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)) {
    if (!tree) return;
    for (const auto& [key, child] : *tree) {
      if (!child.empty()) throw ConfigError("config: nested key '" + name_ + "." + key + "'");
      if (!values_.emplace(key, child.data()).second)
        throw ConfigError("config: duplicate key '" + name_ + "." + key + "'");
    }
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::string v = it->second;
    values_.erase(it);
    return v;
  }

  /// Reads one of several unit-suffixed spellings, scaled to SI.
  std::optional<double> take_scaled(std::initializer_list<std::pair<const char*, double>> keys) {
    std::optional<double> out;
    std::string seen;
    for (const auto& [key, factor] : keys) {
      if (auto raw = take(key)) {
        if (out) {
          throw ConfigError("config: both '" + name_ + "." + seen + "' and '" + name_ + "." +
                            key + "' given");
        }
        out = parse_double(name_ + "." + key, *raw) * factor;
        seen = key;
      }
    }
    return out;
  }

  void expect_consumed() const {
    if (!values_.empty())
      throw ConfigError("config: unknown key '" + name_ + "." + values_.begin()->first + "'");
  }

  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::map<std::string, std::string> values_;
};

std::vector<int> parse_l0_list(const std::string& raw, int l_max) {
  const std::string value = trim(raw);
  if (value == "all") {
    std::vector<int> all;
    for (int l = -l_max; l <= l_max; ++l) all.push_back(l);
    return all;
  }
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_integer<int>("mode.l0", item));
  if (out.empty()) throw ConfigError("config: 'mode.l0' is empty");
  return out;
}

constexpr double kDegree = kPi / 180.0;

}  // namespace

SimConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  static const std::set<std::string> known{"geometry", "atmosphere", "mode",
                                           "aperture", "grid",       "simulation"};
  for (const auto& [name, child] : tree) {
    if (!known.contains(name)) {
      if (child.empty()) throw ConfigError("config: key '" + name + "' outside any section");
      throw ConfigError("config: unknown section [" + name + "]");
    }
  }
  const auto section = [&](const char* name) {
    const auto child = tree.get_child_optional(name);
    return Section(name, child ? &*child : nullptr);
  };

  SimConfig cfg;

  Section geometry = section("geometry");
  if (auto v = geometry.take_scaled({{"satellite_altitude_m", 1.0}, {"satellite_altitude_km", 1e3}}))
    cfg.geometry.satellite_altitude = *v;
  if (auto v = geometry.take_scaled({{"ground_altitude_m", 1.0}, {"ground_altitude_km", 1e3}}))
    cfg.geometry.ground_altitude = *v;
  if (auto v = geometry.take_scaled({{"zenith_angle_rad", 1.0}, {"zenith_angle_deg", kDegree}}))
    cfg.geometry.zenith_angle = *v;
  if (auto v = geometry.take_scaled({{"wavelength_m", 1.0}, {"wavelength_nm", 1e-9}}))
    cfg.geometry.wavelength = *v;
  geometry.expect_consumed();

  Section atmosphere = section("atmosphere");
  if (auto v = atmosphere.take_scaled({{"ground_cn2", 1.0}})) cfg.atmosphere.ground_cn2 = *v;
  if (auto v = atmosphere.take_scaled({{"wind_rms_m_s", 1.0}})) cfg.atmosphere.wind_rms = *v;
  atmosphere.expect_consumed();

  Section mode = section("mode");
  if (auto v = mode.take_scaled({{"waist_m", 1.0}, {"waist_cm", 1e-2}})) cfg.waist = *v;
  if (auto v = mode.take("l_max")) cfg.l_max = parse_integer<int>("mode.l_max", *v);
  if (auto v = mode.take("l0")) {
    cfg.l0_set = parse_l0_list(*v, cfg.l_max);
  } else {
    cfg.l0_set.clear();
    for (int l = 0; l <= cfg.l_max; ++l) cfg.l0_set.push_back(l);
  }
  mode.expect_consumed();

  Section aperture = section("aperture");
  const std::string aperture_mode = trim(aperture.take("mode").value_or("auto"));
  const auto ra = aperture.take_scaled({{"receiver_radius_m", 1.0}});
  const auto rt = aperture.take_scaled({{"transmitter_radius_m", 1.0}});
  if (aperture_mode == "fixed") {
    if (!ra || !rt)
      throw ConfigError("config: fixed aperture needs receiver_radius_m and transmitter_radius_m");
    cfg.aperture = ApertureSpec{*ra, *rt};
  } else if (aperture_mode == "auto") {
    if (ra || rt) throw ConfigError("config: aperture radii given but aperture.mode is auto");
  } else {
    throw ConfigError("config: aperture.mode must be auto or fixed");
  }
  aperture.expect_consumed();

  Section grid = section("grid");
  if (auto v = grid.take("n_radial")) cfg.grid.n_radial = parse_integer<int>("grid.n_radial", *v);
  if (auto v = grid.take("n_azimuthal"))
    cfg.grid.n_azimuthal = parse_integer<int>("grid.n_azimuthal", *v);
  if (auto v = grid.take("l_window"))
    cfg.grid.l_half_width = parse_integer<int>("grid.l_window", *v);
  grid.expect_consumed();

  Section sim = section("simulation");
  if (auto v = sim.take("realizations"))
    cfg.n_realizations = parse_integer<int>("simulation.realizations", *v);
  if (auto v = sim.take("seed")) cfg.master_seed = parse_integer<std::uint64_t>("simulation.seed", *v);
  if (auto v = sim.take("ao")) cfg.ao.enabled = parse_switch("simulation.ao", *v);
  if (auto v = sim.take("threads")) cfg.threads = parse_integer<int>("simulation.threads", *v);
  if (auto v = sim.take("resolution_check_stride"))
    cfg.resolution_check_stride = parse_integer<int>("simulation.resolution_check_stride", *v);
  sim.expect_consumed();

  return cfg;
}

nlohmann::json config_to_json(const SimConfig& c) {
  nlohmann::json j;
  j["geometry"] = {{"satellite_altitude_m", c.geometry.satellite_altitude},
                   {"ground_altitude_m", c.geometry.ground_altitude},
                   {"zenith_angle_rad", c.geometry.zenith_angle},
                   {"wavelength_m", c.geometry.wavelength}};
  j["atmosphere"] = {{"ground_cn2", c.atmosphere.ground_cn2},
                     {"wind_rms_m_s", c.atmosphere.wind_rms}};
  j["mode"] = {{"waist_m", c.waist}, {"l_max", c.l_max}, {"l0", c.l0_set}};
  if (c.aperture) {
    j["aperture"] = {{"mode", "fixed"},
                     {"receiver_radius_m", c.aperture->receiver_radius},
                     {"transmitter_radius_m", c.aperture->transmitter_radius}};
  } else {
    j["aperture"] = {{"mode", "auto"}};
  }
  j["grid"] = {{"n_radial", c.grid.n_radial},
               {"n_azimuthal", c.grid.n_azimuthal},
               {"l_window", c.grid.l_half_width}};
  j["simulation"] = {{"realizations", c.n_realizations},
                     {"seed", c.master_seed},
                     {"ao", c.ao.enabled ? "on" : "off"},
                     {"resolution_check_stride", c.resolution_check_stride}};
  return j;
}

SimConfig config_from_json(const nlohmann::json& j) {
  try {
    SimConfig c;
    const auto& g = j.at("geometry");
    c.geometry.satellite_altitude = g.at("satellite_altitude_m").get<double>();
    c.geometry.ground_altitude = g.at("ground_altitude_m").get<double>();
    c.geometry.zenith_angle = g.at("zenith_angle_rad").get<double>();
    c.geometry.wavelength = g.at("wavelength_m").get<double>();
    const auto& a = j.at("atmosphere");
    c.atmosphere.ground_cn2 = a.at("ground_cn2").get<double>();
    c.atmosphere.wind_rms = a.at("wind_rms_m_s").get<double>();
    const auto& m = j.at("mode");
    c.waist = m.at("waist_m").get<double>();
    c.l_max = m.at("l_max").get<int>();
    c.l0_set = m.at("l0").get<std::vector<int>>();
    const auto& ap = j.at("aperture");
    const std::string ap_mode = ap.at("mode").get<std::string>();
    if (ap_mode == "fixed") {
      c.aperture = ApertureSpec{ap.at("receiver_radius_m").get<double>(),
                                ap.at("transmitter_radius_m").get<double>()};
    } else if (ap_mode != "auto") {
      throw ConfigError("config: aperture.mode must be auto or fixed");
    }
    const auto& gr = j.at("grid");
    c.grid.n_radial = gr.at("n_radial").get<int>();
    c.grid.n_azimuthal = gr.at("n_azimuthal").get<int>();
    c.grid.l_half_width = gr.at("l_window").get<int>();
    const auto& s = j.at("simulation");
    c.n_realizations = s.at("realizations").get<int>();
    c.master_seed = s.at("seed").get<std::uint64_t>();
    c.ao.enabled = parse_switch("simulation.ao", s.at("ao").get<std::string>());
    c.resolution_check_stride = s.value("resolution_check_stride", 0);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (path.extension() == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config: '" + path.string() + "': " + e.what());
    }
    // A run manifest nests the resolved configuration under "config".
    return config_from_json(j.contains("config") ? j.at("config") : j);
  }
  return parse_config(buffer.str());
}

}  // namespace oamsat
