#include "oamsat/turbulence_profile.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "oamsat/errors.hpp"
#include "oamsat/numerics.hpp"

namespace oamsat {

void AtmosphereModel::validate() const {
  if (!(ground_cn2 > 0.0) || !std::isfinite(ground_cn2))
    throw ValidityError("atmosphere: ground C_n^2 must be positive");
  if (!(wind_rms >= 0.0) || !std::isfinite(wind_rms))
    throw ValidityError("atmosphere: rms wind speed must be >= 0");
}

double ChannelGeometry::path_length() const {
  return (satellite_altitude - ground_altitude) / std::cos(zenith_angle);
}

double ChannelGeometry::wavenumber() const { return kTwoPi / wavelength; }

void ChannelGeometry::validate() const {
  if (!std::isfinite(satellite_altitude) || !std::isfinite(ground_altitude))
    throw ValidityError("geometry: altitudes must be finite");
  if (!(ground_altitude >= 0.0)) throw ValidityError("geometry: ground altitude must be >= 0");
  if (!(satellite_altitude > ground_altitude)) {
    throw ValidityError("geometry: satellite altitude (" + std::to_string(satellite_altitude) +
                        " m) must exceed ground altitude (" + std::to_string(ground_altitude) +
                        " m)");
  }
  if (!(zenith_angle >= 0.0 && zenith_angle < kPi / 4.0))
    throw ValidityError("geometry: zenith angle must lie in [0, 45) degrees");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw ValidityError("geometry: wavelength must be positive");
}

double cn2(const AtmosphereModel& model, double h) {
  if (!(h >= 0.0)) throw std::invalid_argument("cn2: altitude must be >= 0");
  const double wind = model.wind_rms / 27.0;
  const double scaled = h * 1e-5;
  const double s2 = scaled * scaled;
  const double s10 = s2 * s2 * s2 * s2 * s2;
  return 0.00594 * wind * wind * s10 * std::exp(-h / 1000.0) +
         2.7e-16 * std::exp(-h / 1500.0) + model.ground_cn2 * std::exp(-h / 100.0);
}

namespace {

void require_ordered_path(const ChannelGeometry& geom, const char* who) {
  if (!(geom.ground_altitude >= 0.0) || !(geom.satellite_altitude >= geom.ground_altitude))
    throw ValidityError(std::string(who) + ": require H >= h0 >= 0");
  if (!(geom.zenith_angle >= 0.0 && geom.zenith_angle < kPi / 4.0))
    throw ValidityError(std::string(who) + ": zenith angle must lie in [0, 45) degrees");
  if (!(geom.wavelength > 0.0)) throw ValidityError(std::string(who) + ": wavelength must be > 0");
}

// The profile decays on 100 m, 1-1.5 km and ~10 km scales above h0; seed the
// adaptive integrator with a partition that resolves each of them.
std::vector<double> altitude_breakpoints(double h0, double H) {
  std::vector<double> points{h0};
  for (double offset : {100.0, 300.0, 1e3, 3e3, 1e4, 2e4, 4e4, 1e5, 2e5}) {
    if (h0 + offset < H) points.push_back(h0 + offset);
  }
  points.push_back(H);
  return points;
}

}  // namespace

double rytov_variance(const ChannelGeometry& geom, const AtmosphereModel& model) {
  require_ordered_path(geom, "rytov_variance");
  const double h0 = geom.ground_altitude;
  const double H = geom.satellite_altitude;
  if (H == h0) return 0.0;
  const auto integrand = [&](double h) {
    return cn2(model, h) * std::pow(std::max(h - h0, 0.0), 5.0 / 6.0);
  };
  const auto points = altitude_breakpoints(h0, H);
  const double integral = integrate_profile(integrand, points, 1e-9);
  const double sec = 1.0 / std::cos(geom.zenith_angle);
  return 2.25 * std::pow(geom.wavenumber(), 7.0 / 6.0) * std::pow(sec, 11.0 / 6.0) * integral;
}

double scintillation_index(double rytov) {
  if (!(rytov >= 0.0)) throw std::invalid_argument("scintillation_index: sigma_R^2 must be >= 0");
  if (std::isinf(rytov)) return std::exp(0.51 / std::pow(0.69, 5.0 / 6.0)) - 1.0;
  const double s125 = std::pow(rytov, 6.0 / 5.0);  // sigma_R^(12/5)
  const double first = 0.49 * rytov / std::pow(1.0 + 1.11 * s125, 7.0 / 6.0);
  const double second = 0.51 * rytov / std::pow(1.0 + 0.69 * s125, 5.0 / 6.0);
  return std::expm1(first + second);
}

double fried_parameter(const ChannelGeometry& geom, const AtmosphereModel& model) {
  require_ordered_path(geom, "fried_parameter");
  const double h0 = geom.ground_altitude;
  const double H = geom.satellite_altitude;
  double integral = 0.0;
  if (H > h0) {
    const auto points = altitude_breakpoints(h0, H);
    integral = integrate_profile([&](double h) { return cn2(model, h); }, points, 1e-9);
  }
  const double sec = 1.0 / std::cos(geom.zenith_angle);
  const double base = 0.423 * geom.wavenumber() * geom.wavenumber() * sec * integral;
  if (!(base > 0.0)) throw NumericalError("fried_parameter: turbulence-free channel (zero C_n^2 path integral)");
  const double r_f = std::pow(base, -3.0 / 5.0);
  if (!std::isfinite(r_f)) throw NumericalError("fried_parameter: turbulence-free channel (r_F overflow)");
  return r_f;
}

BeamMoments beam_moments(double sigma_i2, double omega, double waist) {
  if (!(sigma_i2 >= 0.0)) throw std::invalid_argument("beam_moments: sigma_I^2 must be >= 0");
  if (!(omega > 0.0)) throw std::invalid_argument("beam_moments: Omega must be > 0");
  if (!(waist > 0.0)) throw std::invalid_argument("beam_moments: w0 must be > 0");

  const double q = sigma_i2 * std::pow(omega, 5.0 / 6.0);
  const double a = 1.0 + 2.96 * q;
  BeamMoments m;
  m.theta_mean = std::log(a * a / (omega * omega * std::sqrt(a * a + 1.2 * q)));
  m.var_x0 = 0.33 * waist * waist * sigma_i2 * std::pow(omega, -7.0 / 6.0);
  m.var_theta = std::log1p(1.2 * q / (a * a));
  m.cov_theta = std::log1p(-0.8 * q / (a * a));
  return m;
}

TurbulenceStats channel_stats(const ChannelGeometry& geom, const AtmosphereModel& model,
                              double waist) {
  geom.validate();
  model.validate();
  if (!(waist > 0.0)) throw ValidityError("channel_stats: beam waist must be positive");

  TurbulenceStats s;
  s.rytov_variance = rytov_variance(geom, model);
  s.scintillation_index = scintillation_index(s.rytov_variance);
  s.fried_parameter = fried_parameter(geom, model);
  s.fresnel_ratio = geom.wavenumber() * waist * waist / (2.0 * geom.path_length());
  const BeamMoments m = beam_moments(s.scintillation_index, s.fresnel_ratio, waist);
  s.theta_mean = m.theta_mean;
  s.var_x0 = m.var_x0;
  s.var_theta = m.var_theta;
  s.cov_theta = m.cov_theta;
  return s;
}

}  // namespace oamsat
