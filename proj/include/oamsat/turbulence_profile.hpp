#pragma once

namespace oamsat {

/// Hufnagel-Valley C_n^2 profile parameters.
struct AtmosphereModel {
  double ground_cn2 = 9.6e-14;  ///< A = C_n^2(0), m^(-2/3)
  double wind_rms = 6.0;        ///< rms wind speed, m/s

  void validate() const;
};

/// Downlink geometry. Altitudes in metres, zenith angle in radians.
struct ChannelGeometry {
  double satellite_altitude = 500e3;  ///< H
  double ground_altitude = 0.0;       ///< h0
  double zenith_angle = 0.0;          ///< theta_z, restricted to [0, pi/4)
  double wavelength = 1550e-9;

  /// L = (H - h0) sec(theta_z).
  [[nodiscard]] double path_length() const;
  [[nodiscard]] double wavenumber() const;

  /// Throws ValidityError unless H > h0 >= 0, 0 <= theta_z < pi/4 and
  /// wavelength > 0.
  void validate() const;
};

/// Ensemble statistics of the channel; deterministic per (geometry, model, w0).
struct TurbulenceStats {
  double rytov_variance = 0.0;       ///< sigma_R^2
  double scintillation_index = 0.0;  ///< sigma_I^2
  double fried_parameter = 0.0;      ///< r_F, m
  double fresnel_ratio = 0.0;        ///< Omega = k w0^2 / (2L)
  double theta_mean = 0.0;           ///< <Theta_1> = <Theta_2>
  double var_x0 = 0.0;               ///< centroid variance per axis, m^2
  double var_theta = 0.0;            ///< Var(Theta_1) = Var(Theta_2)
  double cov_theta = 0.0;            ///< Cov(Theta_1, Theta_2), <= 0
};

struct BeamMoments {
  double theta_mean = 0.0;
  double var_x0 = 0.0;
  double var_theta = 0.0;
  double cov_theta = 0.0;
};

/// C_n^2(h) for h >= 0 metres.
double cn2(const AtmosphereModel& model, double h);

/// sigma_R^2 = 2.25 k^(7/6) sec^(11/6)(theta_z) int_{h0}^{H} C_n^2(h) (h - h0)^(5/6) dh.
/// Accepts H == h0 (returns 0).
double rytov_variance(const ChannelGeometry& geom, const AtmosphereModel& model);

/// Saturating downlink scintillation index as a function of sigma_R^2.
double scintillation_index(double rytov_variance);

/// r_F = [0.423 k^2 sec(theta_z) int_{h0}^{H} C_n^2(h) dh]^(-3/5). Throws
/// NumericalError for a turbulence-free path (vanishing integral).
double fried_parameter(const ChannelGeometry& geom, const AtmosphereModel& model);

/// Log-normal beam-shape and wandering statistics for a Gaussian beam of
/// waist w0 given sigma_I^2 and the Fresnel ratio Omega.
BeamMoments beam_moments(double scintillation_index, double fresnel_ratio, double waist);

TurbulenceStats channel_stats(const ChannelGeometry& geom, const AtmosphereModel& model,
                              double waist);

}  // namespace oamsat
