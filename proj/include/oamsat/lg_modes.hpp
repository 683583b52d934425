#pragma once

#include "oamsat/numerics.hpp"

namespace oamsat {

/// Laguerre-Gaussian transverse mode LG_{p,l} with waist w0 at z = 0.
class LGMode {
 public:
  /// Throws std::invalid_argument unless p >= 0, w0 > 0 and wavelength > 0.
  LGMode(int p, int l, double waist, double wavelength);

  [[nodiscard]] int p() const { return p_; }
  [[nodiscard]] int l() const { return l_; }
  [[nodiscard]] double waist() const { return waist_; }
  [[nodiscard]] double wavelength() const { return wavelength_; }
  [[nodiscard]] double wavenumber() const { return kTwoPi / wavelength_; }
  [[nodiscard]] double rayleigh_range() const { return kPi * waist_ * waist_ / wavelength_; }

 private:
  int p_;
  int l_;
  double waist_;
  double wavelength_;
};

/// w(z) = w0 sqrt(1 + (z/z_R)^2).
double beam_width(const LGMode& mode, double z);

/// Radial profile R_{p,l}(r, z) in m^-1, including the wavefront-curvature
/// and Gouy phases. Normalized so that the integral of |R|^2 r dr is one.
Complex radial_profile(const LGMode& mode, double r, double z);

/// R_{p,l}(r, z) exp(i l theta) / sqrt(2 pi); theta in [0, 2 pi).
Complex eigenstate_amplitude(const LGMode& mode, double r, double theta, double z);

/// rms radius sqrt((|l|+1)/2) w(z) of an LG_{0,l} mode.
double rms_radius(const LGMode& mode, double z);

/// Beam-size radius sqrt(2) * rms = sqrt(|l|+1) w(z); the disc of this
/// radius carries roughly 90% of the mode power.
double effective_radius(const LGMode& mode, double z);

}  // namespace oamsat
