#include "oamsat/lg_modes.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace oamsat {

LGMode::LGMode(int p, int l, double waist, double wavelength)
    : p_(p), l_(l), waist_(waist), wavelength_(wavelength) {
  if (p < 0) throw std::invalid_argument("LGMode: radial index p must be >= 0");
  if (!(waist > 0.0) || !std::isfinite(waist))
    throw std::invalid_argument("LGMode: waist must be positive");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw std::invalid_argument("LGMode: wavelength must be positive");
}

namespace {

void require_nonnegative_z(double z, const char* who) {
  if (!(z >= 0.0) || !std::isfinite(z))
    throw std::invalid_argument(std::string(who) + ": z must be finite and >= 0");
}

void require_fundamental_radial(const LGMode& mode, const char* who) {
  if (mode.p() != 0)
    throw std::invalid_argument(std::string(who) + ": only defined for p = 0 modes");
}

}  // namespace

double beam_width(const LGMode& mode, double z) {
  require_nonnegative_z(z, "beam_width");
  const double ratio = z / mode.rayleigh_range();
  return mode.waist() * std::sqrt(1.0 + ratio * ratio);
}

Complex radial_profile(const LGMode& mode, double r, double z) {
  if (!(r >= 0.0) || !std::isfinite(r))
    throw std::invalid_argument("radial_profile: r must be finite and >= 0");
  const double w = beam_width(mode, z);
  const int p = mode.p();
  const int abs_l = std::abs(mode.l());
  const double zr = mode.rayleigh_range();

  // sqrt(p! / (p+|l|)!) via log-gamma to stay finite for large |l|.
  const double norm =
      2.0 * std::exp(0.5 * (std::lgamma(p + 1.0) - std::lgamma(p + abs_l + 1.0))) / w;
  const double u = r * r / (w * w);
  const double magnitude = norm * std::pow(std::sqrt(2.0 * u), abs_l) * std::exp(-u) *
                           laguerre(p, abs_l, 2.0 * u);
  const double curvature = mode.wavenumber() * r * r * z / (2.0 * (z * z + zr * zr));
  const double gouy = (2.0 * p + abs_l + 1.0) * std::atan(z / zr);
  return std::polar(1.0, curvature - gouy) * magnitude;
}

Complex eigenstate_amplitude(const LGMode& mode, double r, double theta, double z) {
  if (!(theta >= 0.0 && theta < kTwoPi))
    throw std::invalid_argument("eigenstate_amplitude: theta must lie in [0, 2 pi)");
  return radial_profile(mode, r, z) * std::polar(1.0 / std::sqrt(kTwoPi), mode.l() * theta);
}

double rms_radius(const LGMode& mode, double z) {
  require_fundamental_radial(mode, "rms_radius");
  return std::sqrt((std::abs(mode.l()) + 1.0) / 2.0) * beam_width(mode, z);
}

double effective_radius(const LGMode& mode, double z) {
  require_fundamental_radial(mode, "effective_radius");
  return std::sqrt(std::abs(mode.l()) + 1.0) * beam_width(mode, z);
}

}  // namespace oamsat
