#pragma once

#include <cstdint>
#include <random>

#include "oamsat/lg_modes.hpp"
#include "oamsat/numerics.hpp"
#include "oamsat/turbulence_profile.hpp"

namespace oamsat {

/// One sampled channel state: centroid offset (x0, y0), elliptical
/// semi-axes (W1, W2) already scaled by sqrt(|l0|+1), rotation phi.
struct TurbulenceRealization {
  double x0 = 0.0;
  double y0 = 0.0;
  double W1 = 1.0;
  double W2 = 1.0;
  double phi = 0.0;

  bool operator==(const TurbulenceRealization&) const = default;
};

/// Receiver (r_a) and transmitter (r_t) aperture radii in metres. Only r_a
/// enters the detection integral; r_t is kept for provenance.
struct ApertureSpec {
  double receiver_radius = 0.0;
  double transmitter_radius = 0.0;

  void validate() const;
};

/// Ideal phase-only adaptive optics: when enabled the turbulent phase is
/// removed entirely.
struct AoMode {
  bool enabled = false;
};

using RngStream = std::mt19937_64;

/// Independent stream for realization `index` of a run seeded by `master_seed`.
RngStream realization_stream(std::uint64_t master_seed, std::uint64_t index);

/// Draws (x0, y0, Theta1, Theta2, phi) in that order from `rng`, so streams
/// with the same seed give the same standard normals whatever the statistics.
TurbulenceRealization sample_realization(const TurbulenceStats& stats, int l0, double waist,
                                         RngStream& rng);

struct ShapeMatrix {
  Mat2 S;
  double det = 1.0;
};

/// S = (1/r_{0 l0}(z)) [[W1 cos phi, -W2 sin phi], [W1 sin phi, W2 cos phi]]
/// with l0 = mode.l().
ShapeMatrix shape_matrix(const TurbulenceRealization& real, const LGMode& mode, double z);

/// Psi_D(r, theta, z): the ideal LG_{0,l0} field evaluated at the back-
/// transformed coordinates S^-1 (x - x0, y - y0), divided by sqrt(det S).
Complex perturbed_field(const LGMode& mode, const TurbulenceRealization& real, double r,
                        double theta, double z);

/// Batched Cartesian evaluation of perturbed_field for one realization.
/// Uses (x_i + i y_i)^|l| in place of r_i^|l| exp(i l theta_i).
class PerturbedFieldEvaluator {
 public:
  PerturbedFieldEvaluator(const LGMode& mode, const TurbulenceRealization& real, double z);

  [[nodiscard]] Complex operator()(double x, double y) const;

 private:
  int l_;
  int abs_l_;
  double x0_;
  double y0_;
  Mat2 inverse_shape_;
  double inv_w2_;
  double curvature_;
  Complex prefactor_;
};

/// Kolmogorov phase structure function D(dr) = 6.88 (dr / r_F)^(5/3).
double phase_structure(double delta_r, double fried_parameter);

/// Ensemble phase correlation between two points on the circle of radius r
/// separated by delta_theta; identically 1 with ideal AO.
double phase_correlation(double r, double delta_theta, double fried_parameter, AoMode ao);

}  // namespace oamsat
