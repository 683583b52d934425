#include "oamsat/channel_realization.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "oamsat/errors.hpp"

namespace oamsat {

void ApertureSpec::validate() const {
  if (!(receiver_radius > 0.0) || !std::isfinite(receiver_radius))
    throw ValidityError("aperture: receiver radius must be positive");
  if (!(transmitter_radius > 0.0) || !std::isfinite(transmitter_radius))
    throw ValidityError("aperture: transmitter radius must be positive");
}

RngStream realization_stream(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return RngStream(seq);
}

TurbulenceRealization sample_realization(const TurbulenceStats& stats, int l0, double waist,
                                         RngStream& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, kPi / 2.0);

  const double nx = normal(rng);
  const double ny = normal(rng);
  const double n1 = normal(rng);
  const double n2 = normal(rng);
  double phi = uniform(rng);
  // uniform_real_distribution may round up to b for some engines.
  if (phi >= kPi / 2.0) phi = 0.0;

  const Mat2 chol = cholesky2({stats.var_theta, stats.cov_theta, stats.cov_theta, stats.var_theta});
  const double theta1 = stats.theta_mean + chol.xx * n1;
  const double theta2 = stats.theta_mean + chol.yx * n1 + chol.yy * n2;
  const double sigma_x = std::sqrt(stats.var_x0);
  const double scale = waist * std::sqrt(std::abs(l0) + 1.0);

  TurbulenceRealization real;
  real.x0 = sigma_x * nx;
  real.y0 = sigma_x * ny;
  real.W1 = scale * std::exp(0.5 * theta1);
  real.W2 = scale * std::exp(0.5 * theta2);
  real.phi = phi;
  return real;
}

ShapeMatrix shape_matrix(const TurbulenceRealization& real, const LGMode& mode, double z) {
  if (!(z > 0.0)) throw std::invalid_argument("shape_matrix: z must be > 0");
  if (!(real.W1 > 0.0 && real.W2 > 0.0))
    throw std::invalid_argument("shape_matrix: semi-axes must be positive");
  const double r0l = effective_radius(mode, z);
  const double c = std::cos(real.phi);
  const double s = std::sin(real.phi);
  ShapeMatrix out;
  out.S = {real.W1 * c / r0l, -real.W2 * s / r0l, real.W1 * s / r0l, real.W2 * c / r0l};
  out.det = real.W1 * real.W2 / (r0l * r0l);
  return out;
}

Complex perturbed_field(const LGMode& mode, const TurbulenceRealization& real, double r,
                        double theta, double z) {
  const ShapeMatrix shape = shape_matrix(real, mode, z);
  const Mat2 inv = shape.S.inverse();
  const double xt = r * std::cos(theta) - real.x0;
  const double yt = r * std::sin(theta) - real.y0;
  const double xi = inv.xx * xt + inv.xy * yt;
  const double yi = inv.yx * xt + inv.yy * yt;
  const double ri = std::hypot(xi, yi);
  double thetai = std::atan2(yi, xi);
  if (thetai < 0.0) thetai += kTwoPi;
  if (thetai >= kTwoPi) thetai = 0.0;
  return eigenstate_amplitude(mode, ri, thetai, z) / std::sqrt(shape.det);
}

PerturbedFieldEvaluator::PerturbedFieldEvaluator(const LGMode& mode,
                                                 const TurbulenceRealization& real, double z)
    : l_(mode.l()), abs_l_(std::abs(mode.l())), x0_(real.x0), y0_(real.y0) {
  if (mode.p() != 0) throw std::invalid_argument("PerturbedFieldEvaluator: requires p = 0");
  const ShapeMatrix shape = shape_matrix(real, mode, z);
  inverse_shape_ = shape.S.inverse();
  const double w = beam_width(mode, z);
  const double zr = mode.rayleigh_range();
  inv_w2_ = 1.0 / (w * w);
  curvature_ = mode.wavenumber() * z / (2.0 * (z * z + zr * zr));
  // 2 sqrt(1/|l|!) / w * (sqrt(2)/w)^|l| / sqrt(2 pi) / sqrt(det S) * exp(-i (|l|+1) atan(z/z_R))
  const double magnitude = 2.0 * std::exp(-0.5 * std::lgamma(abs_l_ + 1.0)) / w *
                           std::pow(std::sqrt(2.0) / w, abs_l_) / std::sqrt(kTwoPi) /
                           std::sqrt(shape.det);
  prefactor_ = std::polar(magnitude, -(abs_l_ + 1.0) * std::atan(z / zr));
}

Complex PerturbedFieldEvaluator::operator()(double x, double y) const {
  const double xt = x - x0_;
  const double yt = y - y0_;
  const double xi = inverse_shape_.xx * xt + inverse_shape_.xy * yt;
  const double yi = inverse_shape_.yx * xt + inverse_shape_.yy * yt;
  const double r2 = xi * xi + yi * yi;
  // r^|l| e^{i l theta} = (x + i sgn(l) y)^|l|
  const Complex base(xi, l_ >= 0 ? yi : -yi);
  Complex angular(1.0, 0.0);
  for (int j = 0; j < abs_l_; ++j) angular = mul(angular, base);
  const double envelope = std::exp(-r2 * inv_w2_);
  const double phase = curvature_ * r2;
  return mul(mul(prefactor_, angular), Complex(envelope * std::cos(phase), envelope * std::sin(phase)));
}

double phase_structure(double delta_r, double fried_parameter) {
  if (!(delta_r >= 0.0)) throw std::invalid_argument("phase_structure: separation must be >= 0");
  if (!(fried_parameter > 0.0)) throw std::invalid_argument("phase_structure: r_F must be > 0");
  return 6.88 * std::pow(delta_r / fried_parameter, 5.0 / 3.0);
}

double phase_correlation(double r, double delta_theta, double fried_parameter, AoMode ao) {
  if (!(r >= 0.0)) throw std::invalid_argument("phase_correlation: r must be >= 0");
  if (ao.enabled) return 1.0;
  if (!(fried_parameter > 0.0)) throw std::invalid_argument("phase_correlation: r_F must be > 0");
  const double s = std::abs(std::sin(0.5 * delta_theta));
  // 6.88 * 2^(2/3) (r/r_F)^(5/3) |sin(dtheta/2)|^(5/3)
  return std::exp(-6.88 * std::cbrt(4.0) * std::pow(r / fried_parameter * s, 5.0 / 3.0));
}

}  // namespace oamsat
