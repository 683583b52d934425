#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace oamsat {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// a * b without the inf/NaN recovery of operator*, for finite hot loops.
inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

/// Fixed-node rule on [a, b]: sum_i weights[i] * f(nodes[i]).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double a = 0.0;
  double b = 0.0;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }

  template <typename F>
  [[nodiscard]] auto apply(F&& f) const {
    decltype(f(0.0)) sum{};
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// Generalized Laguerre polynomial L_p^a(x) by upward three-term recurrence.
/// Supported range is 0 <= p <= 64, a >= 0.
double laguerre(int p, double a, double x);

/// n-point Gauss-Legendre rule mapped onto [a, b]; exact for degree <= 2n-1.
QuadratureRule gauss_legendre(int n, double a, double b);

/// Adaptive Gauss-Kronrod (7/15) integration with a global error target
/// |error| <= rel_tol * |I|. Throws NumericalError when the interval budget
/// runs out before the target is met.
double integrate_profile(const std::function<double(double)>& f, double a, double b,
                         double rel_tol = 1e-9);

/// Same, seeded with an initial partition at the given breakpoints (sorted,
/// first and last are the integration limits). Use this when the integrand
/// has structure on scales much smaller than b - a.
double integrate_profile(const std::function<double(double)>& f,
                         std::span<const double> breakpoints, double rel_tol = 1e-9);

/// Coefficients of a uniformly sampled periodic function,
/// c_m = (1/N) sum_j f(theta_j) exp(-i m theta_j), for m in [-N/2, N/2).
class AzimuthalSpectrum {
 public:
  AzimuthalSpectrum() = default;
  explicit AzimuthalSpectrum(std::vector<Complex> fft_order);

  [[nodiscard]] int size() const { return static_cast<int>(coeffs_.size()); }
  [[nodiscard]] int min_index() const { return -size() / 2; }
  [[nodiscard]] int max_index() const { return size() / 2 - 1; }

  /// Coefficient c_m; m outside [-N/2, N/2) is wrapped modulo N (aliasing).
  [[nodiscard]] Complex operator[](int m) const;

  /// Raw coefficients in FFT order (index 0..N-1, negative m at the top).
  [[nodiscard]] std::span<const Complex> raw() const { return coeffs_; }

 private:
  std::vector<Complex> coeffs_;
};

/// Reusable radix-2 transform of a fixed power-of-two size.
class FourierPlan {
 public:
  explicit FourierPlan(std::size_t n);

  [[nodiscard]] std::size_t size() const { return n_; }

  /// In-place c_m = (1/N) sum_j x_j exp(-2 pi i m j / N), FFT order.
  void forward(std::span<Complex> data) const;

  /// In-place x_j = sum_m c_m exp(+2 pi i m j / N) (no scaling).
  void inverse(std::span<Complex> data) const;

 private:
  void transform(std::span<Complex> data, bool inverse) const;

  std::size_t n_;
  std::vector<std::size_t> bit_reverse_;
  std::vector<Complex> twiddles_;
};

/// Azimuthal Fourier coefficients of samples on theta_j = 2 pi j / N.
/// N must be a power of two and at least 8.
AzimuthalSpectrum circular_fourier(std::span<const Complex> samples);

/// Inverse of circular_fourier: samples f(theta_j) = sum_m c_m exp(i m theta_j).
std::vector<Complex> circular_synthesis(const AzimuthalSpectrum& spectrum);

bool is_power_of_two(std::size_t n);

/// 2x2 real matrix, row major.
struct Mat2 {
  double xx = 0.0;
  double xy = 0.0;
  double yx = 0.0;
  double yy = 0.0;

  [[nodiscard]] double det() const { return xx * yy - xy * yx; }
  [[nodiscard]] Mat2 transpose() const { return {xx, yx, xy, yy}; }
  [[nodiscard]] Mat2 inverse() const;

  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.xx * b.xx + a.xy * b.yx, a.xx * b.xy + a.xy * b.yy,
            a.yx * b.xx + a.yy * b.yx, a.yx * b.xy + a.yy * b.yy};
  }
};

/// Lower-triangular L with L L^T = cov for a symmetric positive
/// semidefinite 2x2 matrix. Rejects indefinite input.
Mat2 cholesky2(const Mat2& cov);

}  // namespace oamsat
