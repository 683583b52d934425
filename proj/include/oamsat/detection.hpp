#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "oamsat/channel_realization.hpp"
#include "oamsat/lg_modes.hpp"
#include "oamsat/numerics.hpp"

namespace oamsat {

/// Discretization of the detection integral: Gauss-Legendre nodes on
/// [0, r_a] and a uniform azimuthal grid.
struct DetectionGrid {
  int n_radial = 192;
  int n_azimuthal = 1024;
  int l_half_width = 12;  ///< report l_r in [-l_half_width, l_half_width]
  bool verify_resolution = false;

  [[nodiscard]] int l_min() const { return -l_half_width; }
  [[nodiscard]] int l_max() const { return l_half_width; }
  [[nodiscard]] int window_size() const { return 2 * l_half_width + 1; }

  /// Structural checks shared by every evaluation path.
  void validate() const;
  /// Production requirements: n_radial >= 32, n_azimuthal >= 256 and a
  /// window covering [-(max_l+4), max_l+4].
  void validate_for(int max_abs_l) const;
};

/// P(l_r) for l_r in [l_min, l_min + size) and the power inside the aperture.
struct DetectionDistribution {
  int l_min = 0;
  std::vector<double> probabilities;
  double captured_power = 0.0;

  [[nodiscard]] int l_max() const { return l_min + static_cast<int>(probabilities.size()) - 1; }
  [[nodiscard]] bool contains(int l_r) const { return l_r >= l_min && l_r <= l_max(); }
  /// Throws std::out_of_range outside the window.
  [[nodiscard]] double probability(int l_r) const;
};

/// Fourier coefficients c_m(r_j) of the phase correlation C(r_j, .) at each
/// radial node. Real and even in m.
class PhaseKernel {
 public:
  PhaseKernel(const QuadratureRule& radial, int n_azimuthal, double fried_parameter);

  [[nodiscard]] int n_azimuthal() const { return n_azimuthal_; }
  [[nodiscard]] std::size_t n_radial() const { return coeffs_.size() / n_azimuthal_; }
  /// c_m at radial node j, m wrapped modulo N.
  [[nodiscard]] double coefficient(std::size_t j, int m) const;
  [[nodiscard]] std::span<const double> row(std::size_t j) const {
    return {coeffs_.data() + j * n_azimuthal_, static_cast<std::size_t>(n_azimuthal_)};
  }

 private:
  int n_azimuthal_;
  std::vector<double> coeffs_;
};

/// |F_k(r_j)|^2 of one received field on the detection grid, with radial
/// weights 2 pi w_j r_j folded in separately.
struct ModalPowerSpectrum {
  int n_azimuthal = 0;
  std::vector<double> radial_weight;  ///< 2 pi w_j r_j
  std::vector<double> power;          ///< row-major n_radial x N, FFT order
  std::vector<int> k_lo;              ///< signed range of non-negligible k per row
  std::vector<int> k_hi;

  [[nodiscard]] double captured_power() const;
};

/// Reusable evaluator for a fixed (aperture, grid, r_F). Thread-safe for
/// concurrent const use.
class DetectionEngine {
 public:
  DetectionEngine(const ApertureSpec& aperture, const DetectionGrid& grid, double fried_parameter);

  [[nodiscard]] const DetectionGrid& grid() const { return grid_; }
  [[nodiscard]] const QuadratureRule& radial_rule() const { return radial_; }
  [[nodiscard]] const PhaseKernel& kernel() const { return kernel_; }

  [[nodiscard]] ModalPowerSpectrum spectrum(const LGMode& mode, const TurbulenceRealization& real,
                                            double z) const;

  /// Combines a spectrum with the phase correlation for the chosen AO mode.
  [[nodiscard]] DetectionDistribution project(const ModalPowerSpectrum& spectrum, AoMode ao) const;

  /// spectrum + project, plus the optional 2x azimuthal refinement check.
  [[nodiscard]] DetectionDistribution evaluate(const LGMode& mode,
                                               const TurbulenceRealization& real, double z,
                                               AoMode ao) const;

  /// Throws NumericalError if doubling n_azimuthal moves any reported
  /// probability by more than 1e-4.
  void check_resolution(const LGMode& mode, const TurbulenceRealization& real, double z,
                        std::span<const DetectionDistribution> coarse,
                        std::span<const AoMode> modes) const;

 private:
  ApertureSpec aperture_;
  DetectionGrid grid_;
  double fried_parameter_;
  QuadratureRule radial_;
  FourierPlan plan_;
  std::vector<double> cos_table_;
  std::vector<double> sin_table_;
  PhaseKernel kernel_;
  std::shared_ptr<const DetectionEngine> refined_;
};

inline constexpr double kResolutionTolerance = 1e-4;

/// P(l_r | realization) by azimuthal Fourier factorization of the
/// rotational field correlation integral.
DetectionDistribution detection_distribution(const LGMode& mode, const TurbulenceRealization& real,
                                             const ApertureSpec& aperture, double fried_parameter,
                                             AoMode ao, const DetectionGrid& grid, double z);

/// Direct nested quadrature of the same triple integral. Restricted to
/// n_radial <= 64 and n_azimuthal <= 128.
DetectionDistribution detection_distribution_bruteforce(const LGMode& mode,
                                                        const TurbulenceRealization& real,
                                                        const ApertureSpec& aperture,
                                                        double fried_parameter, AoMode ao,
                                                        const DetectionGrid& grid, double z);

/// Ensemble mean and standard error (sample stddev / sqrt(n)) of P(l_r).
struct CrosstalkRow {
  int l0 = 0;
  int l_min = 0;
  std::vector<double> mean;
  std::vector<double> std_error;
  double captured_power = 0.0;
  std::size_t samples = 0;

  [[nodiscard]] int l_max() const { return l_min + static_cast<int>(mean.size()) - 1; }
  [[nodiscard]] double mean_at(int l_r) const;
  [[nodiscard]] double std_error_at(int l_r) const;
};

CrosstalkRow crosstalk_row(int l0, std::span<const DetectionDistribution> ensemble);

}  // namespace oamsat
