#include "oamsat/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "oamsat/errors.hpp"

namespace oamsat {

void DetectionGrid::validate() const {
  if (n_radial < 1) throw ValidityError("detection grid: n_radial must be >= 1");
  if (n_azimuthal < 8 || !is_power_of_two(static_cast<std::size_t>(n_azimuthal)))
    throw ValidityError("detection grid: n_azimuthal must be a power of two >= 8");
  if (l_half_width < 0) throw ValidityError("detection grid: l window half-width must be >= 0");
  if (2 * l_half_width + 1 > n_azimuthal)
    throw ValidityError("detection grid: l window wider than the azimuthal grid");
}

void DetectionGrid::validate_for(int max_abs_l) const {
  validate();
  if (n_radial < 32) throw ValidityError("detection grid: n_radial must be >= 32");
  if (n_azimuthal < 256) throw ValidityError("detection grid: n_azimuthal must be >= 256");
  if (l_half_width < max_abs_l + 4) {
    throw ValidityError("detection grid: l window must cover [-" + std::to_string(max_abs_l + 4) +
                        ", " + std::to_string(max_abs_l + 4) + "]");
  }
}

double DetectionDistribution::probability(int l_r) const {
  if (!contains(l_r)) throw std::out_of_range("DetectionDistribution: l_r outside window");
  return probabilities[static_cast<std::size_t>(l_r - l_min)];
}

namespace {

inline std::size_t wrap(int m, int n) {
  int idx = m % n;
  if (idx < 0) idx += n;
  return static_cast<std::size_t>(idx);
}

// Entries below this fraction of a ring's power are skipped in the
// convolution with the phase kernel.
constexpr double kNegligiblePower = 1e-18;

QuadratureRule receiver_rule(const ApertureSpec& aperture, const DetectionGrid& grid) {
  grid.validate();
  if (!(aperture.receiver_radius > 0.0))
    throw ValidityError("detection: receiver aperture radius must be positive");
  return gauss_legendre(grid.n_radial, 0.0, aperture.receiver_radius);
}

}  // namespace

PhaseKernel::PhaseKernel(const QuadratureRule& radial, int n_azimuthal, double fried_parameter)
    : n_azimuthal_(n_azimuthal), coeffs_(radial.size() * static_cast<std::size_t>(n_azimuthal)) {
  if (!(fried_parameter > 0.0)) throw std::invalid_argument("PhaseKernel: r_F must be > 0");
  const FourierPlan plan(static_cast<std::size_t>(n_azimuthal));
  std::vector<Complex> samples(static_cast<std::size_t>(n_azimuthal));
  for (std::size_t j = 0; j < radial.size(); ++j) {
    for (int d = 0; d < n_azimuthal; ++d) {
      const double delta = kTwoPi * d / n_azimuthal;
      samples[d] = phase_correlation(radial.nodes[j], delta, fried_parameter, AoMode{false});
    }
    plan.forward(samples);
    for (int m = 0; m < n_azimuthal; ++m) coeffs_[j * n_azimuthal + m] = samples[m].real();
  }
}

double PhaseKernel::coefficient(std::size_t j, int m) const {
  return coeffs_[j * n_azimuthal_ + wrap(m, n_azimuthal_)];
}

double ModalPowerSpectrum::captured_power() const {
  double total = 0.0;
  const std::size_t n = static_cast<std::size_t>(n_azimuthal);
  for (std::size_t j = 0; j < radial_weight.size(); ++j) {
    double ring = 0.0;
    for (std::size_t k = 0; k < n; ++k) ring += power[j * n + k];
    total += radial_weight[j] * ring;
  }
  return total;
}

DetectionEngine::DetectionEngine(const ApertureSpec& aperture, const DetectionGrid& grid,
                                 double fried_parameter)
    : aperture_(aperture),
      grid_(grid),
      fried_parameter_(fried_parameter),
      radial_(receiver_rule(aperture, grid)),
      plan_(static_cast<std::size_t>(grid.n_azimuthal)),
      kernel_(radial_, grid.n_azimuthal, fried_parameter) {
  cos_table_.resize(grid.n_azimuthal);
  sin_table_.resize(grid.n_azimuthal);
  for (int j = 0; j < grid.n_azimuthal; ++j) {
    const double theta = kTwoPi * j / grid.n_azimuthal;
    cos_table_[j] = std::cos(theta);
    sin_table_[j] = std::sin(theta);
  }
  if (grid.verify_resolution) {
    DetectionGrid fine = grid;
    fine.n_azimuthal *= 2;
    fine.verify_resolution = false;
    refined_ = std::make_shared<const DetectionEngine>(aperture, fine, fried_parameter);
  }
}

ModalPowerSpectrum DetectionEngine::spectrum(const LGMode& mode, const TurbulenceRealization& real,
                                             double z) const {
  const PerturbedFieldEvaluator field(mode, real, z);
  const int n = grid_.n_azimuthal;
  const std::size_t nr = radial_.size();

  ModalPowerSpectrum out;
  out.n_azimuthal = n;
  out.radial_weight.resize(nr);
  out.power.resize(nr * static_cast<std::size_t>(n));
  out.k_lo.resize(nr);
  out.k_hi.resize(nr);

  std::vector<Complex> ring(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < nr; ++j) {
    const double r = radial_.nodes[j];
    out.radial_weight[j] = kTwoPi * radial_.weights[j] * r;
    for (int i = 0; i < n; ++i) ring[i] = field(r * cos_table_[i], r * sin_table_[i]);
    plan_.forward(ring);

    double* row = out.power.data() + j * n;
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      row[k] = std::norm(ring[k]);
      total += row[k];
    }
    const double floor = kNegligiblePower * total;
    int lo = n;
    int hi = -n;
    for (int k = 0; k < n; ++k) {
      if (row[k] > floor) {
        const int signed_k = k < n / 2 ? k : k - n;
        lo = std::min(lo, signed_k);
        hi = std::max(hi, signed_k);
      }
    }
    out.k_lo[j] = lo;
    out.k_hi[j] = hi;
  }
  return out;
}

DetectionDistribution DetectionEngine::project(const ModalPowerSpectrum& spec, AoMode ao) const {
  const int n = spec.n_azimuthal;
  if (n != grid_.n_azimuthal) throw std::invalid_argument("project: spectrum grid mismatch");
  DetectionDistribution dist;
  dist.l_min = grid_.l_min();
  dist.probabilities.assign(static_cast<std::size_t>(grid_.window_size()), 0.0);
  dist.captured_power = spec.captured_power();

  const std::size_t nr = spec.radial_weight.size();
  for (std::size_t j = 0; j < nr; ++j) {
    const double* row = spec.power.data() + j * n;
    const double weight = spec.radial_weight[j];
    if (ao.enabled) {
      for (int l = grid_.l_min(); l <= grid_.l_max(); ++l)
        dist.probabilities[l - dist.l_min] += weight * row[wrap(l, n)];
      continue;
    }
    if (spec.k_lo[j] > spec.k_hi[j]) continue;
    const auto c = kernel_.row(j);
    for (int l = grid_.l_min(); l <= grid_.l_max(); ++l) {
      double acc = 0.0;
      for (int k = spec.k_lo[j]; k <= spec.k_hi[j]; ++k) acc += c[wrap(l - k, n)] * row[wrap(k, n)];
      dist.probabilities[l - dist.l_min] += weight * acc;
    }
  }
  return dist;
}

DetectionDistribution DetectionEngine::evaluate(const LGMode& mode,
                                                const TurbulenceRealization& real, double z,
                                                AoMode ao) const {
  const ModalPowerSpectrum spec = spectrum(mode, real, z);
  DetectionDistribution dist = project(spec, ao);
  if (refined_) {
    const AoMode modes[] = {ao};
    check_resolution(mode, real, z, std::span<const DetectionDistribution>(&dist, 1), modes);
  }
  return dist;
}

void DetectionEngine::check_resolution(const LGMode& mode, const TurbulenceRealization& real,
                                       double z, std::span<const DetectionDistribution> coarse,
                                       std::span<const AoMode> modes) const {
  if (coarse.size() != modes.size()) throw std::invalid_argument("check_resolution: size mismatch");
  const DetectionEngine* fine_engine = refined_.get();
  std::unique_ptr<DetectionEngine> local;
  if (!fine_engine) {
    DetectionGrid fine = grid_;
    fine.n_azimuthal *= 2;
    fine.verify_resolution = false;
    local = std::make_unique<DetectionEngine>(aperture_, fine, fried_parameter_);
    fine_engine = local.get();
  }
  const ModalPowerSpectrum spec = fine_engine->spectrum(mode, real, z);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const DetectionDistribution fine = fine_engine->project(spec, modes[i]);
    for (std::size_t k = 0; k < fine.probabilities.size(); ++k) {
      const double change = std::abs(fine.probabilities[k] - coarse[i].probabilities[k]);
      if (change > kResolutionTolerance) {
        throw NumericalError("detection: grid under-resolved (n_azimuthal=" +
                             std::to_string(grid_.n_azimuthal) + ", l_r=" +
                             std::to_string(fine.l_min + static_cast<int>(k)) +
                             " moved by " + std::to_string(change) + " on refinement)");
      }
    }
  }
}

DetectionDistribution detection_distribution(const LGMode& mode, const TurbulenceRealization& real,
                                             const ApertureSpec& aperture, double fried_parameter,
                                             AoMode ao, const DetectionGrid& grid, double z) {
  if (!(z > 0.0)) throw std::invalid_argument("detection_distribution: z must be > 0");
  const DetectionEngine engine(aperture, grid, fried_parameter);
  return engine.evaluate(mode, real, z, ao);
}

DetectionDistribution detection_distribution_bruteforce(const LGMode& mode,
                                                        const TurbulenceRealization& real,
                                                        const ApertureSpec& aperture,
                                                        double fried_parameter, AoMode ao,
                                                        const DetectionGrid& grid, double z) {
  grid.validate();
  if (grid.n_radial > 64 || grid.n_azimuthal > 128)
    throw std::invalid_argument("bruteforce: grid limited to 64 radial x 128 azimuthal nodes");
  if (!(z > 0.0)) throw std::invalid_argument("bruteforce: z must be > 0");

  const QuadratureRule radial = gauss_legendre(grid.n_radial, 0.0, aperture.receiver_radius);
  const int n = grid.n_azimuthal;
  const double dtheta = kTwoPi / n;

  DetectionDistribution dist;
  dist.l_min = grid.l_min();
  dist.probabilities.assign(static_cast<std::size_t>(grid.window_size()), 0.0);

  std::vector<Complex> field(static_cast<std::size_t>(n));
  // kernel[d + n - 1] = C(r, d dtheta) exp(-i l d dtheta) for d = a - b in (-n, n).
  std::vector<Complex> kernel(static_cast<std::size_t>(2 * n - 1));
  for (std::size_t j = 0; j < radial.size(); ++j) {
    const double r = radial.nodes[j];
    double ring_power = 0.0;
    for (int a = 0; a < n; ++a) {
      field[a] = perturbed_field(mode, real, r, a * dtheta, z);
      ring_power += std::norm(field[a]) * dtheta;
    }
    dist.captured_power += radial.weights[j] * r * ring_power;

    for (int l = grid.l_min(); l <= grid.l_max(); ++l) {
      for (int d = 1 - n; d < n; ++d) {
        kernel[d + n - 1] =
            std::polar(phase_correlation(r, d * dtheta, fried_parameter, ao), -l * d * dtheta);
      }
      Complex sum = 0.0;
      for (int a = 0; a < n; ++a) {
        Complex inner = 0.0;
        for (int b = 0; b < n; ++b) inner += mul(std::conj(field[b]), kernel[a - b + n - 1]);
        sum += mul(field[a], inner);
      }
      dist.probabilities[l - dist.l_min] +=
          radial.weights[j] * r * sum.real() * dtheta * dtheta / kTwoPi;
    }
  }
  return dist;
}

double CrosstalkRow::mean_at(int l_r) const {
  if (l_r < l_min || l_r > l_max()) throw std::out_of_range("CrosstalkRow: l_r outside window");
  return mean[static_cast<std::size_t>(l_r - l_min)];
}

double CrosstalkRow::std_error_at(int l_r) const {
  if (l_r < l_min || l_r > l_max()) throw std::out_of_range("CrosstalkRow: l_r outside window");
  return std_error[static_cast<std::size_t>(l_r - l_min)];
}

CrosstalkRow crosstalk_row(int l0, std::span<const DetectionDistribution> ensemble) {
  if (ensemble.empty()) throw std::invalid_argument("crosstalk_row: empty ensemble");
  const std::size_t width = ensemble.front().probabilities.size();
  CrosstalkRow row;
  row.l0 = l0;
  row.l_min = ensemble.front().l_min;
  row.samples = ensemble.size();
  row.mean.assign(width, 0.0);
  row.std_error.assign(width, 0.0);
  for (const auto& d : ensemble) {
    if (d.l_min != row.l_min || d.probabilities.size() != width)
      throw std::invalid_argument("crosstalk_row: inconsistent l windows");
    for (std::size_t k = 0; k < width; ++k) row.mean[k] += d.probabilities[k];
    row.captured_power += d.captured_power;
  }
  const double n = static_cast<double>(ensemble.size());
  for (auto& m : row.mean) m /= n;
  row.captured_power /= n;
  if (ensemble.size() > 1) {
    for (std::size_t k = 0; k < width; ++k) {
      double ss = 0.0;
      for (const auto& d : ensemble) {
        const double dev = d.probabilities[k] - row.mean[k];
        ss += dev * dev;
      }
      row.std_error[k] = std::sqrt(ss / (n - 1.0) / n);
    }
  }
  return row;
}

}  // namespace oamsat
