#include "oamsat/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

#include "oamsat/errors.hpp"

namespace oamsat {

double laguerre(int p, double a, double x) {
  if (p < 0) throw std::invalid_argument("laguerre: negative degree p=" + std::to_string(p));
  if (p > 64) throw std::invalid_argument("laguerre: degree p=" + std::to_string(p) + " exceeds 64");
  if (!(a >= 0.0)) throw std::invalid_argument("laguerre: parameter a must be >= 0");
  if (!std::isfinite(x)) throw std::invalid_argument("laguerre: non-finite argument");

  double prev = 1.0;
  if (p == 0) return prev;
  double cur = 1.0 + a - x;
  for (int n = 1; n < p; ++n) {
    const double next = ((2.0 * n + 1.0 + a - x) * cur - (n + a) * prev) / (n + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  if (!(a < b)) throw std::invalid_argument("gauss_legendre: require a < b");

  QuadratureRule rule;
  rule.a = a;
  rule.b = b;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Roots of P_n on [-1, 1], largest first.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[n - 1 - i] = half * w;
    rule.nodes[i] = mid - half * x;
    rule.weights[i] = half * w;
  }
  return rule;
}

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double fc = f(mid);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(mid - dx) + f(mid + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

constexpr int kSegmentBudget = 20000;

}  // namespace

double integrate_profile(const std::function<double(double)>& f,
                         std::span<const double> breakpoints, double rel_tol) {
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate_profile: need two limits");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("integrate_profile: rel_tol must be > 0");
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (breakpoints[i] < breakpoints[i - 1])
      throw std::invalid_argument("integrate_profile: breakpoints must be non-decreasing");
  }

  std::priority_queue<Segment> heap;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (breakpoints[i] == breakpoints[i - 1]) continue;
    const Segment s = kronrod15(f, breakpoints[i - 1], breakpoints[i]);
    total += s.value;
    error += s.error;
    heap.push(s);
  }

  int segments = static_cast<int>(heap.size());
  while (!heap.empty() && error > rel_tol * std::abs(total)) {
    if (segments >= kSegmentBudget) {
      throw NumericalError("integrate_profile: no convergence within " +
                           std::to_string(kSegmentBudget) + " segments (estimate " +
                           std::to_string(total) + ", error " + std::to_string(error) + ")");
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      throw NumericalError("integrate_profile: interval collapsed to machine precision");
    }
    const Segment left = kronrod15(f, worst.a, mid);
    const Segment right = kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++segments;
  }
  if (!std::isfinite(total)) throw NumericalError("integrate_profile: non-finite result");

  // Re-sum to avoid drift from the running updates.
  double resummed = 0.0;
  while (!heap.empty()) {
    resummed += heap.top().value;
    heap.pop();
  }
  return resummed;
}

double integrate_profile(const std::function<double(double)>& f, double a, double b,
                         double rel_tol) {
  if (a > b) throw std::invalid_argument("integrate_profile: require a <= b");
  if (a == b) return 0.0;
  const std::array<double, 2> limits{a, b};
  return integrate_profile(f, limits, rel_tol);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

AzimuthalSpectrum::AzimuthalSpectrum(std::vector<Complex> fft_order)
    : coeffs_(std::move(fft_order)) {}

Complex AzimuthalSpectrum::operator[](int m) const {
  const int n = size();
  int idx = m % n;
  if (idx < 0) idx += n;
  return coeffs_[static_cast<std::size_t>(idx)];
}

FourierPlan::FourierPlan(std::size_t n) : n_(n) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("FourierPlan: size " + std::to_string(n) +
                                " is not a power of two");
  }
  bit_reverse_.resize(n);
  int bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < bits; ++b) {
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    }
    bit_reverse_[i] = r;
  }
  twiddles_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
}

void FourierPlan::transform(std::span<Complex> data, bool inverse) const {
  if (data.size() != n_) throw std::invalid_argument("FourierPlan: size mismatch");
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j = bit_reverse_[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        Complex w = twiddles_[k * stride];
        if (inverse) w = std::conj(w);
        const Complex u = data[start + k];
        const Complex v = mul(data[start + k + half], w);
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
}

void FourierPlan::forward(std::span<Complex> data) const {
  transform(data, false);
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& c : data) c *= scale;
}

void FourierPlan::inverse(std::span<Complex> data) const { transform(data, true); }

AzimuthalSpectrum circular_fourier(std::span<const Complex> samples) {
  if (samples.size() < 8 || !is_power_of_two(samples.size())) {
    throw std::invalid_argument("circular_fourier: sample count " +
                                std::to_string(samples.size()) +
                                " must be a power of two >= 8");
  }
  std::vector<Complex> data(samples.begin(), samples.end());
  FourierPlan(data.size()).forward(data);
  return AzimuthalSpectrum(std::move(data));
}

std::vector<Complex> circular_synthesis(const AzimuthalSpectrum& spectrum) {
  std::vector<Complex> data(spectrum.raw().begin(), spectrum.raw().end());
  FourierPlan(data.size()).inverse(data);
  return data;
}

Mat2 Mat2::inverse() const {
  const double d = det();
  if (d == 0.0) throw std::domain_error("Mat2::inverse: singular matrix");
  return {yy / d, -xy / d, -yx / d, xx / d};
}

Mat2 cholesky2(const Mat2& cov) {
  const double scale = std::max({std::abs(cov.xx), std::abs(cov.yy), std::abs(cov.xy),
                                 std::numeric_limits<double>::min()});
  const double tol = 1e-12 * scale;
  if (std::abs(cov.xy - cov.yx) > tol) throw std::invalid_argument("cholesky2: matrix not symmetric");
  if (cov.xx < -tol) throw std::invalid_argument("cholesky2: negative leading pivot");

  Mat2 l;
  if (cov.xx <= tol) {
    if (std::abs(cov.yx) > tol) throw std::invalid_argument("cholesky2: matrix is indefinite");
    l.xx = 0.0;
    l.yx = 0.0;
  } else {
    l.xx = std::sqrt(cov.xx);
    l.yx = cov.yx / l.xx;
  }
  const double pivot = cov.yy - l.yx * l.yx;
  if (pivot < -tol) throw std::invalid_argument("cholesky2: matrix is indefinite");
  l.yy = std::sqrt(std::max(pivot, 0.0));
  return l;
}

}  // namespace oamsat
