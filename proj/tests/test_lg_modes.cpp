#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "oamsat/lg_modes.hpp"

using namespace oamsat;

namespace {

constexpr double kW0 = 0.15;
constexpr double kLambda = 1550e-9;

double r_rms_general(int p, int l, double w) { return std::sqrt((2.0 * p + std::abs(l) + 1.0) / 2.0) * w; }

// Radial inner product <R_a, R_b> = int conj(R_a) R_b r dr on [0, 10 r_rms].
Complex radial_overlap(const LGMode& a, const LGMode& b, double z) {
  const double w = beam_width(a, z);
  const double cutoff =
      10.0 * std::max(r_rms_general(a.p(), a.l(), w), r_rms_general(b.p(), b.l(), w));
  const auto rule = gauss_legendre(400, 0.0, cutoff);
  return rule.apply([&](double r) {
    return std::conj(radial_profile(a, r, z)) * radial_profile(b, r, z) * r;
  });
}

}  // namespace

TEST_CASE("LGMode derived quantities and validation") {
  const LGMode m(0, 2, kW0, kLambda);
  CHECK(m.rayleigh_range() == doctest::Approx(kPi * kW0 * kW0 / kLambda));
  CHECK(m.wavenumber() == doctest::Approx(kTwoPi / kLambda));
  CHECK_THROWS_AS(LGMode(-1, 0, kW0, kLambda), std::invalid_argument);
  CHECK_THROWS_AS(LGMode(0, 0, 0.0, kLambda), std::invalid_argument);
  CHECK_THROWS_AS(LGMode(0, 0, kW0, -1.0), std::invalid_argument);
}

TEST_CASE("beam_width examples") {
  const LGMode m(0, 0, kW0, kLambda);
  CHECK(beam_width(m, 0.0) == kW0);
  CHECK(beam_width(m, m.rayleigh_range()) == doctest::Approx(std::sqrt(2.0) * kW0).epsilon(1e-15));
  // z_R = pi 0.15^2 / 1.55e-6 = 45603.9 m
  const double zr = kPi * kW0 * kW0 / kLambda;
  const double hand = kW0 * std::sqrt(1.0 + (497e3 / zr) * (497e3 / zr));
  CHECK(zr == doctest::Approx(45603.9).epsilon(1e-5));
  CHECK(beam_width(m, 497e3) == doctest::Approx(hand).epsilon(1e-14));
  CHECK(std::abs(beam_width(m, 497e3) - 1.64) < 0.005);
  CHECK_THROWS_AS(beam_width(m, -1.0), std::invalid_argument);
}

TEST_CASE("beam_width is strictly increasing in z") {
  const LGMode m(0, 3, kW0, kLambda);
  double prev = beam_width(m, 0.0);
  for (double z = 100.0; z < 1e6; z *= 1.7) {
    const double w = beam_width(m, z);
    CHECK(w > prev);
    prev = w;
  }
}

TEST_CASE("radial_profile value at the origin") {
  const LGMode m(0, 0, kW0, kLambda);
  const Complex v = radial_profile(m, 0.0, 0.0);
  CHECK(v.real() == doctest::Approx(2.0 / kW0).epsilon(1e-15));
  CHECK(v.imag() == 0.0);
}

TEST_CASE("radial_profile is normalized for p <= 8, |l| <= 8") {
  for (int p = 0; p <= 8; ++p) {
    for (int l = -8; l <= 8; ++l) {
      const LGMode m(p, l, kW0, kLambda);
      for (double z : {0.0, 3e4, 497e3}) {
        CHECK(std::abs(radial_overlap(m, m, z).real() - 1.0) < 1e-9);
      }
    }
  }
}

TEST_CASE("radial profiles are orthogonal in p at fixed l") {
  for (int l : {0, 1, -3, 5}) {
    for (int p = 0; p <= 4; ++p) {
      for (int q = p + 1; q <= 4; ++q) {
        const LGMode a(p, l, kW0, kLambda);
        const LGMode b(q, l, kW0, kLambda);
        CHECK(std::abs(radial_overlap(a, b, 0.0)) < 1e-9);
        CHECK(std::abs(radial_overlap(a, b, 497e3)) < 1e-9);
      }
    }
  }
}

TEST_CASE("+l and -l radial magnitudes coincide exactly") {
  for (int l = 1; l <= 6; ++l) {
    const LGMode plus(0, l, kW0, kLambda);
    const LGMode minus(0, -l, kW0, kLambda);
    for (double r = 0.0; r < 5.0; r += 0.173) {
      CHECK(std::abs(radial_profile(plus, r, 1e5)) == std::abs(radial_profile(minus, r, 1e5)));
    }
  }
}

TEST_CASE("LG_0l intensity peaks at r = sqrt(|l|/2) w(z)") {
  const double z = 2e5;
  for (int l = 1; l <= 6; ++l) {
    const LGMode m(0, l, kW0, kLambda);
    const double w = beam_width(m, z);
    const double peak = std::sqrt(l / 2.0) * w;
    // Dense scan for the maximiser.
    double best_r = 0.0;
    double best = -1.0;
    for (int i = 0; i <= 200000; ++i) {
      const double r = 3.0 * w * i / 200000.0;
      const double v = std::norm(radial_profile(m, r, z));
      if (v > best) {
        best = v;
        best_r = r;
      }
    }
    CHECK(std::abs(best_r - peak) < 3.0 * w / 200000.0 * 2.0);
  }
}

TEST_CASE("eigenstate_amplitude azimuthal structure") {
  const LGMode zero(0, 0, kW0, kLambda);
  const Complex ref = eigenstate_amplitude(zero, 0.1, 0.0, 1e4);
  for (double t = 0.0; t < kTwoPi; t += 0.5) CHECK(std::abs(eigenstate_amplitude(zero, 0.1, t, 1e4) - ref) < 1e-15);

  for (int l = 1; l <= 4; ++l) {
    const LGMode plus(0, l, kW0, kLambda);
    const LGMode minus(0, -l, kW0, kLambda);
    for (double t = 0.0; t < kTwoPi; t += 0.37) {
      const Complex a = eigenstate_amplitude(plus, 0.12, t, 0.0);
      const Complex b = eigenstate_amplitude(minus, 0.12, t, 0.0);
      CHECK(std::abs(a - std::conj(b)) < 1e-12 * std::abs(a) + 1e-300);
    }
  }
  CHECK_THROWS_AS(eigenstate_amplitude(zero, 0.1, kTwoPi, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(eigenstate_amplitude(zero, 0.1, -0.1, 0.0), std::invalid_argument);
}

TEST_CASE("eigenstates are orthonormal over the plane") {
  const double z = 1e5;
  const double w = beam_width(LGMode(0, 0, kW0, kLambda), z);
  const auto radial = gauss_legendre(200, 0.0, 10.0 * r_rms_general(0, 4, w));
  constexpr int n_theta = 64;
  for (int l = -3; l <= 3; ++l) {
    for (int m = -3; m <= 3; ++m) {
      const LGMode a(0, l, kW0, kLambda);
      const LGMode b(0, m, kW0, kLambda);
      Complex sum = 0.0;
      for (std::size_t i = 0; i < radial.size(); ++i) {
        const double r = radial.nodes[i];
        for (int j = 0; j < n_theta; ++j) {
          const double t = kTwoPi * j / n_theta;
          sum += radial.weights[i] * r * (kTwoPi / n_theta) *
                 std::conj(eigenstate_amplitude(a, r, t, z)) * eigenstate_amplitude(b, r, t, z);
        }
      }
      CHECK(std::abs(sum - (l == m ? 1.0 : 0.0)) < 1e-9);
    }
  }
}

TEST_CASE("rms_radius examples and quadrature") {
  const LGMode l0(0, 0, kW0, kLambda);
  CHECK(rms_radius(l0, 0.0) == doctest::Approx(kW0 / std::sqrt(2.0)).epsilon(1e-15));
  const LGMode l4(0, 4, kW0, kLambda);
  CHECK(rms_radius(l4, 3e5) == doctest::Approx(std::sqrt(2.5) * beam_width(l4, 3e5)).epsilon(1e-15));

  for (int l = -4; l <= 4; ++l) {
    const LGMode m(0, l, kW0, kLambda);
    const double z = 497e3;
    const double w = beam_width(m, z);
    const auto rule = gauss_legendre(300, 0.0, 10.0 * r_rms_general(0, l, w));
    // Second moment of |phi|^2 over the plane; the theta integral of
    // |exp(i l theta)|^2 / (2 pi) is one.
    const double moment = rule.apply([&](double r) { return r * r * std::norm(radial_profile(m, r, z)) * r; });
    CHECK(std::abs(std::sqrt(moment) - rms_radius(m, z)) < 1e-9 * rms_radius(m, z));
  }
  CHECK_THROWS_AS(rms_radius(LGMode(1, 0, kW0, kLambda), 0.0), std::invalid_argument);
}

TEST_CASE("effective_radius examples") {
  const LGMode widest(0, 4, kW0, kLambda);
  CHECK(effective_radius(widest, 0.0) == doctest::Approx(std::sqrt(5.0) * kW0).epsilon(1e-15));
  // Aperture sizing quoted as r_t = 33 cm, r_a = 3.7 m (two significant figures).
  CHECK(std::abs(effective_radius(widest, 0.0) - 0.33) < 0.01);
  CHECK(std::abs(effective_radius(widest, 497e3) - 3.7) < 0.05);
  CHECK(effective_radius(widest, 0.0) == doctest::Approx(std::sqrt(2.0) * rms_radius(widest, 0.0)));
  CHECK_THROWS_AS(effective_radius(LGMode(2, 1, kW0, kLambda), 0.0), std::invalid_argument);
}

TEST_CASE("power enclosed by the effective radius") {
  for (int l = 0; l <= 4; ++l) {
    const LGMode m(0, l, kW0, kLambda);
    const double z = 497e3;
    const double r0l = effective_radius(m, z);
    const auto rule = gauss_legendre(200, 0.0, r0l);
    const double enclosed = rule.apply([&](double r) { return std::norm(radial_profile(m, r, z)) * r; });
    // |R_0l|^2 r dr = u^|l| e^{-u} du / |l|! with u = 2 r^2 / w^2, so the
    // enclosed fraction is the regularized incomplete gamma P(|l|+1, 2(|l|+1)).
    const double u = 2.0 * (l + 1.0);
    double tail = 0.0;
    double term = 1.0;
    for (int i = 0; i <= l; ++i) {
      tail += term;
      term *= u / (i + 1.0);
    }
    const double exact = 1.0 - std::exp(-u) * tail;
    CHECK(std::abs(enclosed - exact) < 1e-9);
    CHECK(enclosed > 0.85);
    CHECK(enclosed < 0.98);
  }
}
