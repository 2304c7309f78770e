#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gpb/error.hpp"
#include "gpb/tf_limit.hpp"

using namespace gpb;

namespace {

constexpr double pi = std::numbers::pi;

// V = r^2, N = a = 1: int (mu - r^2) r^2 dr over [0, sqrt(mu)] = (2/15) mu^{5/2},
// so 4 pi/(8 pi) (2/15) mu^{5/2} = 1 gives mu = 15^{2/5}.
const double kMu = std::pow(15.0, 0.4);
const double kF = kMu - 2.0 * std::pow(15.0, 1.4) / 105.0;

}  // namespace

TEST_CASE("closed form for the harmonic trap") {
  const auto tf = tf_minimize(TrapPotential::harmonic(), 1.0, 1.0);
  CHECK(std::abs(tf.mu - kMu) <= 1e-6);
  CHECK(std::abs(tf.F - kF) <= 1e-6);
  CHECK(tf.mu == doctest::Approx(2.95417).epsilon(1e-5));
  CHECK(tf.F == doctest::Approx(2.11012).epsilon(1e-5));
  CHECK(tf.support_radius == doctest::Approx(std::sqrt(kMu)).epsilon(1e-10));
  // mu N = F + 4 pi a int rho^2
  CHECK(tf.mu == doctest::Approx(tf.F + tf.interaction_energy).epsilon(1e-9));
  CHECK(tf.norm_lo < 1.0);
  CHECK(tf.norm_hi > 1.0);
  CHECK(tf.density(0.0) == doctest::Approx(kMu / (8.0 * pi)));
  CHECK(tf.density(2.0) == 0.0);
}

TEST_CASE("scaling of F on random (N, a) and traps") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> logx(-3.0, 3.0), sdist(1.0, 6.0);
  for (int k = 0; k < 15; ++k) {
    const double s = sdist(rng);
    const auto V = TrapPotential::power(s);
    const double N = std::pow(10.0, logx(rng)), a = std::pow(10.0, logx(rng));
    const auto full = tf_minimize(V, N, a);
    const auto unit = tf_minimize(V, 1.0, N * a);
    const auto base = tf_minimize(V, 1.0, 1.0);
    CHECK(full.F == doctest::Approx(N * unit.F).epsilon(1e-9));
    CHECK(unit.F == doctest::Approx(std::pow(N * a, s / (s + 3.0)) * base.F).epsilon(1e-9));
    CHECK(full.mu == doctest::Approx(full.F / N + full.interaction_energy / N).epsilon(1e-9));

    // rho_{1,Na}(x) = (Na)^{-3/(s+3)} rho~((Na)^{-1/(s+3)} x), rho~ the unit profile.
    const double Na = N * a;
    for (double x : {0.0, 0.3, 0.9}) {
      const double y = x * unit.support_radius;
      const double lhs = unit.density(y);
      const double rhs = std::pow(Na, -3.0 / (s + 3.0)) * base.density(std::pow(Na, -1.0 / (s + 3.0)) * y);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("small a limit") {
  const auto V = TrapPotential::harmonic();
  double prev_F = INFINITY, prev_R = INFINITY;
  for (double a : {1e-1, 1e-3, 1e-5}) {
    const auto tf = tf_minimize(V, 1.0, a);
    CHECK(tf.F == doctest::Approx(kF * std::pow(a, 0.4)).epsilon(1e-9));
    CHECK(tf.F < prev_F);
    CHECK(tf.support_radius < prev_R);
    prev_F = tf.F;
    prev_R = tf.support_radius;
  }
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(tf_minimize(TrapPotential::zero_in_box(), 1.0, 1.0), DomainError);
  std::vector<double> r{0, 1, 2, 3}, v{0, 1, 4, 9};
  CHECK_THROWS_AS(tf_minimize(TrapPotential::tabulated_radial(r, v, 2.0), 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(tf_minimize(TrapPotential::harmonic(), 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(tf_minimize(TrapPotential::harmonic(), 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(gp_tf_convergence(TrapPotential::harmonic(), {10.0, 1.0}), DomainError);
}

TEST_CASE("gradient-corrected bound") {
  const auto V = TrapPotential::harmonic();
  const auto b1 = tf_gradient_bound(V, 1.0);
  CHECK(b1.delta == doctest::Approx(1e-3 * std::sqrt(kMu)));
  // Mollification costs little in the functional.
  CHECK(b1.functional >= kF);
  CHECK(b1.functional <= kF * (1.0 + 1e-4));
  CHECK(b1.gradient_integral > 0.0);
  const auto b2 = tf_gradient_bound(V, 1000.0);
  CHECK(b2.bound / std::pow(1000.0, 0.4) < b1.bound);
}

TEST_CASE("GP to TF convergence table") {
  const auto V = TrapPotential::harmonic();
  const auto rows = gp_tf_convergence(V, {1.0, 10.0, 100.0, 1000.0});
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].F_below_gp);
    CHECK(rows[i].F <= rows[i].E_gp);
    CHECK(rows[i].E_gp <= rows[i].upper_bound);
    CHECK(rows[i].ratio > kF);
    if (i > 0) {
      CHECK(rows[i].ratio < rows[i - 1].ratio);
      CHECK(rows[i].l2_distance < rows[i - 1].l2_distance);
    }
  }
  CHECK(std::abs(rows.back().ratio - kF) <= 0.05 * kF);
  CHECK(rows.front().E_gp == doctest::Approx(3.6224).epsilon(1e-4));
}

TEST_CASE("grid for large Na") {
  const auto g = tf_grid(TrapPotential::harmonic(), 1000.0);
  const auto tf = tf_minimize(TrapPotential::harmonic(), 1.0, 1000.0);
  CHECK(g.R * g.R >= tf.mu + 40.0);
  CHECK(g.R >= 8.0);
  CHECK(g.n() == 2000);
}
