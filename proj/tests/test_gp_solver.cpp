#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gpb/error.hpp"
#include "gpb/gp_solver.hpp"

using namespace gpb;

namespace {

constexpr double pi = std::numbers::pi;

// Converged reference for V = r^2, N = a = 1: the radial h = 0.01 Richardson
// value and the Neumann cartesian value at R = 8 agree to 4e-10.
constexpr double kGp11 = 3.6224360778;

Grid radial(double h = 0.02, double R = 8.0) { return {GridKind::radial, h, R, Boundary::decay}; }
Grid box(double R, int n = 32) { return {GridKind::cartesian, R / n, R, Boundary::neumann}; }

WaveField gaussian(const Grid& g, double width, double N = 1.0) {
  WaveField f{g, {}, N};
  const double c = std::sqrt(N) * std::pow(pi, -0.75) * std::pow(width, -1.5);
  const std::size_t m = g.nodes_per_axis();
  if (g.kind == GridKind::radial) {
    for (std::size_t i = 0; i < m; ++i) {
      const double r = g.coordinate(i);
      f.values.push_back(c * std::exp(-r * r / (2.0 * width * width)));
    }
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) {
          const double x = g.coordinate(i), y = g.coordinate(j), z = g.coordinate(k);
          f.values.push_back(c * std::exp(-(x * x + y * y + z * z) / (2.0 * width * width)));
        }
  }
  return f;
}

// Trial energy of phi = exp(-r^2/(2w^2)) + c (1 - r^2/Rt^2)_+ at N = 1, by
// composite Simpson on both sides of Rt.
double trial_energy(double w, double c, double Rt, double a) {
  auto phi = [&](double r) {
    const double tf = r < Rt ? c * (1.0 - r * r / (Rt * Rt)) : 0.0;
    return std::exp(-r * r / (2.0 * w * w)) + tf;
  };
  auto dphi = [&](double r) {
    const double tf = r < Rt ? -2.0 * c * r / (Rt * Rt) : 0.0;
    return -r / (w * w) * std::exp(-r * r / (2.0 * w * w)) + tf;
  };
  double n = 0.0, T = 0.0, P = 0.0, Q = 0.0;
  auto simpson = [&](double lo, double hi) {
    const int m = 800;
    const double h = (hi - lo) / m;
    for (int i = 0; i <= m; ++i) {
      const double r = lo + i * h;
      const double wgt = (i == 0 || i == m ? 1.0 : (i % 2 ? 4.0 : 2.0)) * h / 3.0 * 4.0 * pi * r * r;
      const double p = phi(r), d = dphi(r);
      n += wgt * p * p;
      T += wgt * d * d;
      P += wgt * r * r * p * p;
      Q += wgt * p * p * p * p;
    }
  };
  simpson(0.0, Rt);
  simpson(Rt, 12.0);
  return (T + P) / n + 4.0 * pi * a * Q / (n * n);
}

double coarse_trial_minimum(double a) {
  double best = INFINITY;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      for (int k = 0; k < 7; ++k)
        best = std::min(best, trial_energy(0.8 + 0.06 * i, 0.1 * j, 1.5 + 0.4 * k, a));
  return best;
}

}  // namespace

TEST_CASE("energy of Gaussians") {
  const auto V = TrapPotential::harmonic();
  WaveField g = gaussian(radial(0.01), 1.0);
  normalize(g, V);
  const auto p0 = evaluate_energy(g, V, 0.0);
  CHECK(p0.kinetic == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(p0.trap == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(p0.interaction == 0.0);
  const auto p1 = evaluate_energy(g, V, 1.0);
  CHECK(p1.total() == doctest::Approx(3.0 + 4.0 * pi * std::pow(2.0 * pi, -1.5)).epsilon(1e-4));

  WaveField bad = g;
  for (double& v : bad.values) v *= 1.1;
  CHECK_THROWS_AS(evaluate_energy(bad, V, 0.0), DomainError);
  CHECK_THROWS_AS(evaluate_energy(g, V, -1.0), DomainError);
}

TEST_CASE("constant field in a Neumann box") {
  const auto V = TrapPotential::zero_in_box();
  const Grid g = box(2.0);
  const double N = 50.0, a = 0.01, vol = 64.0;
  WaveField f{g, std::vector<double>(g.node_count(), std::sqrt(N / vol)), N};
  CHECK(field_norm(f, V) == doctest::Approx(N).epsilon(1e-12));
  const auto p = evaluate_energy(f, V, a);
  CHECK(std::abs(p.kinetic) <= 1e-12);
  CHECK(p.trap == 0.0);
  CHECK(p.interaction == doctest::Approx(4.0 * pi * a * N * N / vol).epsilon(1e-12));
}

TEST_CASE("linear harmonic ground state") {
  const auto s = minimize(TrapPotential::harmonic(), 0.0, 1.0, radial());
  CHECK(s.converged);
  CHECK(std::abs(s.energy - 3.0) <= 1e-3);
  CHECK(std::abs(s.energy_extrapolated - 3.0) <= 1e-6);
  CHECK(s.mu == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(std::abs(virial_residual(s, 2.0)) <= 1e-3);
  CHECK(s.boundary_ok);
}

TEST_CASE("E(1,1) against a brute-force trial family") {
  const double trial = coarse_trial_minimum(1.0);
  CHECK(trial > 3.0);
  CHECK(trial <= 3.0 + 4.0 * pi * std::pow(2.0 * pi, -1.5));

  const auto s = minimize(TrapPotential::harmonic(), 1.0, 1.0, radial());
  CHECK(s.energy > 3.0);
  CHECK(s.energy <= trial);
  CHECK(std::abs(s.energy_extrapolated - kGp11) <= 1e-8);
  CHECK(std::abs(s.energy - kGp11) <= s.richardson_error * 1.5);
}

TEST_CASE("solution identities") {
  const auto s = minimize(TrapPotential::harmonic(), 0.3, 2.0, radial());
  CHECK(s.energy == doctest::Approx(s.parts.total()).epsilon(1e-14));
  CHECK(std::abs(s.mu - (s.energy / 2.0 + 4.0 * pi * 0.3 * s.rho_bar)) <= 1e-12 * s.mu);
  for (double v : s.phi.values) CHECK(v >= 0.0);
  CHECK(field_norm(s.phi, s.trap) == doctest::Approx(2.0).epsilon(1e-10));
  const auto rho = density(s);
  double mx = 0.0;
  for (double v : rho) mx = std::max(mx, v);
  CHECK(s.rho_max == doctest::Approx(mx));
  CHECK(s.rho_bar <= s.rho_max);

  CHECK_THROWS_AS(minimize(TrapPotential::harmonic(), -0.1, 1.0, radial()), DomainError);
}

TEST_CASE("homogeneous gas in a Neumann box") {
  const auto V = TrapPotential::zero_in_box();
  for (double R : {1.0, 2.0}) {
    const double N = 10.0, a = 0.05, vol = std::pow(2.0 * R, 3);
    SolverOptions o;
    o.richardson = false;
    const auto s = minimize(V, a, N, box(R), o);
    CHECK(std::abs(s.energy - 4.0 * pi * a * N * N / vol) <= 1e-10 * s.energy);
    const double c = std::sqrt(N / vol);
    for (double v : s.phi.values) CHECK(std::abs(v - c) <= 1e-8 * c);
    const auto chk = structural_assertions(s);
    CHECK(chk.positivity == Check::pass);
    CHECK(chk.monotonicity == Check::not_applicable);
    CHECK(chk.exponential_tail == Check::not_applicable);

    const auto mu = chemical_potential(s, 0.01 * N, o);
    CHECK(mu.formula == doctest::Approx(2.0 * s.energy / N).epsilon(1e-10));
    CHECK(mu.finite_diff == doctest::Approx(mu.formula).epsilon(1e-8));
  }
}

TEST_CASE("chemical potential") {
  SolverOptions o;
  o.richardson = false;
  const auto V = TrapPotential::harmonic();
  const auto lin = minimize(V, 0.0, 1.0, radial(), o);
  const auto m0 = chemical_potential(lin, 0.01, o);
  CHECK(m0.formula == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(m0.finite_diff == doctest::Approx(3.0).epsilon(1e-3));

  const auto s = minimize(V, 1.0, 1.0, radial(), o);
  const auto m = chemical_potential(s, 0.01, o);
  CHECK(std::abs(m.formula - m.finite_diff) <= 1e-3 * m.formula);
  CHECK(m.formula > s.energy);
}

TEST_CASE("virial theorem") {
  const auto V = TrapPotential::harmonic();
  for (double Na : {0.1, 1.0, 10.0}) {
    const auto s = minimize(V, Na, 1.0, radial());
    CHECK(std::abs(virial_residual(s, 2.0)) <= 1e-3 * s.energy);
  }

  // Off-minimum Gaussian: T = 3/(2 w^2), P = 3 w^2 / 2.
  const double w = 1.2;
  GpSolution g;
  g.trap = V;
  g.phi = gaussian(radial(0.01), w);
  normalize(g.phi, V);
  g.parts = evaluate_energy(g.phi, V, 0.0);
  const double expected = 1.0 / (w * w) - w * w;
  CHECK(virial_residual(g, 2.0) == doctest::Approx(expected).epsilon(1e-3));
  CHECK(virial_residual(g, 2.0) < 0.0);

  GpSolution t;
  t.trap = TrapPotential::zero_in_box();
  CHECK_THROWS_AS(virial_residual(t, 2.0), DomainError);
}

TEST_CASE("scaling identities") {
  const auto V = TrapPotential::harmonic();
  SolverOptions o;
  const auto one = check_scaling(V, 0.5, 1.0, radial(), o);
  CHECK(one.energy_relative == 0.0);
  CHECK(one.density_max == 0.0);
  for (auto [N, a] : {std::pair{1e2, 1e-2}, std::pair{1e4, 1e-4}}) {
    const auto r = check_scaling(V, a, N, radial(), o);
    CHECK(r.energy_relative <= 2.0 * o.tolerance);
    CHECK(r.density_relative <= 1e-6);
  }
}

TEST_CASE("structural assertions") {
  const auto lin = minimize(TrapPotential::harmonic(), 0.0, 1.0, radial());
  CHECK(structural_assertions(lin).all_ok());
  CHECK(structural_assertions(lin).log_concavity == Check::pass);

  const auto quartic = minimize(TrapPotential::power(4.0), 1.0, 1.0, radial());
  const auto c = structural_assertions(quartic);
  CHECK(c.positivity == Check::pass);
  CHECK(c.monotonicity == Check::pass);
  CHECK(c.log_concavity == Check::pass);
  CHECK(c.exponential_tail == Check::pass);
}

TEST_CASE("refinement does not raise the energy") {
  SolverOptions o;
  o.richardson = false;
  const auto V = TrapPotential::harmonic();
  double last = INFINITY;
  for (double h : {0.08, 0.04, 0.02}) {
    const auto s = minimize(V, 1.0, 1.0, radial(h), o);
    CHECK(s.energy <= last + 1e-9);
    last = s.energy;
  }
}

TEST_CASE("gradient against finite differences") {
  std::mt19937 rng(99);
  std::normal_distribution<double> gauss;
  const auto V = TrapPotential::harmonic();
  const Grid grids[] = {radial(0.05, 8.0), {GridKind::cartesian, 0.2, 6.4, Boundary::decay},
                        box(3.2)};
  for (const Grid& g : grids) {
    WaveField f = gaussian(g, 1.1);
    normalize(f, V);
    const double a = 0.7;
    const auto grad = energy_gradient(f, V, a);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> d(grad.unknowns.size());
      for (double& v : d) v = gauss(rng);
      double gd = 0.0, dd = 0.0, xx = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        gd += grad.gradient[i] * d[i];
        dd += d[i] * d[i];
        xx += grad.unknowns[i] * grad.unknowns[i];
      }
      const double eps = 1e-4 * std::sqrt(xx / dd);
      std::vector<double> xp = grad.unknowns, xm = grad.unknowns;
      for (std::size_t i = 0; i < d.size(); ++i) {
        xp[i] += eps * d[i];
        xm[i] -= eps * d[i];
      }
      const double fd =
          (energy_of_unknowns(g, xp, V, a) - energy_of_unknowns(g, xm, V, a)) / (2.0 * eps);
      CHECK(std::abs(fd - gd) <= 1e-6 * std::abs(gd));
    }
  }
}

TEST_CASE("Neumann boxes approach the full-space energy") {
  const auto V = TrapPotential::harmonic();
  SolverOptions o;
  o.richardson = false;
  std::vector<BoxEnergy> lin;
  for (double R : {3.0, 5.0, 8.0}) {
    auto r = solve_neumann_box(V, 0.0, 1.0, {R}, R / 32.0, o);
    lin.push_back(std::move(r.front()));
  }
  CHECK(std::abs(lin[2].energy - 3.0) < 1e-6);
  CHECK(std::abs(lin[1].energy - 3.0) < std::abs(lin[0].energy - 3.0));
  for (const auto& b : lin) CHECK(b.energy <= 3.0 + 1e-9);

  double last = -INFINITY;
  for (double R : {4.0, 6.0, 8.0}) {
    const auto r = solve_neumann_box(V, 1.0, 1.0, {R}, R / 32.0, o);
    CHECK(r.front().energy >= last - 1e-9);
    CHECK(r.front().energy <= kGp11 + 1e-8);
    last = r.front().energy;
  }
  CHECK(std::abs(last - kGp11) <= 1e-5);

  CHECK_THROWS_AS(solve_neumann_box(V, 0.0, 1.0, {5.0, 4.0}, 0.125, o), DomainError);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(minimize(TrapPotential::harmonic(), 0.0, 1.0, radial(0.3, 8.0)), DomainError);
  CHECK_THROWS_AS(minimize(TrapPotential::harmonic(), 0.0, 1.0, radial(0.03, 8.0)), DomainError);
  CHECK_THROWS_AS(minimize(TrapPotential::harmonic(), 0.0, 0.0, radial()), DomainError);
}
