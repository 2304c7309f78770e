// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gpb/bounds.hpp"
#include "gpb/error.hpp"
#include "gpb/gp_solver.hpp"
#include "gpb/scattering.hpp"
#include "gpb/tf_limit.hpp"

using namespace gpb;

namespace {

constexpr double pi = std::numbers::pi;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Grid radial(double h = 0.02, double R = 8.0) { return {GridKind::radial, h, R, Boundary::decay}; }

WaveField gaussian(const Grid& g, double width) {
  WaveField f{g, {}, 1.0};
  const std::size_t m = g.nodes_per_axis();
  auto value = [&](double r2) { return std::exp(-r2 / (2.0 * width * width)); };
  if (g.kind == GridKind::radial) {
    for (std::size_t i = 0; i < m; ++i) f.values.push_back(value(std::pow(g.coordinate(i), 2)));
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
          f.values.push_back(value(std::pow(g.coordinate(i), 2) + std::pow(g.coordinate(j), 2) +
                                   std::pow(g.coordinate(k), 2)));
  }
  return f;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Outcome linear_limit() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto s = minimize(TrapPotential::harmonic(), 0.0, 1.0, radial());
  const double t = seconds_since(t0);
  o.require(std::abs(s.energy - 3.0) <= 1e-3, "E = 3 within 1e-3");
  o.require(t < 1.0, "runtime < 1 s");
  o.note("E = " + fmt("%.9f", s.energy) + ", " + fmt("%.3f", t) + " s");
  return o;
}

Outcome homogeneous_box() {
  Outcome o;
  SolverOptions opts;
  opts.richardson = false;
  const auto V = TrapPotential::zero_in_box();
  double worst_e = 0.0, worst_phi = 0.0;
  for (auto [N, a, R] : {std::tuple{10.0, 0.05, 1.0}, std::tuple{10.0, 0.05, 2.0},
                         std::tuple{1e3, 1e-3, 1.5}}) {
    const Grid g{GridKind::cartesian, R / 32.0, R, Boundary::neumann};
    const auto s = minimize(V, a, N, g, opts);
    const double vol = std::pow(2.0 * R, 3), e0 = 4.0 * pi * a * N * N / vol;
    worst_e = std::max(worst_e, std::abs(s.energy - e0) / e0);
    const double c = std::sqrt(N / vol);
    for (double v : s.phi.values) worst_phi = std::max(worst_phi, std::abs(v - c) / c);
  }
  o.require(worst_e <= 1e-10, "E = 4 pi a N^2 / V to 1e-10");
  o.require(worst_phi <= 1e-8, "constant Phi");
  o.note("max rel. energy error " + fmt("%.2e", worst_e) + ", max rel. Phi deviation " +
         fmt("%.2e", worst_phi));
  return o;
}

Outcome scattering_golden() {
  Outcome o;
  for (double d : {1.0, 2.0}) {
    const double a = compute_scattering(InteractionPotential::hard_sphere(d)).a;
    o.require(std::abs(a - d) <= 1e-10, "hard sphere d = " + fmt("%g", d));
  }
  const double sb = compute_scattering(InteractionPotential::square_barrier(2.0, 1.0)).a;
  o.require(std::abs(sb - (1.0 - std::tanh(1.0))) <= 1e-8, "square barrier");
  o.note("square barrier error " + fmt("%.1e", std::abs(sb - (1.0 - std::tanh(1.0)))));

  const std::vector<InteractionPotential> corpus{
      InteractionPotential::none(),
      InteractionPotential::hard_sphere(1.0),
      InteractionPotential::square_barrier(2.0, 1.0),
      InteractionPotential::square_barrier(0.1, 3.0),
      InteractionPotential::square_barrier(50.0, 0.5),
      InteractionPotential::power_tail(6.0, 5.0, 1.0),
      InteractionPotential::power_tail(1.0, 4.0, 1.0),
      InteractionPotential::power_tail(4.0, 5.0, 1.0, 0.5),
      InteractionPotential::power_tail(2.0, 8.0, 0.7),
  };
  for (const auto& v : corpus) {
    ScatteringOptions so;
    so.tolerance = 1e-6;
    const double a = compute_scattering(v, so).a;
    o.require(a >= -1e-12 && a <= spruch_rosenberg(v) + 1e-12, "Spruch-Rosenberg " + v.describe());
  }

  const InteractionPotential tails[] = {InteractionPotential::power_tail(6.0, 5.0, 1.0),
                                        InteractionPotential::power_tail(1.0, 4.0, 1.0),
                                        InteractionPotential::power_tail(4.0, 5.0, 1.0, 0.5)};
  for (const auto& v : tails) {
    const auto coarse = scattering_length(integrate_zero_energy(v, 40.0, 20000), v, 1.0);
    ScatteringOptions so;
    so.tolerance = 1e-7;
    const double refined = compute_scattering(v, so).a;
    o.require(coarse.a_lower <= refined && refined <= coarse.a_upper,
              "truncation bracket contains the refined a for " + v.describe());
  }
  return o;
}

Outcome scaling_laws() {
  Outcome o;
  SolverOptions opts;
  double worst_e = 0.0, worst_rho = 0.0;
  for (auto [N, a] : {std::pair{1e2, 1e-2}, std::pair{1e4, 1e-4}}) {
    const auto r = check_scaling(TrapPotential::harmonic(), a, N, radial(), opts);
    worst_e = std::max(worst_e, r.energy_relative);
    worst_rho = std::max(worst_rho, r.density_relative);
  }
  o.require(worst_e <= 2.0 * opts.tolerance, "energy scaling within 2 x tolerance");
  o.require(worst_rho <= 2.0 * opts.tolerance, "density scaling in max norm");
  o.note("energy " + fmt("%.1e", worst_e) + ", density " + fmt("%.1e", worst_rho));
  return o;
}

Outcome virial() {
  Outcome o;
  double worst = 0.0;
  for (double Na : {0.1, 1.0, 10.0}) {
    const auto s = minimize(TrapPotential::harmonic(), Na, 1.0, radial());
    worst = std::max(worst, std::abs(virial_residual(s, 2.0)) / s.energy);
  }
  o.require(worst <= 1e-3, "|virial| <= 1e-3 E");
  o.note("max |virial|/E = " + fmt("%.1e", worst));
  return o;
}

Outcome chemical_potential_identity() {
  Outcome o;
  SolverOptions opts;
  opts.richardson = false;
  double worst = 0.0;
  for (double a : {0.1, 1.0, 10.0}) {
    const auto s = minimize(TrapPotential::harmonic(), a, 1.0, radial(), opts);
    const auto m = chemical_potential(s, 0.01, opts);
    worst = std::max(worst, std::abs(m.formula - m.finite_diff) / m.formula);
  }
  o.require(worst <= 1e-3, "relative agreement 1e-3");
  o.note("max rel. difference " + fmt("%.1e", worst));
  return o;
}

Outcome tf_limit() {
  Outcome o;
  const auto V = TrapPotential::harmonic();
  const double mu = std::pow(15.0, 0.4), F = mu - 2.0 * std::pow(15.0, 1.4) / 105.0;
  const auto tf = tf_minimize(V, 1.0, 1.0);
  o.require(std::abs(tf.mu - mu) <= 1e-6, "mu~ = 15^{2/5}");
  o.require(std::abs(tf.F - F) <= 1e-6, "F(1,1) closed form");
  const auto rows = gp_tf_convergence(V, {1.0, 10.0, 100.0, 1000.0});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    o.require(rows[i].F <= rows[i].E_gp, "F(1,Na) <= E_GP(1,Na) at Na = " + fmt("%g", rows[i].Na));
    if (i > 0) o.require(rows[i].ratio < rows[i - 1].ratio, "ratio decreasing");
  }
  const double last = std::abs(rows.back().ratio - F) / F;
  o.require(last <= 0.05, "within 5% at Na = 1000");
  o.note("F(1,1) = " + fmt("%.6f", tf.F) + ", ratio at Na = 1000 off by " + fmt("%.2f", 100 * last) +
         "%");
  return o;
}

Outcome box_convergence() {
  Outcome o;
  const auto V = TrapPotential::harmonic();
  const auto ref = minimize(V, 1.0, 1.0, radial(0.01));
  SolverOptions opts;
  opts.richardson = false;
  std::vector<BoxEnergy> box;
  for (double R : {4.0, 6.0, 8.0})
    box.push_back(solve_neumann_box(V, 1.0, 1.0, {R}, R / 32.0, opts).front());
  for (std::size_t i = 1; i < box.size(); ++i)
    o.require(box[i].energy >= box[i - 1].energy - 1e-9, "E_R nondecreasing in R");
  const double diff = std::abs(box.back().energy - ref.energy_extrapolated);
  o.require(diff <= 1e-5, "|E_8 - E_GP| <= 1e-5");
  o.note("E_GP = " + fmt("%.10f", ref.energy_extrapolated) + ", E_8 = " +
         fmt("%.10f", box.back().energy));
  return o;
}

Outcome sandwich() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::vector<double> Ns{1e3, 1e4, 1e5};
  const auto reps =
      sandwich_sweep(TrapPotential::harmonic(), InteractionPotential::hard_sphere(1.0), 1.0, Ns);
  const double t = seconds_since(t0);
  for (const auto& r : reps) {
    const std::string at = " at N = " + fmt("%g", r.N);
    o.require(r.lower_assembled.value <= r.gp_reference && std::isfinite(r.lower_assembled.value),
              "finite lower bound <= E_GP" + at);
    o.require(r.gp_reference <= r.upper.value, "E_GP <= upper" + at);
    o.note("N = " + fmt("%g", r.N) + ": lower " + fmt("%.6g", r.lower_assembled.value) + ", GP " +
           fmt("%.6g", r.gp_reference) + ", upper " + fmt("%.6g", r.upper.value));
  }
  for (std::size_t i = 1; i < reps.size(); ++i) {
    const double ratio = reps[i - 1].upper_gap / reps[i].upper_gap;
    o.require(ratio >= 5.0, "upper gap shrinks >= 5x per decade (" + fmt("%.3f", ratio) + ")");
    o.require(reps[i].lower_gap < reps[i - 1].lower_gap, "lower gap shrinks");
  }
  o.require(t < 300.0, "sweep < 5 min");
  o.note(fmt("%.1f", t) + " s");
  return o;
}

Outcome structural() {
  Outcome o;
  struct Case {
    const char* name;
    TrapPotential V;
    double a;
  };
  const Case cases[] = {{"r^2, a = 0", TrapPotential::harmonic(), 0.0},
                        {"r^2, a = 1", TrapPotential::harmonic(), 1.0},
                        {"r^2, a = 10", TrapPotential::harmonic(), 10.0},
                        {"r^4, a = 1", TrapPotential::power(4.0), 1.0},
                        {"r^3, a = 0.5", TrapPotential::power(3.0), 0.5}};
  for (const auto& c : cases) {
    const auto chk = structural_assertions(minimize(c.V, c.a, 1.0, radial()));
    o.require(chk.positivity == Check::pass && chk.monotonicity == Check::pass &&
                  chk.log_concavity == Check::pass && chk.exponential_tail == Check::pass,
              c.name);
  }
  o.note("5 trap cases");
  return o;
}

Outcome gradient_check() {
  Outcome o;
  std::mt19937 rng(20261016);
  std::normal_distribution<double> gauss;
  const auto V = TrapPotential::harmonic();
  const Grid grids[] = {radial(0.05, 8.0),
                        {GridKind::cartesian, 0.2, 6.4, Boundary::decay},
                        {GridKind::cartesian, 0.1, 3.2, Boundary::neumann}};
  double worst = 0.0;
  for (const Grid& g : grids) {
    WaveField f = gaussian(g, 1.1);
    for (double& v : f.values) v *= 1.0 + 0.01 * gauss(rng);
    normalize(f, V);
    const auto grad = energy_gradient(f, V, 0.7);
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
          (energy_of_unknowns(g, xp, V, 0.7) - energy_of_unknowns(g, xm, V, 0.7)) / (2.0 * eps);
      worst = std::max(worst, std::abs(fd - gd) / std::abs(gd));
    }
  }
  o.require(worst <= 1e-6, "1e-6 relative on 20 directions per grid");
  o.note("3 grids, max rel. error " + fmt("%.1e", worst));
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"linear limit", linear_limit},
      {"homogeneous exactness", homogeneous_box},
      {"scattering golden values", scattering_golden},
      {"scaling laws", scaling_laws},
      {"virial", virial},
      {"chemical potential identity", chemical_potential_identity},
      {"Thomas-Fermi limit", tf_limit},
      {"box convergence", box_convergence},
      {"sandwich ordering", sandwich},
      {"structural assertions", structural},
      {"gradient check", gradient_check},
  };
  int failed = 0, n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    if (!out.pass) ++failed;
    std::printf("%s %2d %s: %s\n", out.pass ? "PASS" : "FAIL", n, name, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
