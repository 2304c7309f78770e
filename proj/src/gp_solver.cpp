#include "gpb/gp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "discretization.hpp"
#include "gpb/error.hpp"
#include "minimizer.hpp"

namespace gpb {

using detail::Vec;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_a(double a) {
  if (!(a >= 0.0)) throw DomainError("negative scattering length is unsupported (a < 0)");
}

// Length scale of the linear ground state: V(l) l^2 = 1.
double oscillator_length(const TrapPotential& V) {
  double lo = 1e-6, hi = 1.0;
  while (V.radial(hi) * hi * hi < 1.0 && hi < 1e6) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (V.radial(mid) * mid * mid < 1.0 ? lo : hi) = mid;
  }
  return hi;
}

// Radius of the Thomas-Fermi profile (8 pi a)^{-1} [mu - V]_+ holding N particles.
double tf_radius(const TrapPotential& V, double a, double N) {
  if (a <= 0.0) return 0.0;
  using G = boost::math::quadrature::gauss<double, 20>;
  auto edge = [&](double mu) {
    double lo = 0.0, hi = 1.0;
    while (V.radial(hi) < mu && hi < 1e8) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (V.radial(mid) < mu ? lo : hi) = mid;
    }
    return lo;
  };
  auto norm = [&](double mu) {
    const double r = edge(mu);
    return G::integrate([&](double x) { return std::max(0.0, mu - V.radial(x)) * x * x; }, 0.0, r) /
           (2.0 * a);
  };
  double lo = 0.0, hi = 1.0;
  while (norm(hi) < N && hi < 1e300) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (norm(mid) < N ? lo : hi) = mid;
  }
  return edge(hi);
}

Vec initial_guess(const detail::Discretization& disc, const TrapPotential& V, double a, double N,
                  double width_factor) {
  const Grid& g = disc.grid();
  double w;
  if (V.is_zero()) {
    w = g.R;
  } else {
    w = std::max(oscillator_length(V), 0.5 * tf_radius(V, a, N));
    w = std::min(w, 0.5 * g.R);
  }
  w *= width_factor;
  Vec phi(g.node_count());
  const std::size_t m = g.nodes_per_axis();
  if (g.kind == GridKind::radial) {
    for (std::size_t i = 0; i < m; ++i) {
      const double r = g.coordinate(i);
      phi[i] = std::exp(-0.5 * r * r / (w * w));
    }
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) {
          const double x = g.coordinate(i), y = g.coordinate(j), z = g.coordinate(k);
          phi[(i * m + j) * m + k] = std::exp(-0.5 * (x * x + y * y + z * z) / (w * w));
        }
  }
  return disc.from_nodal(phi);
}

double boundary_potential(const TrapPotential& V, const Grid& g) {
  // Smallest V on the outer boundary: the sphere r = R or the cube faces.
  return V.radial(g.R);
}

GpSolution assemble(const detail::Discretization& disc, const TrapPotential& V, double a, double N,
                    Vec x, int iterations, bool converged, double tolerance) {
  GpSolution sol;
  sol.trap = V;
  sol.a = a;
  sol.tolerance = tolerance;
  for (double& v : x) {
    if (!(v > 0.0)) {
      v = 1e-300;
      sol.positivity_floor_hit = true;
    }
  }
  detail::GpInteraction nl(disc, a);
  sol.parts.kinetic = disc.kinetic(x);
  sol.parts.trap = disc.trap(x);
  const double q4 = disc.quartic(x);
  sol.parts.interaction = 4.0 * kPi * a * q4;
  sol.energy = sol.parts.total();
  sol.rho_bar = q4 / N;
  sol.mu = sol.energy / N + 4.0 * kPi * a * sol.rho_bar;
  const double s = disc.sup(x);
  sol.rho_max = s * s;
  double mu_el = 0.0;
  detail::euler_lagrange(disc, nl, x, N, mu_el, sol.residual_gp);
  if (auto order = V.homogeneous_order())
    sol.virial_residual =
        2.0 / 3.0 * sol.parts.kinetic - *order / 3.0 * sol.parts.trap + sol.parts.interaction;
  else
    sol.virial_residual = kNaN;
  sol.iterations = iterations;
  sol.converged = converged;
  const Grid& g = disc.grid();
  sol.boundary_ok = g.boundary == Boundary::neumann || boundary_potential(V, g) >= sol.mu + 20.0;
  sol.phi.grid = g;
  sol.phi.N = N;
  sol.phi.values = disc.nodal(x);
  return sol;
}

GpSolution solve_once(const TrapPotential& V, double a, double N, const Grid& grid,
                      const SolverOptions& opts, double width_factor) {
  auto disc = detail::make_discretization(grid, V);
  detail::GpInteraction nl(*disc, a);
  detail::MinimizerOptions mo;
  mo.N = N;
  mo.tolerance = opts.tolerance;
  mo.max_iter = opts.max_iter;
  auto res = detail::minimize_on_sphere(*disc, nl, initial_guess(*disc, V, a, N, width_factor), mo);
  if (!res.converged)
    throw ConvergenceError("GP minimization did not converge on " + grid.describe() +
                               ": residual " + std::to_string(res.residual),
                           res.residual, res.iterations);
  return assemble(*disc, V, a, N, std::move(res.x), res.iterations, true, opts.tolerance);
}

}  // namespace

const char* to_string(Check c) {
  switch (c) {
    case Check::pass:
      return "pass";
    case Check::fail:
      return "fail";
    case Check::not_applicable:
      return "not_applicable";
  }
  return "?";
}

bool StructuralChecklist::all_ok() const {
  return positivity != Check::fail && monotonicity != Check::fail &&
         log_concavity != Check::fail && exponential_tail != Check::fail;
}

double field_norm(const WaveField& phi, const TrapPotential& V) {
  auto disc = detail::make_discretization(phi.grid, V);
  return disc->norm2(disc->from_nodal(phi.values));
}

void normalize(WaveField& phi, const TrapPotential& V) {
  auto disc = detail::make_discretization(phi.grid, V);
  Vec x = disc->from_nodal(phi.values);
  const double n = disc->norm2(x);
  if (!(n > 0.0)) throw DomainError("cannot normalize a zero wave field");
  const double s = std::sqrt(phi.N / n);
  for (double& v : x) v *= s;
  phi.values = disc->nodal(x);
}

EnergyParts evaluate_energy(const WaveField& phi, const TrapPotential& V, double a,
                            double norm_tolerance) {
  check_a(a);
  auto disc = detail::make_discretization(phi.grid, V);
  const Vec x = disc->from_nodal(phi.values);
  const double n = disc->norm2(x);
  if (!(std::abs(n - phi.N) <= norm_tolerance * phi.N))
    throw DomainError("wave field is not normalized: integral of |Phi|^2 is " +
                      std::to_string(n) + ", expected " + std::to_string(phi.N));
  EnergyParts p;
  p.kinetic = disc->kinetic(x);
  p.trap = disc->trap(x);
  p.interaction = 4.0 * kPi * a * disc->quartic(x);
  return p;
}

DiscreteGradient energy_gradient(const WaveField& phi, const TrapPotential& V, double a) {
  check_a(a);
  auto disc = detail::make_discretization(phi.grid, V);
  DiscreteGradient out;
  out.unknowns = disc->from_nodal(phi.values);
  const Vec& x = out.unknowns;
  Vec kx, px, gn;
  disc->apply_kinetic(x, kx);
  disc->apply_trap(x, px);
  detail::GpInteraction nl(*disc, a);
  nl.gradient(x, gn);
  out.gradient.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.gradient[i] = 2.0 * (kx[i] + px[i]) + gn[i];
  return out;
}

double energy_of_unknowns(const Grid& grid, const std::vector<double>& x, const TrapPotential& V,
                          double a) {
  auto disc = detail::make_discretization(grid, V);
  if (x.size() != disc->size()) throw DomainError("unknown vector has the wrong size");
  return disc->kinetic(x) + disc->trap(x) + 4.0 * kPi * a * disc->quartic(x);
}

GpSolution minimize(const TrapPotential& V, double a, double N, const Grid& grid,
                    const SolverOptions& opts) {
  check_a(a);
  if (!(N > 0.0)) throw DomainError("particle number must be positive");
  if (!(opts.tolerance > 0.0)) throw DomainError("solver tolerance must be positive");
  grid.validate();
  GpSolution sol = solve_once(V, a, N, grid, opts, 1.0);

  if (opts.verify_uniqueness) {
    const GpSolution other = solve_once(V, a, N, grid, opts, 1.7);
    const double tol = std::max(1e-11, 100.0 * opts.tolerance * opts.tolerance);
    if (std::abs(other.energy - sol.energy) > tol * std::abs(sol.energy))
      throw ConvergenceError("two starting points reached different energies", sol.residual_gp,
                             sol.iterations);
  }

  sol.richardson_error = kNaN;
  sol.energy_extrapolated = kNaN;
  const Grid coarse = grid.coarsened();
  const double ratio = coarse.R / coarse.h;
  if (opts.richardson && std::abs(ratio - std::round(ratio)) < 1e-9 * ratio && ratio >= 32) {
    SolverOptions copts = opts;
    copts.richardson = false;
    copts.verify_uniqueness = false;
    const GpSolution c = solve_once(V, a, N, coarse, copts, 1.0);
    if (grid.kind == GridKind::radial) {
      // Second order: E_h - E ~ h^2.
      sol.richardson_error = std::abs(sol.energy - c.energy) / 3.0;
      sol.energy_extrapolated = (4.0 * sol.energy - c.energy) / 3.0;
    } else {
      // Spectral: no power law to extrapolate, the coarse difference bounds the error.
      sol.richardson_error = std::abs(sol.energy - c.energy);
      sol.energy_extrapolated = sol.energy;
    }
  }
  return sol;
}

ChemicalPotential chemical_potential(const GpSolution& sol, double dN, const SolverOptions& opts) {
  const double N = sol.phi.N;
  if (!(dN > 0.0) || dN > 0.01 * N) throw DomainError("need 0 < dN <= 0.01 N");
  SolverOptions o = opts;
  o.richardson = false;
  const GpSolution up = minimize(sol.trap, sol.a, N + dN, sol.phi.grid, o);
  const GpSolution down = minimize(sol.trap, sol.a, N - dN, sol.phi.grid, o);
  ChemicalPotential cp;
  cp.formula = sol.energy / N + 4.0 * kPi * sol.a * sol.rho_bar;
  cp.finite_diff = (up.energy - down.energy) / (2.0 * dN);
  return cp;
}

double virial_residual(const GpSolution& sol, double s) {
  if (!sol.trap.homogeneous_order())
    throw DomainError("virial theorem needs a homogeneous trap");
  return 2.0 / 3.0 * sol.parts.kinetic - s / 3.0 * sol.parts.trap + sol.parts.interaction;
}

ScalingReport check_scaling(const TrapPotential& V, double a, double N, const Grid& grid,
                            const SolverOptions& opts) {
  SolverOptions o = opts;
  o.richardson = false;
  const GpSolution sN = minimize(V, a, N, grid, o);
  const GpSolution s1 = minimize(V, N * a, 1.0, grid, o);
  ScalingReport rep;
  rep.energy_N = sN.energy;
  rep.energy_1 = s1.energy;
  rep.energy_relative = std::abs(sN.energy - N * s1.energy) / std::abs(sN.energy);
  double rmax = 0.0;
  for (std::size_t i = 0; i < sN.phi.values.size(); ++i) {
    const double rn = sN.phi.values[i] * sN.phi.values[i];
    const double r1 = s1.phi.values[i] * s1.phi.values[i];
    rep.density_max = std::max(rep.density_max, std::abs(rn - N * r1));
    rmax = std::max(rmax, rn);
  }
  rep.density_relative = rep.density_max / rmax;
  return rep;
}

std::vector<double> density(const GpSolution& sol) {
  std::vector<double> rho(sol.phi.values.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = sol.phi.values[i] * sol.phi.values[i];
  return rho;
}

namespace {

// Profiles of Phi along lines through the origin, from -R to R.
std::vector<std::vector<double>> lines_through_origin(const WaveField& f) {
  const Grid& g = f.grid;
  std::vector<std::vector<double>> lines;
  if (g.kind == GridKind::radial) {
    const std::size_t m = g.nodes_per_axis();
    std::vector<double> line(2 * m - 1);
    for (std::size_t i = 0; i < m; ++i) {
      line[m - 1 + i] = f.values[i];
      line[m - 1 - i] = f.values[i];
    }
    lines.push_back(std::move(line));
    return lines;
  }
  const std::size_t m = g.nodes_per_axis();
  const std::size_t c = m / 2;
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) { return f.values[(i * m + j) * m + k]; };
  std::vector<double> lx(m), ly(m), lz(m), ld(m);
  for (std::size_t i = 0; i < m; ++i) {
    lx[i] = at(i, c, c);
    ly[i] = at(c, i, c);
    lz[i] = at(c, c, i);
    ld[i] = at(i, i, i);
  }
  lines = {lx, ly, lz, ld};
  return lines;
}

}  // namespace

StructuralChecklist structural_assertions(const GpSolution& sol) {
  StructuralChecklist out;
  const WaveField& f = sol.phi;
  const Grid& g = f.grid;
  const bool decay = g.boundary == Boundary::decay;
  const std::size_t m = g.nodes_per_axis();

  // Positivity on nodes not pinned by a Dirichlet condition.
  bool positive = true;
  if (g.kind == GridKind::radial) {
    for (std::size_t i = 0; i + 1 < m; ++i) positive = positive && f.values[i] > 0.0;
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) {
          const bool face = i == 0 || j == 0 || k == 0 || i + 1 == m || j + 1 == m || k + 1 == m;
          if (decay && face) continue;
          positive = positive && f.values[(i * m + j) * m + k] > 0.0;
        }
  }
  out.positivity = positive ? Check::pass : Check::fail;

  const bool flat = sol.trap.is_zero();
  double phimax = 0.0;
  for (double v : f.values) phimax = std::max(phimax, std::abs(v));
  const double slack = 1e-12 * phimax;
  const auto lines = lines_through_origin(f);

  if (sol.trap.symmetric() && !flat) {
    bool mono = true;
    for (const auto& line : lines) {
      const std::size_t c = line.size() / 2;
      for (std::size_t i = c; i + 1 < line.size(); ++i) mono = mono && line[i + 1] <= line[i] + slack;
      for (std::size_t i = c; i > 0; --i) mono = mono && line[i - 1] <= line[i] + slack;
    }
    out.monotonicity = mono ? Check::pass : Check::fail;
  }

  if (sol.trap.convex() && !flat) {
    // Midpoint log-concavity Phi(y)^2 >= Phi(y-s) Phi(y+s) for spans s = k h,
    // on values above 1e-8 of the maximum (below that roundoff dominates).
    bool concave = true;
    const double floor = 1e-8 * phimax;
    for (const auto& line : lines) {
      const std::size_t n = line.size();
      for (std::size_t k : {1u, 2u, 4u, 8u}) {
        for (std::size_t i = k; i + k < n; ++i) {
          const double l = line[i - k], c = line[i], r = line[i + k];
          if (l < floor || c < floor || r < floor) continue;
          if (2.0 * std::log(c) < std::log(l) + std::log(r) - 1e-10) concave = false;
        }
      }
    }
    out.log_concavity = concave ? Check::pass : Check::fail;
  }

  if (!flat) {
    // Phi(r) e^{t r} on the outer quarter must stay below its value at the
    // quarter's inner edge (t = 1).
    constexpr double t = 1.0;
    bool tail = true;
    for (const auto& line : lines) {
      const std::size_t c = line.size() / 2;
      const std::size_t len = line.size() - 1 - c;
      const std::size_t q = c + (3 * len) / 4;
      // The last cartesian line is the body diagonal.
      const bool diagonal = g.kind == GridKind::cartesian && &line == &lines.back();
      const double step = diagonal ? std::sqrt(3.0) * g.h : g.h;
      const double r_q = static_cast<double>(q - c) * step;
      const double M = line[q] * std::exp(t * r_q);
      for (std::size_t i = q; i < line.size(); ++i) {
        const double r = static_cast<double>(i - c) * step;
        if (line[i] > M * std::exp(-t * r) * (1.0 + 1e-9) + slack) tail = false;
      }
    }
    out.exponential_tail = tail ? Check::pass : Check::fail;
  }
  return out;
}

std::vector<BoxEnergy> solve_neumann_box(const TrapPotential& V, double a, double N,
                                         const std::vector<double>& R_sequence, double h,
                                         const SolverOptions& opts) {
  for (std::size_t i = 1; i < R_sequence.size(); ++i)
    if (!(R_sequence[i] > R_sequence[i - 1])) throw DomainError("R sequence must increase");
  std::vector<BoxEnergy> out;
  for (double R : R_sequence) {
    Grid g{GridKind::cartesian, h, R, Boundary::neumann};
    GpSolution s = minimize(V, a, N, g, opts);
    out.push_back({R, s.energy, std::move(s)});
  }
  return out;
}

}  // namespace gpb
