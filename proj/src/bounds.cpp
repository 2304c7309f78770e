#include "gpb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "discretization.hpp"
#include "gpb/error.hpp"
#include "minimizer.hpp"

namespace gpb {

using detail::Vec;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Composite Simpson and trapezoid sums over one uniform segment of samples.
struct SegmentSum {
  double simpson = 0.0;
  double trapezoid = 0.0;
};

SegmentSum segment_sum(const std::vector<double>& y, double h) {
  SegmentSum s;
  const std::size_t n = y.size() - 1;
  for (std::size_t i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s.simpson += w * y[i];
    s.trapezoid += (i == 0 || i == n) ? 0.5 * y[i] : y[i];
  }
  s.simpson *= h / 3.0;
  s.trapezoid *= h;
  return s;
}

double outer_radius(const InteractionPotential& v, const ScatteringOptions& opts) {
  if (opts.r_max > 0.0) return opts.r_max;
  return std::max(2.0 * suggest_outer_radius(v, opts.tolerance),
                  v.core_radius() + v.length_scale());
}

// v sampled from inside the segment [lo, hi], so that jumps at the ends are
// taken from the correct side.
double v_inside(const InteractionPotential& v, double r, double lo, double hi) {
  return v(std::clamp(r, std::nextafter(lo, hi), std::nextafter(hi, lo)));
}

}  // namespace

double DysonF::operator()(double r) const {
  if (r <= core) return 0.0;
  if (r >= b) return 1.0;
  auto it = std::lower_bound(f_samples.begin(), f_samples.end(), r,
                             [](const RadialSample& s, double x) { return s.r < x; });
  if (it == f_samples.begin()) return it->value;
  if (it == f_samples.end()) return f_samples.back().value;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (r - lo.r) / (hi.r - lo.r);
  return lo.value + t * (hi.value - lo.value);
}

DysonF build_dyson_f(const InteractionPotential& v, double b, const ScatteringOptions& opts) {
  if (!(b > v.core_radius()))
    throw DomainError("correlation radius b must exceed the core radius");
  const double r_max = std::max(outer_radius(v, opts), 2.0 * b);
  const double cut[] = {b};
  const ZeroEnergySolution sol = integrate_zero_energy(v, r_max, opts.steps, cut);
  const ScatteringResult sc = scattering_length(sol, v, opts.tolerance);
  if (!(b > sc.a))
    throw DomainError("correlation radius b = " + std::to_string(b) +
                      " must exceed the scattering length a = " + std::to_string(sc.a) +
                      " (requires (4 pi/3) a^3 ||rho||_inf < 1)");

  DysonF fd;
  fd.v = v;
  fd.a = sc.a;
  fd.a_error = sc.a_error;
  fd.b = b;
  fd.core = sol.start;
  std::size_t ib = 0;
  while (ib < sol.r.size() && sol.r[ib] != b) ++ib;
  if (ib == sol.r.size()) throw std::logic_error("b is not a node of the scattering grid");
  fd.eps = b / sol.u[ib] - 1.0;

  const double scale = 1.0 + fd.eps;
  for (std::size_t i = 0; i <= ib; ++i) {
    const double r = sol.r[i];
    double f, df;
    if (r == 0.0) {
      f = scale * sol.du[i];
      df = 0.0;
    } else {
      f = scale * sol.u[i] / r;
      df = scale * (sol.du[i] * r - sol.u[i]) / (r * r);
    }
    fd.f_samples.push_back({r, f});
    fd.df_samples.push_back({r, df});
  }
  fd.f_samples.back().value = 1.0;
  for (std::size_t s : sol.segment_start)
    if (s <= ib) fd.segment_start.push_back(s);
  return fd;
}

DysonIngredients dyson_ingredients(const DysonF& fd, const GpSolution& sol) {
  DysonIngredients in;
  in.a = fd.a;
  in.b = fd.b;
  in.eps = fd.eps;

  double I = 4.0 * kPi * std::pow(fd.core, 3) / 3.0, J = 0.0, K = 0.0;
  double eI = 0.0, eJ = 0.0, eK = 0.0;
  for (std::size_t k = 0; k + 1 < fd.segment_start.size(); ++k) {
    const std::size_t i0 = fd.segment_start[k], i1 = fd.segment_start[k + 1];
    const double lo = fd.f_samples[i0].r, hi = fd.f_samples[i1].r;
    const double h = (hi - lo) / static_cast<double>(i1 - i0);
    std::vector<double> yI, yJ, yK;
    for (std::size_t i = i0; i <= i1; ++i) {
      const double r = fd.f_samples[i].r, f = fd.f_samples[i].value, df = fd.df_samples[i].value;
      const double r2 = r * r;
      yI.push_back((1.0 - f * f) * r2);
      yJ.push_back((2.0 * df * df + v_inside(fd.v, r, lo, hi) * f * f) * r2);
      yK.push_back(f * df * r2);
    }
    const SegmentSum sI = segment_sum(yI, h), sJ = segment_sum(yJ, h), sK = segment_sum(yK, h);
    I += 4.0 * kPi * sI.simpson;
    J += 2.0 * kPi * sJ.simpson;
    K += 4.0 * kPi * sK.simpson;
    eI += 4.0 * kPi * std::abs(sI.simpson - sI.trapezoid);
    eJ += 2.0 * kPi * std::abs(sJ.simpson - sJ.trapezoid);
    eK += 4.0 * kPi * std::abs(sK.simpson - sK.trapezoid);
  }
  const QuadratureTolerance tail_tol{1e-14, 1e-12};
  J += 4.0 * kPi * tail_integral(fd.v, fd.b, tail_tol);
  in.I = I;
  in.J = J;
  in.K = K;
  in.quadrature_error = std::max({eI, eJ, eK}) + 4.0 * kPi * 1e-12 * std::abs(J);

  const double a = fd.a, b = fd.b;
  in.J_bound = std::pow(1.0 + fd.eps, 2) * 4.0 * kPi * a;
  in.I_bound = 4.0 * kPi * (a * a * a / 3.0 + a * b * (b - a));
  in.K_bound = 4.0 * kPi * (1.0 + fd.eps) * a * (b - 0.5 * a);
  in.eps_bound = a / (b - a);
  in.e_tilde = (sol.parts.kinetic + sol.parts.trap) / sol.phi.N;
  return in;
}

double dyson_b(const GpSolution& sol) {
  const double c = sol.rho_bar / sol.rho_max;
  return std::cbrt(3.0 * c / (4.0 * kPi * sol.rho_bar));
}

DysonUpperBound dyson_upper_bound(const GpSolution& sol) {
  DysonUpperBound out;
  const double a = sol.a;
  out.density_condition = 4.0 * kPi / 3.0 * a * a * a * sol.rho_max;
  if (!(out.density_condition < 1.0))
    throw DomainError("upper bound requires (4 pi/3) a^3 ||rho||_inf < 1, got " +
                      std::to_string(out.density_condition));
  out.c = sol.rho_bar / sol.rho_max;
  out.b = dyson_b(sol);
  const double x = a / out.b, c = out.c;
  out.a_over_b = x;
  out.kinetic_factor = 1.0 / std::pow(1.0 - x, 3);
  out.interaction_factor =
      (1.0 + 2.0 / c * x - 2.0 / c * x * x + 0.5 / c * x * x * x) / std::pow(1.0 - x, 8);
  out.value = (sol.parts.kinetic + sol.parts.trap) * out.kinetic_factor +
              sol.parts.interaction * out.interaction_factor;
  return out;
}

double dyson_energy_per_particle(const DysonIngredients& in, const GpSolution& sol) {
  const double N = sol.phi.N;
  const double g2 = N / sol.rho_max;
  const double g4 = N * sol.rho_bar / (sol.rho_max * sol.rho_max);
  const double D = g2 - N * in.I;
  if (!(D > 0.0)) return kInf;
  return in.e_tilde * g2 / D + N * g4 * in.J / (D * D) +
         2.0 / 3.0 * N * N * in.K * in.K / (D * D);
}

bool check_soft_core_condition(const InteractionPotential& v, const DysonF& fd) {
  if (v.nonnegative()) return true;
  for (std::size_t k = 0; k + 1 < fd.segment_start.size(); ++k) {
    const std::size_t i0 = fd.segment_start[k], i1 = fd.segment_start[k + 1];
    const double lo = fd.f_samples[i0].r, hi = fd.f_samples[i1].r;
    for (std::size_t i = i0; i <= i1; ++i) {
      const double f = fd.f_samples[i].value, df = fd.df_samples[i].value;
      if (df * df + 0.5 * v_inside(v, fd.f_samples[i].r, lo, hi) * f * f < 0.0) return false;
    }
  }
  // Past b, f = 1 and f' = 0, so v itself must be nonnegative there.
  const double end = v.support_end();
  if (end > fd.b) {
    const double stop = std::isfinite(end) ? end : 1e3 * fd.b;
    std::vector<double> pts;
    for (double p : v.breakpoints())
      if (p > fd.b && p <= stop) pts.push_back(p);
    constexpr int samples = 4096;
    for (int i = 0; i <= samples; ++i) pts.push_back(fd.b + (stop - fd.b) * i / samples);
    for (double r : pts) {
      for (double x : {std::nextafter(r, 0.0), r, std::nextafter(r, kInf)})
        if (x > fd.b && v(x) < 0.0) return false;
    }
  }
  return true;
}

bool check_soft_core_condition(const InteractionPotential& v, double b,
                               const ScatteringOptions& opts) {
  if (v.nonnegative()) return true;
  try {
    ScatteringOptions fine = opts;
    fine.steps = 2 * opts.steps;
    return check_soft_core_condition(v, build_dyson_f(v, b, opts)) &&
           check_soft_core_condition(v, build_dyson_f(v, b, fine));
  } catch (const ScatteringRegimeError&) {
    return false;
  }
}

EstarResult estar_minimize(const TrapPotential& V, double a, double N, const Grid& grid,
                           const SolverOptions& opts, const EstarOptions& eopts) {
  if (!(eopts.p_start >= 4.0) || !(eopts.p_max >= eopts.p_start))
    throw DomainError("E* moment order must satisfy 4 <= p_start <= p_max");
  SolverOptions gp_opts = opts;
  gp_opts.richardson = false;
  gp_opts.verify_uniqueness = false;
  const GpSolution gp = minimize(V, a, N, grid, gp_opts);

  auto disc = detail::make_discretization(grid, V);
  Vec x = disc->from_nodal(gp.phi.values);
  detail::MinimizerOptions mo;
  mo.N = N;
  mo.tolerance = std::max(opts.tolerance, eopts.tolerance);
  mo.max_iter = opts.max_iter;

  EstarResult out;
  out.N = N;
  out.a = a;
  int iterations = 0;
  for (double p = eopts.p_start;; p *= 2.0) {
    detail::SmoothedSupInteraction nl(*disc, a, p);
    auto res = detail::minimize_on_sphere(*disc, nl, x, mo);
    iterations += res.iterations;
    if (!res.converged)
      throw ConvergenceError("E* minimization did not converge at p = " + std::to_string(static_cast<int>(p)) +
                                 ": residual " + format_g(res.residual),
                             res.residual, iterations);
    x = std::move(res.x);
    const double sup = disc->sup(x);
    out.p = p;
    out.sup_squared = sup * sup;
    out.lower = res.quadratic + res.nonlinear;
    out.value = res.quadratic + 8.0 * kPi * a * out.sup_squared * N;
    out.gap = out.value > 0.0 ? (out.value - out.lower) / out.value : 0.0;
    if (out.gap < eopts.gap_tolerance || 2.0 * p > eopts.p_max) break;
  }
  out.kinetic = disc->kinetic(x);
  out.trap = disc->trap(x);
  out.rho_bar = disc->quartic(x) / N;
  out.iterations = iterations;
  out.converged = out.gap < eopts.gap_tolerance;
  out.phi.grid = grid;
  out.phi.N = N;
  out.phi.values = disc->nodal(x);
  return out;
}

ChemicalPotentialBound chemical_potential_bound(const EstarResult& unit, double a) {
  ChemicalPotentialBound out;
  out.estar_unit = unit.value / unit.N;
  out.rho_max = unit.sup_squared / unit.N;
  out.a = a;
  if (a == 0.0) {
    out.factor = 1.0;
    out.value = out.estar_unit;
    out.valid = true;
    return out;
  }
  // With t = b/a: factor(t) = (t/(t-1))^2 / (1 - k (1/3 + t(t-1))), k = 4 pi rho a^3.
  const double k = 4.0 * kPi * out.rho_max * a * a * a;
  if (!(k / 3.0 < 1.0)) {
    out.factor = kInf;
    out.value = kInf;
    return out;
  }
  const double t_hi = 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * (1.0 / 3.0 - 1.0 / k)));
  auto factor = [k](double t) {
    const double den = 1.0 - k * (1.0 / 3.0 + t * (t - 1.0));
    if (!(den > 0.0) || !(t > 1.0)) return 1e300;
    const double q = t / (t - 1.0);
    return q * q / den;
  };
  auto g = [&](double s) { return factor(1.0 + std::exp(s)); };
  const auto best =
      boost::math::tools::brent_find_minima(g, std::log(1e-12), std::log(t_hi - 1.0), 40);
  out.b = a * (1.0 + std::exp(best.first));
  out.factor = best.second;
  out.value = out.estar_unit * out.factor;
  out.valid = out.factor < 1e300;
  return out;
}

HomogeneousLowerBound homogeneous_lower_bound(double N, double L, double a, double C,
                                              double exponent) {
  if (!(N > 0.0) || !(L > 0.0) || !(a >= 0.0))
    throw DomainError("homogeneous_lower_bound needs N > 0, L > 0, a >= 0");
  HomogeneousLowerBound out;
  out.C = C;
  out.exponent = exponent;
  out.Y = a * a * a * N / (L * L * L);
  if (a == 0.0) {
    out.valid = true;
    return out;
  }
  out.correction = C * std::pow(out.Y, exponent);
  out.value = 4.0 * kPi * a * N * N / (L * L * L) * (1.0 - out.correction);
  out.valid = out.Y < 1e-2 && L / a > 10.0 * std::pow(out.Y, -6.0 / 17.0) && out.correction < 1.0;
  return out;
}

AssembledLowerBound assemble_box_lower_bound(const GpSolution& sol, double L, double C,
                                             double exponent) {
  const Grid& g = sol.phi.grid;
  if (g.kind != GridKind::cartesian || g.boundary != Boundary::neumann)
    throw DomainError("assembled lower bound needs a Neumann-box cartesian solution");
  const double cells_d = 2.0 * g.R / L, nodes_d = L / g.h;
  const long cells = std::lround(cells_d), per = std::lround(nodes_d);
  if (!(L > 0.0) || cells < 1 || per < 1 || std::abs(cells_d - cells) > 1e-9 * cells_d ||
      std::abs(nodes_d - per) > 1e-9 * nodes_d)
    throw DomainError("cell side L must divide the box side 2R and be a multiple of h");

  const double N = sol.phi.N, a = sol.a;
  AssembledLowerBound out;
  out.L = L;
  out.E_R = sol.energy;
  out.cells = static_cast<int>(cells * cells * cells);
  out.Y = a * a * a * N / (L * L * L);
  out.correction = a > 0.0 ? C * std::pow(out.Y, exponent) : 0.0;

  const std::size_t m = g.nodes_per_axis();
  const auto& phi = sol.phi.values;
  double sum = 0.0;
  out.rho_min = kInf;
  for (long ci = 0; ci < cells; ++ci)
    for (long cj = 0; cj < cells; ++cj)
      for (long ck = 0; ck < cells; ++ck) {
        double lo = kInf, hi = 0.0;
        for (long i = ci * per; i <= (ci + 1) * per; ++i)
          for (long j = cj * per; j <= (cj + 1) * per; ++j)
            for (long k = ck * per; k <= (ck + 1) * per; ++k) {
              const double p = phi[(static_cast<std::size_t>(i) * m + j) * m + k];
              lo = std::min(lo, p * p);
              hi = std::max(hi, p * p);
            }
        if (!(lo > 0.0)) throw DomainError("box lower bound needs rho_min > 0 in every cell");
        out.rho_min = std::min(out.rho_min, lo);
        out.max_ratio = std::max(out.max_ratio, hi / lo);
        sum += hi * hi * hi * L * L * L / lo;
      }

  if (a == 0.0) {
    out.value = out.E_R;
    out.valid = true;
    return out;
  }
  const double denom = 1.0 - out.correction;
  if (!(denom > 0.0)) {
    out.value = -kInf;
    out.defect = -kInf;
    out.valid = false;
    return out;
  }
  out.defect = 4.0 * kPi * a * sol.rho_bar * N - 4.0 * kPi * a * sum / denom;
  out.value = out.E_R + out.defect;
  out.valid = true;
  return out;
}

GpSolution scaled_solution(const GpSolution& sol, double N) {
  if (!(N > 0.0)) throw DomainError("scaled_solution needs N > 0");
  const double k = N / sol.phi.N;
  GpSolution out = sol;
  out.a = sol.a / k;
  out.phi.N = N;
  const double root = std::sqrt(k);
  for (double& v : out.phi.values) v *= root;
  out.parts.kinetic *= k;
  out.parts.trap *= k;
  out.parts.interaction *= k;
  out.energy *= k;
  out.rho_bar *= k;
  out.rho_max *= k;
  out.residual_gp *= root;
  out.virial_residual *= k;
  out.richardson_error *= k;
  out.energy_extrapolated *= k;
  return out;
}

bool BoundReport::valid() const {
  return complete && ordered && soft_core_ok && confinement_ok && lower_assembled.valid &&
         chemical.valid;
}

std::vector<BoundReport> sandwich_sweep(const TrapPotential& V, const InteractionPotential& v1,
                                        double a1, const std::vector<double>& Ns,
                                        const SandwichOptions& opts) {
  if (!(a1 >= 0.0)) throw DomainError("a1 must be nonnegative");
  for (double N : Ns)
    if (!(N > 0.0)) throw DomainError("particle numbers must be positive");

  double s1 = 0.0;
  if (a1 > 0.0) {
    s1 = compute_scattering(v1, opts.scattering).a;
    if (!(s1 > 0.0)) throw DomainError("interaction has no positive scattering length");
  }

  SolverOptions solver = opts.solver;
  solver.richardson = false;
  const GpSolution gp1 = minimize(V, a1, 1.0, opts.gp_grid, solver);
  const Grid box_grid{GridKind::cartesian, opts.box_h, opts.box_R, Boundary::neumann};
  const GpSolution box1 = minimize(V, a1, 1.0, box_grid, solver);

  std::optional<EstarResult> unit;
  std::string estar_note;
  try {
    unit = estar_minimize(V, a1, 1.0, opts.gp_grid, solver, opts.estar);
  } catch (const std::exception& e) {
    estar_note = std::string("E*: ") + e.what();
  }

  std::vector<BoundReport> reports;
  for (double N : Ns) {
    BoundReport rep;
    rep.N = N;
    rep.a1 = a1;
    rep.a = a1 / N;
    const GpSolution sol = scaled_solution(gp1, N);
    rep.gp_reference = sol.energy;
    rep.gp_mu = sol.mu;

    try {
      rep.upper = dyson_upper_bound(sol);
    } catch (const std::exception& e) {
      rep.complete = false;
      rep.upper.value = kInf;
      rep.notes.push_back(std::string("upper: ") + e.what());
    }

    InteractionPotential v = InteractionPotential::none();
    if (a1 > 0.0) {
      v = scale_interaction(v1, s1, rep.a);
      ScatteringOptions so = opts.scattering;
      so.tolerance *= rep.a / s1;
      if (so.r_max > 0.0) so.r_max *= rep.a / s1;
      try {
        const DysonF fd = build_dyson_f(v, dyson_b(sol), so);
        rep.scattering_length = fd.a;
        rep.scattering_error = fd.a_error;
        rep.ingredients = dyson_ingredients(fd, sol);
        rep.upper_computed = N * dyson_energy_per_particle(rep.ingredients, sol);
        rep.soft_core_ok = check_soft_core_condition(v, dyson_b(sol), so);
      } catch (const ScatteringRegimeError& e) {
        rep.soft_core_ok = false;
        rep.complete = false;
        rep.notes.push_back(std::string("correlation factor: ") + e.what());
      } catch (const std::exception& e) {
        rep.complete = false;
        rep.notes.push_back(std::string("correlation factor: ") + e.what());
      }
    } else {
      rep.ingredients.e_tilde = (sol.parts.kinetic + sol.parts.trap) / N;
      rep.ingredients.b = dyson_b(sol);
      rep.upper_computed = sol.parts.kinetic + sol.parts.trap;
    }
    if (!rep.soft_core_ok) rep.notes.push_back("soft-core condition fails: upper bound not certified");

    if (unit) {
      rep.estar = N * unit->value / unit->N;
      rep.chemical = chemical_potential_bound(*unit, rep.a);
      rep.confinement_ok = V.is_zero() || V.radial(opts.box_R) >= rep.chemical.value;
      if (!rep.confinement_ok)
        rep.notes.push_back("trap at the box face is below the chemical potential bound");
    } else {
      rep.complete = false;
      rep.notes.push_back(estar_note);
    }

    rep.lower_homogeneous = homogeneous_lower_bound(N, opts.L, rep.a, opts.C, opts.exponent);
    try {
      rep.lower_assembled =
          assemble_box_lower_bound(scaled_solution(box1, N), opts.L, opts.C, opts.exponent);
      if (!rep.lower_assembled.valid)
        rep.notes.push_back("assembled lower bound vacuous: C Y^exponent >= 1");
    } catch (const std::exception& e) {
      rep.complete = false;
      rep.lower_assembled.value = -kInf;
      rep.notes.push_back(std::string("lower: ") + e.what());
    }

    const double gp = rep.gp_reference;
    rep.upper_gap = rep.upper.value / gp - 1.0;
    rep.lower_gap = 1.0 - rep.lower_assembled.value / gp;
    rep.ordered = rep.lower_assembled.value <= gp && gp <= rep.upper.value;
    reports.push_back(std::move(rep));
  }
  return reports;
}

BoundReport sandwich_report(const TrapPotential& V, const InteractionPotential& v1, double a1,
                            double N, const SandwichOptions& opts) {
  return sandwich_sweep(V, v1, a1, {N}, opts).front();
}

}  // namespace gpb
