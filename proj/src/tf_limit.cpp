#include "gpb/tf_limit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gpb/error.hpp"

namespace gpb {

namespace {

constexpr double pi = std::numbers::pi;

struct PowerLaw {
  double s;
  double coef;
};

PowerLaw power_law(const TrapPotential& V) {
  auto s = V.homogeneous_order();
  if (!s || V.is_zero() || (V.kind() != TrapKind::harmonic && V.kind() != TrapKind::power))
    throw DomainError("Thomas-Fermi limit needs a homogeneous trap coef*r^s, got " +
                      V.describe());
  return {*s, V.coefficient()};
}

const QuadratureTolerance tight{1e-300, 1e-10};

// int_0^R g(r) r^2 dr, R = support radius of [mu - V]_+.
double radial_moment(const std::function<double(double)>& g, double R) {
  return integrate([&](double r) { return g(r) * r * r; }, 0.0, R, tight).value;
}

double support(const PowerLaw& p, double mu) { return std::pow(mu / p.coef, 1.0 / p.s); }

// int rho for rho = (8 pi a)^-1 [mu - V]_+.
double tf_norm(const PowerLaw& p, double a, double mu) {
  if (mu <= 0.0) return 0.0;
  const double R = support(p, mu);
  return 4.0 * pi / (8.0 * pi * a) *
         radial_moment([&](double r) { return mu - p.coef * std::pow(r, p.s); }, R);
}

}  // namespace

double TfSolution::density(double r) const {
  const double t = mu - coef * std::pow(std::abs(r), s);
  return t > 0.0 ? t / (8.0 * pi * a) : 0.0;
}

TfSolution tf_minimize(const TrapPotential& V, double N, double a) {
  if (!(N > 0.0) || !(a > 0.0)) throw DomainError("tf_minimize needs N > 0 and a > 0");
  const PowerLaw p = power_law(V);

  double lo = 0.0, hi = 1.0;
  double norm_lo = 0.0, norm_hi = tf_norm(p, a, hi);
  while (norm_hi <= N) {
    lo = hi;
    norm_lo = norm_hi;
    hi *= 2.0;
    norm_hi = tf_norm(p, a, hi);
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double n = tf_norm(p, a, mid);
    if (n < N) {
      lo = mid;
      norm_lo = n;
    } else {
      hi = mid;
      norm_hi = n;
    }
  }

  TfSolution out;
  out.mu = 0.5 * (lo + hi);
  out.mu_lo = lo;
  out.mu_hi = hi;
  out.norm_lo = norm_lo;
  out.norm_hi = norm_hi;
  out.s = p.s;
  out.coef = p.coef;
  out.N = N;
  out.a = a;
  out.support_radius = support(p, out.mu);

  const double mu = out.mu;
  auto V_r = [&](double r) { return p.coef * std::pow(r, p.s); };
  const double R = out.support_radius;
  out.trap_energy = 4.0 * pi / (8.0 * pi * a) *
                    radial_moment([&](double r) { return V_r(r) * (mu - V_r(r)); }, R);
  out.interaction_energy =
      4.0 * pi * a * 4.0 * pi / std::pow(8.0 * pi * a, 2) *
      radial_moment([&](double r) { return std::pow(mu - V_r(r), 2); }, R);
  out.F = out.trap_energy + out.interaction_energy;
  return out;
}

TfGradientBound tf_gradient_bound(const TrapPotential& V, double Na) {
  if (!(Na > 0.0)) throw DomainError("tf_gradient_bound needs Na > 0");
  const PowerLaw p = power_law(V);
  const TfSolution tf = tf_minimize(V, 1.0, 1.0);
  const double mu = tf.mu;
  const double Rs = tf.support_radius;

  TfGradientBound out;
  out.delta = 1e-3 * Rs;
  out.tau = p.s * p.coef * std::pow(Rs, p.s - 1.0) * out.delta;
  const double tau = out.tau;

  // Quadratic cap: g(t) = (t+tau)^2/(4 tau) on |t| <= tau, t above, 0 below.
  auto g = [tau](double t) {
    if (t >= tau) return t;
    if (t <= -tau) return 0.0;
    return (t + tau) * (t + tau) / (4.0 * tau);
  };
  // d sqrt(g) / dt
  auto dsqrt_g = [tau](double t) {
    if (t >= tau) return 0.5 / std::sqrt(t);
    if (t <= -tau) return 0.0;
    return 0.5 / std::sqrt(tau);
  };
  auto V_r = [&](double r) { return p.coef * std::pow(r, p.s); };
  auto dV_r = [&](double r) { return p.s * p.coef * std::pow(r, p.s - 1.0); };
  const double r_in = std::pow(std::max(mu - tau, 0.0) / p.coef, 1.0 / p.s);
  const double r_out = std::pow((mu + tau) / p.coef, 1.0 / p.s);
  // The gradient density grows like 1/t towards the shell; cut geometrically in t.
  std::vector<double> cuts{r_in, Rs};
  for (double t = 2.0 * tau; t < mu; t *= 2.0) cuts.push_back(std::pow((mu - t) / p.coef, 1.0 / p.s));

  auto moment = [&](const std::function<double(double)>& f) {
    return 4.0 * pi *
           integrate([&](double r) { return f(r) * r * r; }, 0.0, r_out, tight, cuts).value;
  };
  // rho_m = g(mu - V) / Z with Z making int rho_m = 1.
  const double Z = moment([&](double r) { return g(mu - V_r(r)); });
  const double trap = moment([&](double r) { return V_r(r) * g(mu - V_r(r)); }) / Z;
  const double quartic = moment([&](double r) { return std::pow(g(mu - V_r(r)), 2); }) / (Z * Z);
  out.functional = trap + 4.0 * pi * quartic;
  out.gradient_integral =
      moment([&](double r) { return std::pow(dV_r(r) * dsqrt_g(mu - V_r(r)), 2); }) / Z;

  out.bound = std::pow(Na, p.s / (p.s + 3.0)) * out.functional +
              std::pow(Na, -2.0 / (p.s + 3.0)) * out.gradient_integral;
  return out;
}

Grid tf_grid(const TrapPotential& V, double Na, int nodes) {
  const PowerLaw p = power_law(V);
  if (nodes < 32) throw DomainError("tf_grid needs at least 32 intervals");
  const TfSolution tf = tf_minimize(V, 1.0, Na);
  const double R_wall = std::pow((tf.mu + 40.0) / p.coef, 1.0 / p.s);
  const double R_osc = 8.0 * std::pow(p.coef, -1.0 / (p.s + 2.0));
  double R = std::ceil(std::max(R_wall, R_osc));
  Grid g;
  g.kind = GridKind::radial;
  g.boundary = Boundary::decay;
  g.R = R;
  g.h = R / nodes;
  return g;
}

std::vector<TfConvergenceRow> gp_tf_convergence(const TrapPotential& V,
                                                const std::vector<double>& Na_list,
                                                const SolverOptions& opts, int nodes) {
  const PowerLaw p = power_law(V);
  for (std::size_t i = 1; i < Na_list.size(); ++i)
    if (!(Na_list[i] > Na_list[i - 1])) throw DomainError("Na list must be strictly increasing");
  const TfSolution unit = tf_minimize(V, 1.0, 1.0);

  std::vector<TfConvergenceRow> rows;
  for (double Na : Na_list) {
    if (!(Na > 0.0)) throw DomainError("Na must be positive");
    const Grid grid = tf_grid(V, Na, nodes);
    SolverOptions o = opts;
    o.richardson = false;
    const GpSolution sol = minimize(V, Na, 1.0, grid, o);
    const TfSolution tf = tf_minimize(V, 1.0, Na);

    TfConvergenceRow row;
    row.Na = Na;
    row.E_gp = sol.energy;
    row.ratio = sol.energy / std::pow(Na, p.s / (p.s + 3.0));
    row.F = tf.F;
    row.residual_gp = sol.residual_gp;
    row.F_below_gp = tf.F <= sol.energy;
    row.upper_bound = tf_gradient_bound(V, Na).bound;

    // rho~(x) = lambda^3 rho_{1,Na}(lambda x) with lambda = (Na)^{1/(s+3)};
    // trapezoid in x over the mapped nodes, with the TF density beyond the grid being zero.
    const double lambda = std::pow(Na, 1.0 / (p.s + 3.0));
    const std::vector<double> rho = density(sol);
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const double x = grid.coordinate(i) / lambda;
      const double diff = std::pow(lambda, 3) * rho[i] - unit.density(x);
      const double w = (i == 0 || i + 1 == rho.size()) ? 0.5 : 1.0;
      acc += w * diff * diff * x * x;
    }
    row.l2_distance = std::sqrt(4.0 * pi * acc * grid.h / lambda);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gpb
