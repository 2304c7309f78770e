#include "minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "gpb/error.hpp"

namespace gpb::detail {

std::unique_ptr<Discretization> make_radial_discretization(const Grid&, const TrapPotential&);
std::unique_ptr<Discretization> make_cartesian_discretization(const Grid&, const TrapPotential&);

std::unique_ptr<Discretization> make_discretization(const Grid& grid, const TrapPotential& V) {
  grid.validate();
  if (grid.kind == GridKind::radial) return make_radial_discretization(grid, V);
  return make_cartesian_discretization(grid, V);
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Discretization::kinetic(const Vec& x) const {
  Vec t;
  apply_kinetic(x, t);
  return dot(x, t);
}

double Discretization::trap(const Vec& x) const {
  Vec t;
  apply_trap(x, t);
  return dot(x, t);
}

double Discretization::norm2(const Vec& x) const {
  Vec t;
  apply_mass(x, t);
  return dot(x, t);
}

// ---------------------------------------------------------------- nonlinearities

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
}  // namespace

double GpInteraction::value(const Vec& x) const { return 4.0 * kPi * a_ * d_.quartic(x); }

void GpInteraction::gradient(const Vec& x, Vec& g) const {
  d_.quartic_gradient(x, g);
  for (double& v : g) v *= 4.0 * kPi * a_;
}

std::optional<std::array<double, 5>> GpInteraction::line(const Vec& x, const Vec& d) const {
  auto c = d_.quartic_line(x, d);
  for (double& v : c) v *= 4.0 * kPi * a_;
  return c;
}

double SmoothedSupInteraction::smoothed_sup_squared(const Vec& x) const {
  const Vec phi = d_.nodal(x);
  const Vec& w = d_.moment_weights();
  double m = 0.0;
  for (double v : phi) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (w[i] == 0.0) continue;
    const double q = std::abs(phi[i]) / m;
    const double qp2 = std::pow(q, p_ - 2.0);
    sq += w[i] * qp2;
    sp += w[i] * qp2 * q * q;
  }
  return m * m * sp / sq;
}

double SmoothedSupInteraction::value(const Vec& x) const {
  return 8.0 * kPi * a_ * smoothed_sup_squared(x) * d_.norm2(x);
}

void SmoothedSupInteraction::gradient(const Vec& x, Vec& g) const {
  const Vec phi = d_.nodal(x);
  const Vec& w = d_.moment_weights();
  double m = 0.0;
  for (double v : phi) m = std::max(m, std::abs(v));
  Vec mx;
  d_.apply_mass(x, mx);
  const double n = dot(x, mx);
  if (m == 0.0) {
    g.assign(x.size(), 0.0);
    return;
  }
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (w[i] == 0.0) continue;
    const double q = std::abs(phi[i]) / m;
    const double qp2 = std::pow(q, p_ - 2.0);
    sq += w[i] * qp2;
    sp += w[i] * qp2 * q * q;
  }
  const double Q = m * m * sp / sq;
  Vec gn(phi.size(), 0.0);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (w[i] == 0.0 || phi[i] == 0.0) continue;
    const double q = std::abs(phi[i]) / m;
    const double qp3 = std::pow(q, p_ - 3.0);
    const double s = phi[i] > 0.0 ? 1.0 : -1.0;
    gn[i] = s * w[i] * m * (p_ * qp3 * q * q * sq - (p_ - 2.0) * qp3 * sp) / (sq * sq);
  }
  d_.nodal_adjoint(gn, g);
  const double c = 8.0 * kPi * a_;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = c * (g[i] * n + 2.0 * Q * mx[i]);
}

// ---------------------------------------------------------------- minimizer

namespace {

struct State {
  Vec x, mx, g, r;
  double quad = 0.0, nl = 0.0, mu = 0.0, residual = 0.0;
};

void evaluate(const Discretization& disc, const Nonlinearity& nl, double N, State& s) {
  Vec kx, px, gn;
  disc.apply_kinetic(s.x, kx);
  disc.apply_trap(s.x, px);
  disc.apply_mass(s.x, s.mx);
  nl.gradient(s.x, gn);
  s.nl = nl.value(s.x);
  const std::size_t n = s.x.size();
  s.g.resize(n);
  s.quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.quad += s.x[i] * (kx[i] + px[i]);
    s.g[i] = 2.0 * (kx[i] + px[i]) + gn[i];
  }
  s.mu = 0.5 * dot(s.x, s.g) / N;
  s.r.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.r[i] = 0.5 * s.g[i] - s.mu * s.mx[i];
  Vec minv;
  disc.solve_mass(s.r, minv);
  s.residual = std::sqrt(std::max(0.0, dot(s.r, minv)));
}

void normalize(const Discretization& disc, Vec& x, double N) {
  const double n = disc.norm2(x);
  if (!(n > 0.0)) throw DomainError("cannot normalize a zero wave function");
  const double s = std::sqrt(N / n);
  for (double& v : x) v *= s;
}

// Energy along x(t) = sqrt(N) (x + t d) / |x + t d|_M.
struct LineModel {
  double q0, q1, q2, n0, n1, n2, N;
  int degree;

  double scale(double t) const { return n0 + 2.0 * t * n1 + t * t * n2; }
  double quad(double t) const { return N * (q0 + 2.0 * t * q1 + t * t * q2) / scale(t); }
  double nl_factor(double t) const { return std::pow(N / scale(t), 0.5 * degree); }
};

}  // namespace

void euler_lagrange(const Discretization& disc, const Nonlinearity& nl, const Vec& x, double N,
                    double& mu, double& residual) {
  State s;
  s.x = x;
  evaluate(disc, nl, N, s);
  mu = s.mu;
  residual = s.residual;
}

MinimizerResult minimize_on_sphere(Discretization& disc, const Nonlinearity& nl, Vec x0,
                                   const MinimizerOptions& opts) {
  const double N = opts.N;
  if (!(N > 0.0)) throw DomainError("particle number must be positive");
  const std::size_t n = disc.size();
  if (x0.size() != n) throw DomainError("initial guess has the wrong size");

  State s;
  s.x = std::move(x0);
  normalize(disc, s.x, N);
  evaluate(disc, nl, N, s);

  auto converged = [&](const State& st) {
    return st.residual / (std::sqrt(N) * std::max(1.0, std::abs(st.mu))) < opts.tolerance;
  };

  Vec z(n), d(n), d_prev(n, 0.0), z_prev(n, 0.0), r_prev(n, 0.0), ad, md, y(n);
  double rz_prev = 0.0;
  double t_prev = 1.0;
  bool restart = true;
  int it = 0;
  int stalls = 0;
  MinimizerResult res;

  for (; it < opts.max_iter && !converged(s); ++it) {
    disc.precondition(s.r, z);
    {
      const double c = dot(z, s.mx) / N;
      for (std::size_t i = 0; i < n; ++i) z[i] -= c * s.x[i];
    }
    const double rz = dot(s.r, z);
    double beta = 0.0;
    if (!restart && rz_prev > 0.0) beta = std::max(0.0, (rz - dot(s.r, z_prev)) / rz_prev);
    for (std::size_t i = 0; i < n; ++i) d[i] = -z[i] + beta * d_prev[i];
    {
      const double c = dot(d, s.mx) / N;
      for (std::size_t i = 0; i < n; ++i) d[i] -= c * s.x[i];
    }
    double slope = dot(s.g, d);
    if (!(slope < 0.0)) {
      for (std::size_t i = 0; i < n; ++i) d[i] = -z[i];
      slope = dot(s.g, d);
      if (!(slope < 0.0)) break;  // no descent direction left: roundoff floor
    }

    // Quadratic pieces of the line model.
    Vec kd, pd;
    disc.apply_kinetic(d, kd);
    disc.apply_trap(d, pd);
    disc.apply_mass(d, md);
    LineModel lm{};
    lm.N = N;
    lm.degree = nl.degree();
    lm.q0 = s.quad;
    lm.q1 = 0.0;
    lm.q2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lm.q1 += s.x[i] * (kd[i] + pd[i]);
      lm.q2 += d[i] * (kd[i] + pd[i]);
    }
    lm.n0 = N;
    lm.n1 = dot(s.x, md);
    lm.n2 = dot(d, md);

    double t_acc = 0.0;
    if (auto poly = nl.line(s.x, d)) {
      // Exact line search: root of dE/dt from closed-form coefficients.
      const auto& c = *poly;
      auto dE = [&](double t) {
        const double nn = lm.scale(t), dn = 2.0 * lm.n1 + 2.0 * t * lm.n2;
        const double Q = lm.q0 + 2.0 * t * lm.q1 + t * t * lm.q2, dQ = 2.0 * lm.q1 + 2.0 * t * lm.q2;
        const double L = (((c[4] * t + c[3]) * t + c[2]) * t + c[1]) * t + c[0];
        const double dL = ((4.0 * c[4] * t + 3.0 * c[3]) * t + 2.0 * c[2]) * t + c[1];
        return N * (dQ * nn - Q * dn) / (nn * nn) + N * N * (dL * nn - 2.0 * L * dn) / (nn * nn * nn);
      };
      double lo = 0.0, hi = std::clamp(2.0 * t_prev, 1e-8, 1e8);
      int expand = 0;
      while (dE(hi) < 0.0 && expand < 80) {
        lo = hi;
        hi *= 2.0;
        ++expand;
      }
      if (dE(hi) < 0.0) {
        t_acc = hi;
      } else {
        std::uintmax_t max_it = 200;
        auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::abs(b); };
        const auto root = boost::math::tools::toms748_solve(dE, lo, hi, tol, max_it);
        t_acc = 0.5 * (root.first + root.second);
      }
    } else {
      // Backtracking (Armijo) with parabolic refinement; roundoff slack lets
      // steps through once the energy decrease is below double precision.
      auto energy = [&](double t) {
        for (std::size_t i = 0; i < n; ++i) y[i] = s.x[i] + t * d[i];
        return lm.quad(t) + lm.nl_factor(t) * nl.value(y);
      };
      const double E0 = s.quad + s.nl;
      const double slack = 16.0 * kEps * (std::abs(s.quad) + std::abs(s.nl));
      double t = std::clamp(2.0 * t_prev, 1e-8, 1e8);
      for (int k = 0; k < 60; ++k) {
        const double Et = energy(t);
        const double denom = Et - E0 - slope * t;
        if (Et <= E0 + 1e-4 * t * slope + slack) {
          if (denom > 0.0) {
            const double ts = -slope * t * t / (2.0 * denom);
            if (ts > 0.0 && ts < 4.0 * t && std::abs(ts - t) > 1e-3 * t) {
              const double Es = energy(ts);
              if (Es < Et) t = ts;
            }
          }
          t_acc = t;
          break;
        }
        const double ts = denom > 0.0 ? -slope * t * t / (2.0 * denom) : 0.5 * t;
        t = std::clamp(ts, 0.1 * t, 0.5 * t);
      }
    }

    if (!(t_acc > 0.0)) {
      if (++stalls > 3) break;
      restart = true;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) s.x[i] += t_acc * d[i];
    normalize(disc, s.x, N);
    t_prev = t_acc;
    r_prev = s.r;
    z_prev = z;
    rz_prev = rz;
    d_prev = d;
    restart = false;
    evaluate(disc, nl, N, s);
    // Periodic restarts keep PR+ from drifting on the curved constraint.
    if ((it + 1) % 50 == 0) restart = true;
  }

  res.converged = converged(s);
  res.iterations = it;
  double sum = 0.0;
  for (double v : s.x) sum += v;
  if (sum < 0.0)
    for (double& v : s.x) v = -v;
  res.x = std::move(s.x);
  res.quadratic = s.quad;
  res.nonlinear = s.nl;
  res.mu = s.mu;
  res.residual = s.residual;
  return res;
}

}  // namespace gpb::detail
