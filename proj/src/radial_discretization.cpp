// Radial reduction: Phi(r) = chi(r)/r with chi piecewise linear on r_i = i h,
// chi(0) = chi(R) = 0. Then
//   T = 4 pi int chi'^2 dr,  P = 4 pi int V chi^2 dr,  int Phi^4 = 4 pi int chi^4 / r^2 dr
// are evaluated exactly for the interpolant (P by 10-point Gauss per element),
// so the discrete energy is the continuum energy of an admissible function.

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "discretization.hpp"
#include "gpb/error.hpp"

namespace gpb::detail {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr std::array<double, 5> kBinom{1.0, 4.0, 6.0, 4.0, 1.0};

struct Tridiag {
  Vec d, o;  // o[i] couples i and i+1

  void apply(const Vec& x, Vec& out) const {
    const std::size_t n = d.size();
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = d[i] * x[i];
      if (i > 0) s += o[i - 1] * x[i - 1];
      if (i + 1 < n) s += o[i] * x[i + 1];
      out[i] = s;
    }
  }
};

// LDL^T factorization of a symmetric positive definite tridiagonal matrix.
struct TridiagSolver {
  Vec diag, lower;

  void factor(const Tridiag& a) {
    const std::size_t n = a.d.size();
    diag.resize(n);
    lower.assign(n, 0.0);
    diag[0] = a.d[0];
    for (std::size_t i = 1; i < n; ++i) {
      lower[i] = a.o[i - 1] / diag[i - 1];
      diag[i] = a.d[i] - lower[i] * a.o[i - 1];
      if (!(diag[i] > 0.0)) throw DomainError("radial operator is not positive definite");
    }
  }

  void solve(const Vec& r, Vec& out) const {
    const std::size_t n = diag.size();
    out = r;
    for (std::size_t i = 1; i < n; ++i) out[i] -= lower[i] * out[i - 1];
    for (std::size_t i = 0; i < n; ++i) out[i] /= diag[i];
    for (std::size_t i = n - 1; i-- > 0;) out[i] -= lower[i + 1] * out[i + 1];
  }
};

class RadialDiscretization final : public Discretization {
 public:
  RadialDiscretization(const Grid& grid, const TrapPotential& V) : grid_(grid) {
    if (!V.symmetric()) throw DomainError("radial grids need a spherically symmetric trap");
    if (V.is_zero()) throw DomainError("the zero trap needs a cartesian Neumann box");
    n_ = grid.n();
    h_ = grid.h;
    const std::size_t m = static_cast<std::size_t>(n_ - 1);

    kin_.d.assign(m, 2.0 * kFourPi / h_);
    kin_.o.assign(m, -kFourPi / h_);
    mass_.d.assign(m, kFourPi * h_ * 4.0 / 6.0);
    mass_.o.assign(m, kFourPi * h_ / 6.0);
    trap_.d.assign(m, 0.0);
    trap_.o.assign(m, 0.0);

    using G = boost::math::quadrature::gauss<double, 10>;
    quartic_coef_.resize(static_cast<std::size_t>(n_));
    for (int e = 0; e < n_; ++e) {
      const double r0 = e * h_;
      auto phi0 = [&](double r) { return (r0 + h_ - r) / h_; };
      auto phi1 = [&](double r) { return (r - r0) / h_; };
      const double p00 = kFourPi * G::integrate([&](double r) { return V.radial(r) * phi0(r) * phi0(r); }, r0, r0 + h_);
      const double p01 = kFourPi * G::integrate([&](double r) { return V.radial(r) * phi0(r) * phi1(r); }, r0, r0 + h_);
      const double p11 = kFourPi * G::integrate([&](double r) { return V.radial(r) * phi1(r) * phi1(r); }, r0, r0 + h_);
      // Element e couples unknowns e-1 and e (chi_e and chi_{e+1}).
      if (e >= 1) trap_.d[e - 1] += p00;
      if (e + 1 <= n_ - 1) trap_.d[e] += p11;
      if (e >= 1 && e + 1 <= n_ - 1) trap_.o[e - 1] += p01;

      auto& g = quartic_coef_[static_cast<std::size_t>(e)];
      if (e == 0) {
        g = {0.0, 0.0, 0.0, 0.0, kFourPi / (3.0 * h_)};
      } else {
        for (int j = 0; j <= 4; ++j) {
          g[j] = kFourPi / h_ *
                 G::integrate(
                     [&](double s) {
                       return std::pow(1.0 - s, 4 - j) * std::pow(s, j) / ((e + s) * (e + s));
                     },
                     0.0, 1.0);
        }
      }
    }
    weights_.assign(static_cast<std::size_t>(n_) + 1, 0.0);
    for (int i = 1; i <= n_; ++i) weights_[i] = kFourPi * (i * h_) * (i * h_) * h_;
    set_shift(0.0);
  }

  std::size_t size() const override { return static_cast<std::size_t>(n_ - 1); }
  void apply_kinetic(const Vec& x, Vec& out) const override { kin_.apply(x, out); }
  void apply_trap(const Vec& x, Vec& out) const override { trap_.apply(x, out); }
  void apply_mass(const Vec& x, Vec& out) const override { mass_.apply(x, out); }
  void solve_mass(const Vec& r, Vec& out) const override { mass_solver_.solve(r, out); }
  void precondition(const Vec& r, Vec& out) const override { pre_.solve(r, out); }

  void set_shift(double sigma) override {
    Tridiag a = kin_;
    for (std::size_t i = 0; i < a.d.size(); ++i) {
      a.d[i] += trap_.d[i] + sigma * mass_.d[i];
      a.o[i] += trap_.o[i] + sigma * mass_.o[i];
    }
    pre_.factor(a);
    mass_solver_.factor(mass_);
  }

  double quartic(const Vec& x) const override {
    double s = 0.0;
    for (int e = 0; e < n_; ++e) {
      const double c0 = chi(x, e), c1 = chi(x, e + 1);
      const auto& g = quartic_coef_[static_cast<std::size_t>(e)];
      std::array<double, 5> pw1{1.0, c1, c1 * c1, c1 * c1 * c1, c1 * c1 * c1 * c1};
      std::array<double, 5> pw0{1.0, c0, c0 * c0, c0 * c0 * c0, c0 * c0 * c0 * c0};
      for (int j = 0; j <= 4; ++j) s += kBinom[j] * pw0[4 - j] * pw1[j] * g[j];
    }
    return s;
  }

  void quartic_gradient(const Vec& x, Vec& out) const override {
    out.assign(size(), 0.0);
    for (int e = 0; e < n_; ++e) {
      const double c0 = chi(x, e), c1 = chi(x, e + 1);
      const auto& g = quartic_coef_[static_cast<std::size_t>(e)];
      std::array<double, 5> pw1{1.0, c1, c1 * c1, c1 * c1 * c1, c1 * c1 * c1 * c1};
      std::array<double, 5> pw0{1.0, c0, c0 * c0, c0 * c0 * c0, c0 * c0 * c0 * c0};
      double d0 = 0.0, d1 = 0.0;
      for (int j = 0; j <= 4; ++j) {
        if (j < 4) d0 += kBinom[j] * (4 - j) * pw0[3 - j] * pw1[j] * g[j];
        if (j > 0) d1 += kBinom[j] * j * pw0[4 - j] * pw1[j - 1] * g[j];
      }
      if (e >= 1) out[e - 1] += d0;
      if (e + 1 <= n_ - 1) out[e] += d1;
    }
  }

  std::array<double, 5> quartic_line(const Vec& x, const Vec& d) const override {
    std::array<double, 5> c{};
    for (int e = 0; e < n_; ++e) {
      const auto& g = quartic_coef_[static_cast<std::size_t>(e)];
      const auto p0 = powers(chi(x, e), chi(d, e));
      const auto p1 = powers(chi(x, e + 1), chi(d, e + 1));
      for (int j = 0; j <= 4; ++j) {
        const auto& a = p0[4 - j];
        const auto& b = p1[j];
        for (int k = 0; k <= 4 - j; ++k)
          for (int l = 0; l <= j; ++l) c[k + l] += kBinom[j] * g[j] * a[k] * b[l];
      }
    }
    return c;
  }

  Vec nodal(const Vec& x) const override {
    Vec phi(static_cast<std::size_t>(n_) + 1, 0.0);
    for (int i = 1; i < n_; ++i) phi[i] = x[i - 1] / (i * h_);
    phi[0] = phi[1];
    return phi;
  }

  void nodal_adjoint(const Vec& g, Vec& out) const override {
    out.assign(size(), 0.0);
    for (int i = 1; i < n_; ++i) out[i - 1] = g[i] / (i * h_);
    out[0] += g[0] / h_;
  }

  Vec from_nodal(const Vec& phi) const override {
    if (phi.size() != static_cast<std::size_t>(n_) + 1)
      throw DomainError("wave field size does not match the radial grid");
    Vec x(size());
    for (int i = 1; i < n_; ++i) x[i - 1] = phi[i] * (i * h_);
    return x;
  }

  const Vec& moment_weights() const override { return weights_; }

  double sup(const Vec& x) const override {
    // chi/r is monotone on each element, so the extremes sit on nodes.
    double m = 0.0;
    for (int i = 1; i < n_; ++i) m = std::max(m, std::abs(x[i - 1]) / (i * h_));
    return m;
  }

  const Grid& grid() const override { return grid_; }

 private:
  // Coefficients of (c + t d)^q for q = 0..4, entry [q][k] multiplies t^k.
  static std::array<std::array<double, 5>, 5> powers(double c, double d) {
    std::array<std::array<double, 5>, 5> p{};
    p[0][0] = 1.0;
    for (int q = 1; q <= 4; ++q)
      for (int k = 0; k <= q; ++k)
        p[q][k] = (k < q ? c * p[q - 1][k] : 0.0) + (k > 0 ? d * p[q - 1][k - 1] : 0.0);
    return p;
  }

  double chi(const Vec& x, int i) const {
    return (i <= 0 || i >= n_) ? 0.0 : x[static_cast<std::size_t>(i - 1)];
  }

  Grid grid_;
  int n_ = 0;
  double h_ = 0.0;
  Tridiag kin_, trap_, mass_;
  TridiagSolver pre_, mass_solver_;
  std::vector<std::array<double, 5>> quartic_coef_;
  Vec weights_;
};

}  // namespace

std::unique_ptr<Discretization> make_radial_discretization(const Grid& grid,
                                                           const TrapPotential& V) {
  return std::make_unique<RadialDiscretization>(grid, V);
}

}  // namespace gpb::detail
