#pragma once

#include <optional>

#include "discretization.hpp"

namespace gpb::detail {

// Nonlinear part of the energy; must be homogeneous of the given degree.
class Nonlinearity {
 public:
  virtual ~Nonlinearity() = default;
  virtual double value(const Vec& x) const = 0;
  virtual void gradient(const Vec& x, Vec& g) const = 0;
  virtual int degree() const = 0;
  /// Polynomial coefficients of t -> value(x + t d) when available.
  virtual std::optional<std::array<double, 5>> line(const Vec&, const Vec&) const {
    return std::nullopt;
  }
};

// 4 pi a int Phi^4.
class GpInteraction final : public Nonlinearity {
 public:
  GpInteraction(const Discretization& d, double a) : d_(d), a_(a) {}
  double value(const Vec& x) const override;
  void gradient(const Vec& x, Vec& g) const override;
  int degree() const override { return 4; }
  std::optional<std::array<double, 5>> line(const Vec& x, const Vec& d) const override;

 private:
  const Discretization& d_;
  double a_;
};

// 8 pi a M_p(x)^2 int Phi^2 with M_p^2 = S_p / S_{p-2}, S_q = sum_i w_i |Phi_i|^q.
// M_p <= max |Phi_i|, so this never exceeds the sup-norm functional.
class SmoothedSupInteraction final : public Nonlinearity {
 public:
  SmoothedSupInteraction(const Discretization& d, double a, double p) : d_(d), a_(a), p_(p) {}
  double value(const Vec& x) const override;
  void gradient(const Vec& x, Vec& g) const override;
  int degree() const override { return 4; }
  double smoothed_sup_squared(const Vec& x) const;

 private:
  const Discretization& d_;
  double a_;
  double p_;
};

struct MinimizerOptions {
  double N = 1.0;
  double tolerance = 1e-9;
  int max_iter = 20000;
};

struct MinimizerResult {
  Vec x;
  double quadratic = 0.0;
  double nonlinear = 0.0;
  double mu = 0.0;
  double residual = 0.0;  // L2 norm of the Euler-Lagrange defect
  int iterations = 0;
  bool converged = false;
  bool floor_hit = false;
};

/// Minimizes x^T (K+P) x + nl(x) on x^T M x = N by preconditioned nonlinear
/// conjugate gradients on the constraint sphere with backtracking line search.
MinimizerResult minimize_on_sphere(Discretization& disc, const Nonlinearity& nl, Vec x0,
                                   const MinimizerOptions& opts);

/// Residual and multiplier for an arbitrary x (used by diagnostics).
void euler_lagrange(const Discretization& disc, const Nonlinearity& nl, const Vec& x, double N,
                    double& mu, double& residual);

}  // namespace gpb::detail
