#pragma once

// Discrete GP functionals. Both discretizations expose the energy as
//   E(x) = x^T (K + P) x + nonlinear(x),   constraint x^T M x = N,
// with K, P, M symmetric, so the minimizer can stay generic.

#include <array>
#include <memory>
#include <vector>

#include "gpb/grid.hpp"
#include "gpb/potentials.hpp"

namespace gpb::detail {

using Vec = std::vector<double>;

class Discretization {
 public:
  virtual ~Discretization() = default;

  virtual std::size_t size() const = 0;
  virtual void apply_kinetic(const Vec& x, Vec& out) const = 0;
  virtual void apply_trap(const Vec& x, Vec& out) const = 0;
  virtual void apply_mass(const Vec& x, Vec& out) const = 0;
  virtual void solve_mass(const Vec& r, Vec& out) const = 0;
  /// Approximately (K + P + sigma M)^{-1} r, symmetric positive definite.
  virtual void precondition(const Vec& r, Vec& out) const = 0;
  virtual void set_shift(double sigma) = 0;

  /// integral of Phi^4 and its gradient with respect to x.
  virtual double quartic(const Vec& x) const = 0;
  virtual void quartic_gradient(const Vec& x, Vec& out) const = 0;
  /// Coefficients c_k with int Phi(x + t d)^4 = sum_k c_k t^k.
  virtual std::array<double, 5> quartic_line(const Vec& x, const Vec& d) const = 0;

  /// Phi at every grid node, and the transpose of that linear map.
  virtual Vec nodal(const Vec& x) const = 0;
  virtual void nodal_adjoint(const Vec& g_nodal, Vec& out) const = 0;
  /// Inverse of nodal on the discrete space (boundary/duplicate nodes ignored).
  virtual Vec from_nodal(const Vec& phi) const = 0;
  /// Positive node weights for weighted moments (zero allowed on duplicates).
  virtual const Vec& moment_weights() const = 0;
  /// sup |Phi| over the continuum interpolant.
  virtual double sup(const Vec& x) const = 0;

  virtual const Grid& grid() const = 0;

  double kinetic(const Vec& x) const;
  double trap(const Vec& x) const;
  double norm2(const Vec& x) const;
};

std::unique_ptr<Discretization> make_discretization(const Grid& grid, const TrapPotential& V);

double dot(const Vec& a, const Vec& b);

}  // namespace gpb::detail
