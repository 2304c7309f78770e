#pragma once

#include <vector>

#include "gpb/gp_solver.hpp"
#include "gpb/potentials.hpp"

namespace gpb {

// Minimizer of F[rho] = int (V rho + 4 pi a rho^2) with int rho = N:
// rho = (8 pi a)^{-1} [mu - V]_+ for a homogeneous trap V = coef r^s.
struct TfSolution {
  double mu = 0.0;  // the multiplier mu~
  double F = 0.0;
  double trap_energy = 0.0;         // int V rho
  double interaction_energy = 0.0;  // 4 pi a int rho^2
  double support_radius = 0.0;
  double s = 0.0;
  double coef = 1.0;
  double N = 0.0;
  double a = 0.0;
  // Certified bisection bracket: norm(mu_lo) < N < norm(mu_hi).
  double mu_lo = 0.0, mu_hi = 0.0;
  double norm_lo = 0.0, norm_hi = 0.0;

  double density(double r) const;
};

/// Throws DomainError unless V is homogeneous (harmonic or power kind).
TfSolution tf_minimize(const TrapPotential& V, double N, double a);

/// Upper bound on E^GP(1, Na) from the trial density built from the
/// mollified, renormalized TF profile at N = a = 1:
///   (Na)^{s/(s+3)} [int V rho_m + 4 pi int rho_m^2] + (Na)^{-2/(s+3)} int |grad sqrt(rho_m)|^2.
struct TfGradientBound {
  double delta = 0.0;  // mollifier shell width (1e-3 of the support radius)
  double tau = 0.0;    // same width in energy units: V'(R) delta
  double functional = 0.0;         // int V rho_m + 4 pi int rho_m^2
  double gradient_integral = 0.0;  // int |grad sqrt(rho_m)|^2
  double bound = 0.0;
};
TfGradientBound tf_gradient_bound(const TrapPotential& V, double Na);

struct TfConvergenceRow {
  double Na = 0.0;
  double E_gp = 0.0;          // E^GP(1, Na)
  double ratio = 0.0;         // E^GP(1, Na) / (Na)^{s/(s+3)}
  double F = 0.0;             // F(1, Na)
  double l2_distance = 0.0;   // rescaled rho^GP vs rho^F_{1,1}
  double upper_bound = 0.0;   // gradient-corrected TF bound
  double residual_gp = 0.0;
  bool F_below_gp = false;
};

/// Radial decay grid wide enough for E^GP(1, Na): V(R) >= mu_TF + 40 and R
/// at least 8 oscillator lengths, with `nodes` intervals.
Grid tf_grid(const TrapPotential& V, double Na, int nodes = 2000);

std::vector<TfConvergenceRow> gp_tf_convergence(const TrapPotential& V,
                                                const std::vector<double>& Na_list,
                                                const SolverOptions& opts = {}, int nodes = 2000);

}  // namespace gpb
