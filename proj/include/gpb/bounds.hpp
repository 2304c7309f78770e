#pragma once

#include <string>
#include <vector>

#include "gpb/gp_solver.hpp"
#include "gpb/potentials.hpp"
#include "gpb/scattering.hpp"

namespace gpb {

// Correlation factor f = (1+eps) u(r)/r on r <= b, 1 beyond, with u the
// zero-energy solution normalized to u'(inf) = 1 and eps fixed by f(b) = 1.
// f = 0 inside a hard core.
struct DysonF {
  InteractionPotential v;
  double a = 0.0;
  double a_error = 0.0;
  double b = 0.0;
  double eps = 0.0;
  double core = 0.0;
  // Samples on [core, b]; segments [segment_start[k], segment_start[k+1]] are
  // uniform with an even number of steps.
  std::vector<RadialSample> f_samples;
  std::vector<RadialSample> df_samples;
  std::vector<std::size_t> segment_start;

  /// Piecewise-linear interpolant of the samples.
  double operator()(double r) const;
};

/// Throws DomainError unless b > a.
DysonF build_dyson_f(const InteractionPotential& v, double b, const ScatteringOptions& opts = {});

struct DysonIngredients {
  double I = 0.0;  // int (1 - f^2) d^3x
  double J = 0.0;  // 1/2 int (2 f'^2 + v f^2) d^3x
  double K = 0.0;  // int f f' d^3x
  double e_tilde = 0.0;
  double quadrature_error = 0.0;  // applies to each of I, J, K
  // Analytic estimates from u convex.
  double I_bound = 0.0;
  double J_bound = 0.0;
  double K_bound = 0.0;
  double eps_bound = 0.0;  // a / (b - a)
  double a = 0.0;
  double b = 0.0;
  double eps = 0.0;
};

/// I, J, K of fd plus e~ = (T + P)/N from the GP solution.
DysonIngredients dyson_ingredients(const DysonF& fd, const GpSolution& sol);

struct DysonUpperBound {
  double value = 0.0;
  double kinetic_factor = 1.0;      // (1 - a/b)^-3
  double interaction_factor = 1.0;  // [1 + (2/c)x - (2/c)x^2 + x^3/(2c)] / (1-x)^8
  double a_over_b = 0.0;
  double b = 0.0;
  double c = 1.0;
  double density_condition = 0.0;  // (4 pi/3) a^3 ||rho||_inf, must be < 1
};

/// Explicit bound from the GP solution alone. Throws DomainError if
/// (4 pi/3) a^3 ||rho||_inf >= 1.
DysonUpperBound dyson_upper_bound(const GpSolution& sol);

/// b from (4 pi/3) rho_bar b^3 = rho_bar / ||rho||_inf.
double dyson_b(const GpSolution& sol);

/// Per-particle form with computed I, J, K; +infinity when int g^2 <= N I.
double dyson_energy_per_particle(const DysonIngredients& in, const GpSolution& sol);

/// f'^2 + v f^2 / 2 >= 0 on the samples (and v >= 0 past b). Potentials with
/// v >= 0 pass trivially.
bool check_soft_core_condition(const InteractionPotential& v, const DysonF& fd);
/// Builds f itself; a scattering regime failure counts as false.
bool check_soft_core_condition(const InteractionPotential& v, double b,
                               const ScatteringOptions& opts = {});

struct EstarOptions {
  double p_start = 64.0;
  double p_max = 1024.0;
  double gap_tolerance = 1e-3;  // relative gap between smoothed and true sup
  // Residual floor for each stage; q^p weights lose digits as p grows.
  double tolerance = 1e-6;
};

// Minimum of T + P + 8 pi a ||Phi||_inf^2 N with ||Phi||^2 = N, approached
// with ||Phi||_inf^2 replaced by the moment ratio M_p^2 <= ||Phi||_inf^2.
struct EstarResult {
  double value = 0.0;  // E* at Phi_p with the true sup norm: an upper value
  double lower = 0.0;  // smoothed functional at Phi_p
  double gap = 0.0;    // (value - lower) / value
  double p = 0.0;
  double sup_squared = 0.0;  // ||Phi_p||_inf^2
  double rho_bar = 0.0;      // int Phi^4 / N
  double kinetic = 0.0;
  double trap = 0.0;
  double N = 0.0;
  double a = 0.0;
  int iterations = 0;
  bool converged = false;
  WaveField phi;
};

EstarResult estar_minimize(const TrapPotential& V, double a, double N, const Grid& grid,
                           const SolverOptions& opts = {}, const EstarOptions& eopts = {});

// Per-particle chemical potential bound (E*(1,Na)) (1+eps)^2 / (1 - ||rho*||_inf I)
// at a, with eps <= a/(b-a), I <= 4 pi (a^3/3 + a b (b-a)), minimized over b.
struct ChemicalPotentialBound {
  double estar_unit = 0.0;  // E*(1, Na)
  double rho_max = 0.0;     // ||Phi*||_inf^2 at unit norm
  double a = 0.0;
  double b = 0.0;
  double factor = 0.0;
  double value = 0.0;
  bool valid = false;
};

ChemicalPotentialBound chemical_potential_bound(const EstarResult& unit, double a);

struct HomogeneousLowerBound {
  double value = 0.0;
  double Y = 0.0;
  double correction = 0.0;  // C Y^exponent
  double C = 8.9;
  double exponent = 1.0 / 17.0;
  bool valid = false;
};

/// 4 pi a (N^2/L^3)(1 - C Y^exponent), Y = a^3 N / L^3. valid requires
/// Y < 1e-2, L/a > 10 Y^{-6/17} and C Y^exponent < 1.
HomogeneousLowerBound homogeneous_lower_bound(double N, double L, double a, double C = 8.9,
                                              double exponent = 1.0 / 17.0);

struct AssembledLowerBound {
  double value = 0.0;
  double E_R = 0.0;
  double defect = 0.0;  // 4 pi a rho_bar N - 4 pi a sum rho_max^3 L^3 / (rho_min (1 - C Y^e))
  double L = 0.0;
  double Y = 0.0;
  double correction = 0.0;
  double max_ratio = 1.0;  // largest rho_max / rho_min over cells
  double rho_min = 0.0;    // smallest over cells
  int cells = 0;
  bool valid = false;  // 1 - C Y^e > 0
};

/// Cell decomposition of a converged Neumann-box solution into cubes of side L.
/// Throws DomainError unless the grid is a Neumann cartesian grid with L a
/// multiple of h dividing 2R, or if some cell has rho_min = 0.
AssembledLowerBound assemble_box_lower_bound(const GpSolution& sol_R, double L, double C = 8.9,
                                             double exponent = 1.0 / 17.0);

/// The solution at (N0, a0) mapped to (N, a0 N0 / N) by the scaling identities.
GpSolution scaled_solution(const GpSolution& sol, double N);

struct SandwichOptions {
  Grid gp_grid{GridKind::radial, 0.02, 8.0, Boundary::decay};
  double box_R = 4.0;
  double box_h = 0.125;
  double L = 0.5;
  double C = 8.9;
  double exponent = 1.0 / 17.0;
  SolverOptions solver{};
  ScatteringOptions scattering{};
  EstarOptions estar{};
};

struct BoundReport {
  double N = 0.0;
  double a = 0.0;
  double a1 = 0.0;
  double scattering_length = 0.0;  // computed for the rescaled potential
  double scattering_error = 0.0;
  double gp_reference = 0.0;
  double gp_mu = 0.0;
  DysonIngredients ingredients;
  DysonUpperBound upper;
  double upper_computed = 0.0;  // N times the per-particle form with computed I, J, K
  bool soft_core_ok = true;
  double estar = 0.0;           // E*(N, a)
  ChemicalPotentialBound chemical;
  bool confinement_ok = false;  // V(box_R) >= chemical potential bound
  HomogeneousLowerBound lower_homogeneous;
  AssembledLowerBound lower_assembled;
  double upper_gap = 0.0;  // upper / gp - 1
  double lower_gap = 0.0;  // 1 - lower / gp
  bool ordered = false;
  bool complete = true;
  std::vector<std::string> notes;

  /// Every validity flag, including ordering and completeness.
  bool valid() const;
};

/// Reports for each N at a = a1/N, sharing the unit GP, box and E* solves.
std::vector<BoundReport> sandwich_sweep(const TrapPotential& V, const InteractionPotential& v1,
                                        double a1, const std::vector<double>& Ns,
                                        const SandwichOptions& opts = {});
BoundReport sandwich_report(const TrapPotential& V, const InteractionPotential& v1, double a1,
                            double N, const SandwichOptions& opts = {});

}  // namespace gpb
