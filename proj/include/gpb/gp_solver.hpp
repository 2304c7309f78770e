#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpb/grid.hpp"
#include "gpb/potentials.hpp"

namespace gpb {

struct SolverOptions {
  double tolerance = 1e-9;  // on residual_gp / (sqrt(N) max(1, |mu|))
  int max_iter = 20000;
  bool richardson = true;  // extra solve at spacing 2h for an error estimate
  bool verify_uniqueness = false;  // second solve from a different start
};

struct EnergyParts {
  double kinetic = 0.0;      // T = int |grad Phi|^2
  double trap = 0.0;         // P = int V Phi^2
  double interaction = 0.0;  // U = 4 pi a int Phi^4
  double total() const { return kinetic + trap + interaction; }
};

struct GpSolution {
  WaveField phi;
  TrapPotential trap = TrapPotential::harmonic();
  double a = 0.0;
  EnergyParts parts;
  double energy = 0.0;
  double mu = 0.0;
  double rho_bar = 0.0;      // (1/N) int rho^2
  double rho_max = 0.0;      // sup of rho = Phi^2
  double residual_gp = 0.0;  // L2 norm of -Lap Phi + V Phi + 8 pi a Phi^3 - mu Phi
  double virial_residual = 0.0;  // NaN unless V is homogeneous
  int iterations = 0;
  bool converged = false;
  bool positivity_floor_hit = false;
  bool boundary_ok = true;   // decay grids: V(R) >= mu + 20
  // Estimate from a solve at spacing 2h; NaN when not computed.
  double richardson_error = 0.0;
  double energy_extrapolated = 0.0;
  double tolerance = 0.0;
};

/// Energy of an arbitrary field on its grid. Throws DomainError if a < 0 or
/// the discrete norm differs from N by more than norm_tolerance (relative).
EnergyParts evaluate_energy(const WaveField& phi, const TrapPotential& V, double a,
                            double norm_tolerance = 1e-8);

/// Discrete int |Phi|^2 of a field.
double field_norm(const WaveField& phi, const TrapPotential& V);

/// Rescales phi so that its discrete norm equals phi.N.
void normalize(WaveField& phi, const TrapPotential& V);

/// Exact gradient of the discrete energy with respect to the nodal values,
/// restricted to the free unknowns; returned with the unknown vector so that
/// callers can check it against finite differences.
struct DiscreteGradient {
  std::vector<double> unknowns;
  std::vector<double> gradient;
};
DiscreteGradient energy_gradient(const WaveField& phi, const TrapPotential& V, double a);
double energy_of_unknowns(const Grid& grid, const std::vector<double>& unknowns,
                          const TrapPotential& V, double a);

GpSolution minimize(const TrapPotential& V, double a, double N, const Grid& grid,
                    const SolverOptions& opts = {});

struct ChemicalPotential {
  double formula = 0.0;      // E/N + 4 pi a rho_bar
  double finite_diff = 0.0;  // (E(N+dN) - E(N-dN)) / (2 dN)
};
ChemicalPotential chemical_potential(const GpSolution& sol, double dN,
                                     const SolverOptions& opts = {});

/// (2/3) T - (s/3) P + U. Throws DomainError unless the trap is homogeneous.
double virial_residual(const GpSolution& sol, double s);

struct ScalingReport {
  double energy_relative = 0.0;  // |E(N,a) - N E(1,Na)| / E(N,a)
  double density_max = 0.0;      // max |rho_{N,a} - N rho_{1,Na}|
  double density_relative = 0.0; // density_max / max rho_{N,a}
  double energy_N = 0.0;
  double energy_1 = 0.0;
};
ScalingReport check_scaling(const TrapPotential& V, double a, double N, const Grid& grid,
                            const SolverOptions& opts = {});

enum class Check { pass, fail, not_applicable };
const char* to_string(Check c);

struct StructuralChecklist {
  Check positivity = Check::not_applicable;
  Check monotonicity = Check::not_applicable;
  Check log_concavity = Check::not_applicable;
  Check exponential_tail = Check::not_applicable;
  bool all_ok() const;
};
StructuralChecklist structural_assertions(const GpSolution& sol);

struct BoxEnergy {
  double R;
  double energy;
  GpSolution solution;
};
/// Neumann-box solves on cartesian grids of spacing h for each R.
std::vector<BoxEnergy> solve_neumann_box(const TrapPotential& V, double a, double N,
                                         const std::vector<double>& R_sequence, double h,
                                         const SolverOptions& opts = {});

/// Nodal density rho = Phi^2 on the solution grid.
std::vector<double> density(const GpSolution& sol);

}  // namespace gpb
