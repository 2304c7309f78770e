#pragma once

#include <span>
#include <vector>

#include "gpb/potentials.hpp"

namespace gpb {

// Samples of the zero-energy solution -u'' + v u / 2 = 0 with u = 0 at the
// core edge (or origin), normalized so that u'(r_max) = 1.
struct ZeroEnergySolution {
  std::vector<double> r;
  std::vector<double> u;
  std::vector<double> du;
  // Index ranges [segment_start[k], segment_start[k+1]] are uniform
  // sub-grids with an even number of steps, split at potential breakpoints.
  std::vector<std::size_t> segment_start;
  double start = 0.0;
  double r_max = 0.0;
  int steps = 0;
  // Differences against a run with twice the steps.
  double max_local_error = 0.0;
  double h_end_error = 0.0;
};

/// Fixed-step RK4 on segments between breakpoints. steps >= 100. Throws
/// ScatteringRegimeError if u vanishes beyond the core or u' <= 0.
ZeroEnergySolution integrate_zero_energy(const InteractionPotential& v, double r_max, int steps,
                                         std::span<const double> extra_breakpoints = {});

struct ScatteringCertificate {
  double h_at_rmax = 0.0;     // lower end of the bracket
  double tail_bound = 0.0;    // 1/2 int_{r_max}^inf v r^2: bracket width
  double sr_bound = 0.0;      // Spruch-Rosenberg value (infinite with a hard core)
  double integrator_error = 0.0;
};

struct RadialSample {
  double r;
  double value;
};

struct ScatteringResult {
  double a = 0.0;  // bracket midpoint
  double a_lower = 0.0;
  double a_upper = 0.0;
  double a_error = 0.0;  // half bracket width plus integrator error
  std::vector<RadialSample> u_samples;
  std::vector<RadialSample> du_samples;
  std::vector<RadialSample> h_samples;
  double r_used = 0.0;
  ScatteringCertificate certificate;
  int steps = 0;
  double max_local_error = 0.0;
};

/// Reads a off a finished integration: h(r_max) <= a <= h(r_max) + tail bound.
/// Throws RangeTooShortError if the bracket is wider than tolerance.
ScatteringResult scattering_length(const ZeroEnergySolution& sol, const InteractionPotential& v,
                                   double tolerance = 1e-8);

struct ScatteringOptions {
  double r_max = 0.0;  // 0: chosen from the potential's range and tolerance
  int steps = 20000;
  double tolerance = 1e-8;
};

/// Integration plus scattering_length with an automatic outer radius.
ScatteringResult compute_scattering(const InteractionPotential& v,
                                    const ScatteringOptions& opts = {});

/// Smallest radius (doubling search) at which tail_integral drops below tol.
double suggest_outer_radius(const InteractionPotential& v, double tolerance);

/// 1/2 int_0^inf v r^2 dr; +infinity for hard cores.
double spruch_rosenberg(const InteractionPotential& v);

struct Truncation {
  InteractionPotential v;
  double bound;  // a - a_truncated <= bound
};

Truncation truncate_with_certificate(const InteractionPotential& v, double Rt);

/// Lower estimate a - a_truncated >= 1/2 int_{max(Rt,a)}^inf v (r-a)^2 dr.
/// Diagnostic only.
double truncation_lower_estimate(const InteractionPotential& v, double a, double Rt);

}  // namespace gpb
