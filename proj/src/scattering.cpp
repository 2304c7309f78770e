#include "gpb/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gpb/error.hpp"

namespace gpb {

namespace {

struct Run {
  std::vector<double> r, u, du;
  std::vector<std::size_t> seg;
};

// One RK4 sweep over the given cut points with n[k] steps in segment k.
// The potential is sampled strictly inside each segment so that jumps at
// the cuts are seen from the correct side.
Run rk4(const InteractionPotential& v, const std::vector<double>& cuts,
        const std::vector<int>& n) {
  Run out;
  std::size_t total = 1;
  for (int k : n) total += static_cast<std::size_t>(k);
  out.r.reserve(total);
  out.u.reserve(total);
  out.du.reserve(total);
  double u = 0.0, du = 1.0;
  out.r.push_back(cuts.front());
  out.u.push_back(u);
  out.du.push_back(du);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    out.seg.push_back(out.r.size() - 1);
    const double lo = cuts[s], hi = cuts[s + 1];
    const double in_lo = std::nextafter(lo, hi), in_hi = std::nextafter(hi, lo);
    auto half_v = [&](double r) { return 0.5 * v(std::clamp(r, in_lo, in_hi)); };
    const double h = (hi - lo) / n[s];
    for (int i = 0; i < n[s]; ++i) {
      const double r0 = lo + i * h;
      const double vm = half_v(r0 + 0.5 * h);
      const double k1u = du, k1d = half_v(r0) * u;
      const double k2u = du + 0.5 * h * k1d, k2d = vm * (u + 0.5 * h * k1u);
      const double k3u = du + 0.5 * h * k2d, k3d = vm * (u + 0.5 * h * k2u);
      const double k4u = du + h * k3d, k4d = half_v(r0 + h) * (u + h * k3u);
      u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
      out.r.push_back(i + 1 == n[s] ? hi : r0 + h);
      out.u.push_back(u);
      out.du.push_back(du);
    }
  }
  out.seg.push_back(out.r.size() - 1);
  return out;
}

void check_regime(const Run& run) {
  for (std::size_t i = 1; i < run.r.size(); ++i) {
    if (!(run.u[i] > 0.0))
      throw ScatteringRegimeError(
          "negative or undefined scattering regime: u vanishes at r=" + std::to_string(run.r[i]) +
          " beyond the core");
    if (!(run.du[i] > 0.0))
      throw ScatteringRegimeError(
          "negative or undefined scattering regime: u' <= 0 at r=" + std::to_string(run.r[i]));
  }
}

}  // namespace

ZeroEnergySolution integrate_zero_energy(const InteractionPotential& v, double r_max, int steps,
                                         std::span<const double> extra_breakpoints) {
  if (steps < 100) throw DomainError("integrate_zero_energy needs at least 100 steps");
  const double start = v.core_radius();
  if (!(r_max > start)) throw DomainError("r_max must exceed the core radius");

  std::vector<double> cuts{start};
  double last_feature = start;
  for (double b : v.breakpoints()) {
    if (b > start && b < r_max) cuts.push_back(b);
    if (b < r_max) last_feature = std::max(last_feature, b);
  }
  for (double b : extra_breakpoints)
    if (b > start && b < r_max) cuts.push_back(b);
  // Geometric cuts past the last feature keep the step proportional to r
  // across long tails.
  const double scale = last_feature > 0.0 ? last_feature : v.length_scale();
  for (double g = 2.0 * std::max(scale, start); g < r_max; g *= 2.0) cuts.push_back(g);
  cuts.push_back(r_max);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> weight(cuts.size() - 1);
  double wsum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    weight[k] = (cuts[k + 1] - cuts[k]) / std::max(cuts[k], scale);
    wsum += weight[k];
  }
  std::vector<int> n(weight.size()), n2(weight.size());
  for (std::size_t k = 0; k < weight.size(); ++k) {
    int m = static_cast<int>(std::ceil(steps * weight[k] / wsum));
    m = std::max(m, 16);
    n[k] = m + (m % 2);
    n2[k] = 2 * n[k];
  }

  Run coarse = rk4(v, cuts, n);
  check_regime(coarse);
  Run fine = rk4(v, cuts, n2);
  check_regime(fine);

  const double norm_c = coarse.du.back(), norm_f = fine.du.back();
  ZeroEnergySolution sol;
  sol.start = start;
  sol.r_max = r_max;
  sol.segment_start = coarse.seg;
  sol.steps = static_cast<int>(coarse.r.size() - 1);
  double max_err = 0.0;
  for (std::size_t k = 0; k + 1 < coarse.seg.size(); ++k) {
    for (std::size_t i = coarse.seg[k]; i <= coarse.seg[k + 1]; ++i) {
      const std::size_t j = fine.seg[k] + 2 * (i - coarse.seg[k]);
      const double du = std::abs(coarse.u[i] / norm_c - fine.u[j] / norm_f);
      max_err = std::max(max_err, du);
    }
  }
  for (std::size_t i = 0; i < coarse.r.size(); ++i) {
    coarse.u[i] /= norm_c;
    coarse.du[i] /= norm_c;
  }
  const double h_c = r_max - coarse.u.back() / coarse.du.back();
  const double h_f = r_max - fine.u.back() / fine.du.back();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  // Coarse error is about 16/15 of the coarse-fine difference for a 4th order method.
  sol.max_local_error = 16.0 / 15.0 * max_err + 64.0 * eps * r_max;
  sol.h_end_error = 16.0 / 15.0 * std::abs(h_c - h_f) + 64.0 * eps * std::max(r_max, 1.0);
  sol.r = std::move(coarse.r);
  sol.u = std::move(coarse.u);
  sol.du = std::move(coarse.du);
  return sol;
}

double spruch_rosenberg(const InteractionPotential& v) {
  if (v.has_core()) return std::numeric_limits<double>::infinity();
  return tail_integral(v, 0.0);
}

double suggest_outer_radius(const InteractionPotential& v, double tolerance) {
  double R = std::max(v.length_scale(), v.core_radius());
  for (double b : v.breakpoints()) R = std::max(R, b);
  const double support = v.support_end();
  if (std::isfinite(support)) return std::max(R, support);
  for (int i = 0; i < 400 && tail_integral(v, R) > tolerance; ++i) R *= 2.0;
  return R;
}

ScatteringResult scattering_length(const ZeroEnergySolution& sol, const InteractionPotential& v,
                                   double tolerance) {
  const std::size_t n = sol.r.size();
  if (n < 2) throw DomainError("empty zero-energy solution");
  const double h_end = sol.r_max - sol.u.back() / sol.du.back();
  const double tail = tail_integral(v, sol.r_max);
  if (tail > tolerance) {
    const double suggested = suggest_outer_radius(v, tolerance);
    throw RangeTooShortError("scattering bracket width " + std::to_string(tail) +
                                 " exceeds tolerance; increase r_max to at least " +
                                 std::to_string(suggested),
                             suggested);
  }

  ScatteringResult res;
  res.a_lower = h_end;
  res.a_upper = h_end + tail;
  res.a = h_end + 0.5 * tail;
  res.a_error = 0.5 * tail + sol.h_end_error;
  res.r_used = sol.r_max;
  res.steps = sol.steps;
  res.max_local_error = sol.max_local_error;
  res.certificate.h_at_rmax = h_end;
  res.certificate.tail_bound = tail;
  res.certificate.sr_bound = v.nonnegative() ? spruch_rosenberg(v)
                                             : std::numeric_limits<double>::quiet_NaN();
  res.certificate.integrator_error = sol.h_end_error;
  if (!v.nonnegative() && res.a <= 0.0)
    throw ScatteringRegimeError("negative or undefined scattering regime: a = " +
                                std::to_string(res.a));

  res.u_samples.reserve(n);
  res.du_samples.reserve(n);
  res.h_samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    res.u_samples.push_back({sol.r[i], sol.u[i]});
    res.du_samples.push_back({sol.r[i], sol.du[i]});
    res.h_samples.push_back({sol.r[i], sol.r[i] - sol.u[i] / sol.du[i]});
  }
  return res;
}

ScatteringResult compute_scattering(const InteractionPotential& v, const ScatteringOptions& opts) {
  double r_max = opts.r_max;
  if (r_max <= 0.0) {
    r_max = suggest_outer_radius(v, opts.tolerance);
    r_max = std::max(2.0 * r_max, v.core_radius() + v.length_scale());
  }
  const ZeroEnergySolution sol = integrate_zero_energy(v, r_max, opts.steps);
  return scattering_length(sol, v, opts.tolerance);
}

Truncation truncate_with_certificate(const InteractionPotential& v, double Rt) {
  return {v.truncated(Rt), tail_integral(v, Rt)};
}

double truncation_lower_estimate(const InteractionPotential& v, double a, double Rt) {
  const double lo = std::max({Rt, a, v.core_radius()});
  const double hi = v.support_end();
  if (!(hi > lo)) return 0.0;
  auto f = [&](double r) { return 0.5 * v(r) * (r - a) * (r - a); };
  const auto bps = v.breakpoints();
  return integrate(f, lo, hi, {}, bps).value;
}

}  // namespace gpb
