#include "gpb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace gpb {

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureTolerance& tol, std::span<const double> breakpoints) {
  if (!(hi > lo)) return {};

  std::vector<double> cuts{lo};
  for (double b : breakpoints)
    if (b > lo && b < hi) cuts.push_back(b);
  std::sort(cuts.begin() + 1, cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(hi);

  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  // Requests far below roundoff make the recursion chase its own noise.
  const double gk_tol = std::max(0.1 * tol.relative, 1e-13);
  QuadratureResult total;
  double l1_total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0;
    double l1 = 0.0;
    total.value += GK::integrate(f, cuts[i], cuts[i + 1], 20, gk_tol, &err, &l1);
    total.error += err;
    l1_total += l1;
  }
  const double allowed = std::max(tol.absolute, tol.relative * l1_total);
  if (!(total.error <= allowed) || !std::isfinite(total.value)) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "quadrature did not reach tolerance: error estimate %.3g > %.3g",
                  total.error, allowed);
    throw std::runtime_error(msg);
  }
  return total;
}

}  // namespace gpb
