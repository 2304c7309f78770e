#include "gpb/grid.hpp"

#include <cmath>
#include <sstream>

#include "gpb/error.hpp"

namespace gpb {

const char* to_string(GridKind k) { return k == GridKind::radial ? "radial" : "cartesian"; }
const char* to_string(Boundary b) { return b == Boundary::decay ? "decay" : "neumann"; }

void Grid::validate() const {
  if (!(h > 0.0) || !(R > 0.0)) throw DomainError("grid needs h > 0 and R > 0");
  const double ratio = R / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * ratio)
    throw DomainError("grid extent R must be an integer multiple of h");
  if (rounded < 32) throw DomainError("grid needs R/h >= 32");
  if (kind == GridKind::radial && boundary == Boundary::neumann)
    throw DomainError("Neumann boundaries are only supported on cartesian grids");
}

int Grid::n() const { return static_cast<int>(std::lround(R / h)); }

std::size_t Grid::nodes_per_axis() const {
  return kind == GridKind::radial ? static_cast<std::size_t>(n()) + 1
                                  : 2 * static_cast<std::size_t>(n()) + 1;
}

std::size_t Grid::node_count() const {
  const std::size_t m = nodes_per_axis();
  return kind == GridKind::radial ? m : m * m * m;
}

double Grid::coordinate(std::size_t i) const {
  return kind == GridKind::radial ? static_cast<double>(i) * h
                                  : -R + static_cast<double>(i) * h;
}

Grid Grid::coarsened() const {
  Grid g = *this;
  g.h = 2.0 * h;
  return g;
}

std::string Grid::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind) << "(h=" << h << ",R=" << R << "," << to_string(boundary) << ")";
  return os.str();
}

}  // namespace gpb
