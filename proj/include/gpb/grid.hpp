#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gpb {

enum class GridKind { radial, cartesian };
enum class Boundary { decay, neumann };

// Radial grids have nodes r_i = i h, i = 0..n with n = R/h. Cartesian grids
// cover the cube [-R, R]^3 with m = 2n + 1 nodes per axis, x fastest varying
// last (index = (i m + j) m + k for (x_i, y_j, z_k)).
struct Grid {
  GridKind kind = GridKind::radial;
  double h = 0.02;
  double R = 8.0;
  Boundary boundary = Boundary::decay;

  /// Throws DomainError unless h > 0 and R/h is an integer >= 32.
  void validate() const;
  int n() const;
  std::size_t nodes_per_axis() const;  // radial: n + 1; cartesian: 2n + 1
  std::size_t node_count() const;
  double coordinate(std::size_t i) const;  // radial r_i or cartesian x_i
  Grid coarsened() const;                  // spacing 2h, same extent
  std::string describe() const;
};

const char* to_string(GridKind k);
const char* to_string(Boundary b);

struct WaveField {
  Grid grid;
  std::vector<double> values;  // Phi at every node of the grid
  double N = 1.0;
};

}  // namespace gpb
