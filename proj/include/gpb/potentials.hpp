#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gpb/quadrature.hpp"

namespace gpb {

// Units throughout: hbar = 2m = 1, so the one-body operator is -Laplacian + V.

enum class TrapKind { harmonic, power, tabulated_radial, zero_in_box };

class TrapPotential {
 public:
  /// V = r^2.
  static TrapPotential harmonic();
  /// V = coef * r^s, s > 0.
  static TrapPotential power(double s, double coef = 1.0);
  /// Radial table starting at r = 0, nondecreasing values, monotone cubic
  /// interpolation; beyond the last sample V grows like r^growth_exponent.
  static TrapPotential tabulated_radial(std::vector<double> r, std::vector<double> v,
                                        double growth_exponent, bool convex = false);
  /// V = 0; only meaningful inside a Neumann box.
  static TrapPotential zero_in_box();

  double operator()(double x, double y, double z) const;
  double radial(double r) const;

  TrapKind kind() const noexcept { return kind_; }
  bool symmetric() const noexcept { return symmetric_; }
  bool convex() const noexcept { return convex_; }
  std::optional<double> homogeneous_order() const noexcept { return order_; }
  double coefficient() const noexcept { return coef_; }
  bool is_zero() const noexcept { return kind_ == TrapKind::zero_in_box; }
  std::string describe() const;

 private:
  struct Table;
  TrapPotential() = default;
  void check_homogeneity() const;

  TrapKind kind_ = TrapKind::harmonic;
  double coef_ = 1.0;
  double exponent_ = 2.0;
  bool symmetric_ = true;
  bool convex_ = true;
  std::optional<double> order_;
  std::shared_ptr<const Table> table_;
};

// Interaction shapes in their own units; InteractionPotential adds the length
// and energy scales used by scale_interaction.
struct FreeShape {};
struct HardSphere {
  double d;
};
struct SquareBarrier {
  double V0;
  double R0;
};
// v = infinity on [0, d], -|w(r)| on (d, R0], 0 beyond.
struct HardCoreWell {
  double d;
  double R0;
  std::function<double(double)> w;
  double depth = 0.0;  // informational, set when w is constant
};
struct PowerTail {
  double coef;
  double exponent;
  double start;
};
// Monotone cubic table on [r.front(), r.back()], optional hard core, optional
// analytic power tail for r >= tail->start (which must be >= r.back()).
struct TabulatedShape {
  std::vector<double> r;
  std::vector<double> v;
  double core = 0.0;
  std::optional<PowerTail> tail;
};

class InteractionPotential {
 public:
  using Shape = std::variant<FreeShape, HardSphere, SquareBarrier, HardCoreWell, TabulatedShape>;

  InteractionPotential() : InteractionPotential(FreeShape{}) {}
  explicit InteractionPotential(Shape shape, double length_scale = 1.0, double energy_scale = 1.0,
                                std::optional<double> cutoff = std::nullopt);

  static InteractionPotential none();
  static InteractionPotential hard_sphere(double d);
  static InteractionPotential square_barrier(double V0, double R0);
  static InteractionPotential hard_core_well(double d, double R0, double depth);
  static InteractionPotential hard_core_well(double d, double R0, std::function<double(double)> w);
  /// coef * r^-p for r >= start, zero below start (outside an optional core).
  static InteractionPotential power_tail(double coef, double p, double start, double core = 0.0);
  static InteractionPotential tabulated(std::vector<double> r, std::vector<double> v,
                                        double core = 0.0,
                                        std::optional<PowerTail> tail = std::nullopt);

  /// +infinity inside the hard core.
  double operator()(double r) const;

  double core_radius() const;
  /// Radius beyond which v vanishes identically (infinity for untruncated tails).
  double support_end() const;
  /// Decay exponent of the analytic tail, if any and not cut off.
  std::optional<double> tail_exponent() const;
  std::optional<double> cutoff() const noexcept { return cutoff_; }
  bool nonnegative() const;
  bool has_core() const { return core_radius() > 0.0; }
  /// Radii where v or its derivative may jump (core edge, barrier edge, table
  /// ends, tail start, cutoff).
  std::vector<double> breakpoints() const;

  double length_scale() const noexcept { return length_; }
  double energy_scale() const noexcept { return energy_; }
  const Shape& shape() const noexcept { return shape_; }
  std::string kind_name() const;
  std::string describe() const;

  /// Same potential with v set to zero beyond radius Rt.
  InteractionPotential truncated(double Rt) const;
  InteractionPotential rescaled(double length_factor, double energy_factor) const;

 private:
  double base(double x) const;  // unscaled shape value at x = r / length_
  std::optional<PowerTail> base_tail() const;

  Shape shape_;
  double length_ = 1.0;
  double energy_ = 1.0;
  std::optional<double> cutoff_;
  std::shared_ptr<const std::function<double(double)>> table_;
};

/// v(r) = (a1/a)^2 v1(a1 r / a): turns a potential of scattering length a1
/// into one of scattering length a.
InteractionPotential scale_interaction(const InteractionPotential& v1, double a1, double a);

/// 1/2 * integral_{Rt}^inf v(r) r^2 dr, with the power-law part done analytically.
double tail_integral(const InteractionPotential& v, double Rt, const QuadratureTolerance& tol = {});

/// Two whitespace-separated columns, '#' starts a comment.
std::pair<std::vector<double>, std::vector<double>> load_two_column(const std::string& path);

}  // namespace gpb
