// Pseudo-spectral discretization on the cube [-R, R]^3.
//   neumann: all (2n+1)^3 nodes, cosine basis (DCT-I), trapezoid weights;
//   decay:   interior nodes only, sine basis (DST-I), Phi = 0 on the faces.
// The kinetic form is x^T W L x with L the spectral Laplacian, which is
// self-adjoint in the W inner product because the basis is W-orthogonal.

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "discretization.hpp"
#include "gpb/error.hpp"

namespace gpb::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : p(static_cast<double*>(fftw_malloc(n * sizeof(double)))) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* p;
};

class CartesianDiscretization final : public Discretization {
 public:
  CartesianDiscretization(const Grid& grid, const TrapPotential& V)
      : grid_(grid),
        m_(grid.nodes_per_axis()),
        neumann_(grid.boundary == Boundary::neumann),
        ma_(neumann_ ? m_ : m_ - 2),
        total_(ma_ * ma_ * ma_),
        in_(total_),
        out_(total_) {
    const double h = grid.h;
    const double h3 = h * h * h;
    const std::size_t off = neumann_ ? 0 : 1;

    axis_w_.assign(ma_, 1.0);
    if (neumann_) axis_w_.front() = axis_w_.back() = 0.5;
    axis_lambda_.resize(ma_);
    for (std::size_t k = 0; k < ma_; ++k) {
      const double kk = std::numbers::pi * static_cast<double>(neumann_ ? k : k + 1) / (2.0 * grid.R);
      axis_lambda_[k] = kk * kk;
    }
    const double logical = neumann_ ? 2.0 * static_cast<double>(m_ - 1)
                                    : 2.0 * static_cast<double>(ma_ + 1);
    inv_norm_ = 1.0 / (logical * logical * logical);

    w_.resize(total_);
    vw_.resize(total_);
    nodal_w_.assign(grid.node_count(), 0.0);
    for (std::size_t i = 0; i < ma_; ++i) {
      const double x = grid.coordinate(i + off);
      for (std::size_t j = 0; j < ma_; ++j) {
        const double y = grid.coordinate(j + off);
        for (std::size_t k = 0; k < ma_; ++k) {
          const double z = grid.coordinate(k + off);
          const std::size_t idx = (i * ma_ + j) * ma_ + k;
          w_[idx] = h3 * axis_w_[i] * axis_w_[j] * axis_w_[k];
          vw_[idx] = w_[idx] * V(x, y, z);
          nodal_w_[node_index(idx)] = w_[idx];
        }
      }
    }

    const int n = static_cast<int>(ma_);
    const fftw_r2r_kind kind = neumann_ ? FFTW_REDFT00 : FFTW_RODFT00;
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_r2r_3d(n, n, n, in_.p, out_.p, kind, kind, kind, FFTW_ESTIMATE);
    if (!plan_) throw DomainError("FFTW could not create a transform plan");
    set_shift(1.0);
  }

  ~CartesianDiscretization() override {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }

  std::size_t size() const override { return total_; }

  void apply_kinetic(const Vec& x, Vec& out) const override {
    spectral(x, out, [](double lam) { return lam; });
    for (std::size_t i = 0; i < total_; ++i) out[i] *= w_[i];
  }

  void apply_trap(const Vec& x, Vec& out) const override {
    out.resize(total_);
    for (std::size_t i = 0; i < total_; ++i) out[i] = vw_[i] * x[i];
  }

  void apply_mass(const Vec& x, Vec& out) const override {
    out.resize(total_);
    for (std::size_t i = 0; i < total_; ++i) out[i] = w_[i] * x[i];
  }

  void solve_mass(const Vec& r, Vec& out) const override {
    out.resize(total_);
    for (std::size_t i = 0; i < total_; ++i) out[i] = r[i] / w_[i];
  }

  void precondition(const Vec& r, Vec& out) const override {
    Vec tmp(total_);
    for (std::size_t i = 0; i < total_; ++i) tmp[i] = r[i] / w_[i];
    const double s = shift_;
    spectral(tmp, out, [s](double lam) { return 1.0 / (lam + s); });
  }

  void set_shift(double sigma) override { shift_ = std::max(sigma, 1e-3); }

  double quartic(const Vec& x) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < total_; ++i) {
      const double x2 = x[i] * x[i];
      s += w_[i] * x2 * x2;
    }
    return s;
  }

  void quartic_gradient(const Vec& x, Vec& out) const override {
    out.resize(total_);
    for (std::size_t i = 0; i < total_; ++i) out[i] = 4.0 * w_[i] * x[i] * x[i] * x[i];
  }

  std::array<double, 5> quartic_line(const Vec& x, const Vec& d) const override {
    std::array<double, 5> c{};
    for (std::size_t i = 0; i < total_; ++i) {
      const double a = x[i], b = d[i], w = w_[i];
      const double a2 = a * a, b2 = b * b;
      c[0] += w * a2 * a2;
      c[1] += w * 4.0 * a2 * a * b;
      c[2] += w * 6.0 * a2 * b2;
      c[3] += w * 4.0 * a * b2 * b;
      c[4] += w * b2 * b2;
    }
    return c;
  }

  Vec nodal(const Vec& x) const override {
    if (neumann_) return x;
    Vec phi(grid_.node_count(), 0.0);
    for (std::size_t i = 0; i < total_; ++i) phi[node_index(i)] = x[i];
    return phi;
  }

  void nodal_adjoint(const Vec& g, Vec& out) const override {
    out.resize(total_);
    for (std::size_t i = 0; i < total_; ++i) out[i] = g[node_index(i)];
  }

  Vec from_nodal(const Vec& phi) const override {
    if (phi.size() != grid_.node_count())
      throw DomainError("wave field size does not match the cartesian grid");
    Vec x(total_);
    for (std::size_t i = 0; i < total_; ++i) x[i] = phi[node_index(i)];
    return x;
  }

  const Vec& moment_weights() const override { return nodal_w_; }

  double sup(const Vec& x) const override {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
  }

  const Grid& grid() const override { return grid_; }

 private:
  std::size_t node_index(std::size_t active) const {
    if (neumann_) return active;
    const std::size_t k = active % ma_;
    const std::size_t j = (active / ma_) % ma_;
    const std::size_t i = active / (ma_ * ma_);
    return ((i + 1) * m_ + (j + 1)) * m_ + (k + 1);
  }

  template <class F>
  void spectral(const Vec& x, Vec& out, F&& multiplier) const {
    std::copy(x.begin(), x.end(), in_.p);
    fftw_execute_r2r(plan_, in_.p, out_.p);
    for (std::size_t i = 0; i < ma_; ++i)
      for (std::size_t j = 0; j < ma_; ++j)
        for (std::size_t k = 0; k < ma_; ++k) {
          const std::size_t idx = (i * ma_ + j) * ma_ + k;
          out_.p[idx] *=
              multiplier(axis_lambda_[i] + axis_lambda_[j] + axis_lambda_[k]) * inv_norm_;
        }
    fftw_execute_r2r(plan_, out_.p, in_.p);
    out.assign(in_.p, in_.p + total_);
  }

  Grid grid_;
  std::size_t m_;
  bool neumann_;
  std::size_t ma_;
  std::size_t total_;
  mutable FftwBuffer in_, out_;
  fftw_plan plan_ = nullptr;
  Vec axis_w_, axis_lambda_, w_, vw_, nodal_w_;
  double inv_norm_ = 1.0;
  double shift_ = 1.0;
};

}  // namespace

std::unique_ptr<Discretization> make_cartesian_discretization(const Grid& grid,
                                                              const TrapPotential& V) {
  return std::make_unique<CartesianDiscretization>(grid, V);
}

}  // namespace gpb::detail
