#include "gpb/potentials.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

// Boost 1.74's pchip.hpp calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "gpb/error.hpp"

namespace gpb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::function<double(double)> make_pchip(std::vector<double> r, std::vector<double> v) {
  if (r.size() != v.size()) throw DomainError("table columns differ in length");
  if (r.size() < 4) throw DomainError("tabulated potential needs at least 4 samples");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw DomainError("table radii must be strictly increasing");
  auto interp = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
      std::move(r), std::move(v));
  return [interp](double x) { return (*interp)(x); };
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- trap

struct TrapPotential::Table {
  std::function<double(double)> interp;
  double r_last;
  double v_last;
  double growth;
};

TrapPotential TrapPotential::harmonic() {
  TrapPotential t;
  t.kind_ = TrapKind::harmonic;
  t.order_ = 2.0;
  t.check_homogeneity();
  return t;
}

TrapPotential TrapPotential::power(double s, double coef) {
  if (!(s > 0.0)) throw DomainError("power trap needs s > 0");
  if (!(coef > 0.0)) throw DomainError("power trap needs a positive coefficient");
  TrapPotential t;
  t.kind_ = TrapKind::power;
  t.exponent_ = s;
  t.coef_ = coef;
  t.convex_ = s >= 1.0;
  t.order_ = s;
  t.check_homogeneity();
  return t;
}

TrapPotential TrapPotential::tabulated_radial(std::vector<double> r, std::vector<double> v,
                                              double growth_exponent, bool convex) {
  if (r.empty() || r.front() != 0.0) throw DomainError("radial trap table must start at r = 0");
  if (!(growth_exponent > 0.0)) throw DomainError("trap growth exponent must be positive");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0)) throw DomainError("trap values must be nonnegative");
    if (i > 0 && v[i] < v[i - 1]) throw DomainError("radial trap table must be nondecreasing");
  }
  if (!(v.back() > 0.0)) throw DomainError("trap must grow: last tabulated value is zero");
  TrapPotential t;
  t.kind_ = TrapKind::tabulated_radial;
  t.convex_ = convex;
  const double r_last = r.back();
  const double v_last = v.back();
  t.table_ = std::make_shared<Table>(Table{make_pchip(std::move(r), std::move(v)), r_last, v_last,
                                           growth_exponent});
  return t;
}

TrapPotential TrapPotential::zero_in_box() {
  TrapPotential t;
  t.kind_ = TrapKind::zero_in_box;
  t.coef_ = 0.0;
  return t;
}

double TrapPotential::radial(double r) const {
  switch (kind_) {
    case TrapKind::harmonic:
      return r * r;
    case TrapKind::power:
      return coef_ * std::pow(r, exponent_);
    case TrapKind::tabulated_radial:
      if (r <= table_->r_last) return std::max(0.0, table_->interp(r));
      return table_->v_last * std::pow(r / table_->r_last, table_->growth);
    case TrapKind::zero_in_box:
      return 0.0;
  }
  return 0.0;
}

double TrapPotential::operator()(double x, double y, double z) const {
  if (kind_ == TrapKind::harmonic) return x * x + y * y + z * z;
  return radial(std::sqrt(x * x + y * y + z * z));
}

void TrapPotential::check_homogeneity() const {
  if (!order_) return;
  static constexpr std::array<std::array<double, 3>, 3> points{
      {{0.3, 0.7, -1.1}, {1.3, 0.2, 0.5}, {-2.0, 0.9, 0.1}}};
  for (double lambda : {0.5, 2.0}) {
    for (const auto& p : points) {
      const double lhs = (*this)(lambda * p[0], lambda * p[1], lambda * p[2]);
      const double rhs = std::pow(lambda, *order_) * (*this)(p[0], p[1], p[2]);
      if (std::abs(lhs - rhs) > 1e-12 * std::abs(rhs))
        throw DomainError("trap is not homogeneous of the declared order");
    }
  }
}

std::string TrapPotential::describe() const {
  switch (kind_) {
    case TrapKind::harmonic:
      return "harmonic";
    case TrapKind::power:
      return "power(s=" + fmt(exponent_) + ",coef=" + fmt(coef_) + ")";
    case TrapKind::tabulated_radial:
      return "tabulated_radial";
    case TrapKind::zero_in_box:
      return "zero_in_box";
  }
  return "?";
}

// ---------------------------------------------------------------- interaction

InteractionPotential::InteractionPotential(Shape shape, double length_scale, double energy_scale,
                                           std::optional<double> cutoff)
    : shape_(std::move(shape)), length_(length_scale), energy_(energy_scale), cutoff_(cutoff) {
  if (!(length_ > 0.0) || !(energy_ > 0.0))
    throw DomainError("interaction scales must be positive");
  std::visit(
      [this](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HardSphere>) {
          if (!(s.d > 0.0)) throw DomainError("hard-sphere diameter must be positive");
        } else if constexpr (std::is_same_v<T, SquareBarrier>) {
          if (!(s.V0 >= 0.0) || !(s.R0 > 0.0))
            throw DomainError("square barrier needs V0 >= 0 and R0 > 0");
        } else if constexpr (std::is_same_v<T, HardCoreWell>) {
          if (!(s.d > 0.0) || !(s.R0 > s.d)) throw DomainError("hard-core well needs 0 < d < R0");
          if (!s.w) throw DomainError("hard-core well needs a well function");
        } else if constexpr (std::is_same_v<T, TabulatedShape>) {
          if (s.core < 0.0) throw DomainError("core radius must be nonnegative");
          if (!s.r.empty()) {
            if (s.r.front() < s.core) throw DomainError("table starts inside the core");
            table_ = std::make_shared<const std::function<double(double)>>(make_pchip(s.r, s.v));
          }
          if (s.tail) {
            if (!(s.tail->start > 0.0) || s.tail->start < s.core)
              throw DomainError("tail must start beyond the core at positive radius");
            if (!s.r.empty() && s.tail->start < s.r.back())
              throw DomainError("tail must start at or beyond the last table sample");
          }
          if (s.r.empty() && !s.tail) throw DomainError("tabulated potential has no data");
        }
      },
      shape_);
  if (cutoff_ && *cutoff_ < core_radius()) throw DomainError("cutoff lies inside the hard core");
}

InteractionPotential InteractionPotential::none() { return InteractionPotential(FreeShape{}); }

InteractionPotential InteractionPotential::hard_sphere(double d) {
  return InteractionPotential(HardSphere{d});
}

InteractionPotential InteractionPotential::square_barrier(double V0, double R0) {
  return InteractionPotential(SquareBarrier{V0, R0});
}

InteractionPotential InteractionPotential::hard_core_well(double d, double R0, double depth) {
  const double w = -std::abs(depth);
  return InteractionPotential(HardCoreWell{d, R0, [w](double) { return w; }, std::abs(depth)});
}

InteractionPotential InteractionPotential::hard_core_well(double d, double R0,
                                                          std::function<double(double)> w) {
  return InteractionPotential(HardCoreWell{d, R0, std::move(w), 0.0});
}

InteractionPotential InteractionPotential::power_tail(double coef, double p, double start,
                                                      double core) {
  return InteractionPotential(TabulatedShape{{}, {}, core, PowerTail{coef, p, start}});
}

InteractionPotential InteractionPotential::tabulated(std::vector<double> r, std::vector<double> v,
                                                     double core, std::optional<PowerTail> tail) {
  return InteractionPotential(TabulatedShape{std::move(r), std::move(v), core, tail});
}

double InteractionPotential::base(double x) const {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FreeShape>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, HardSphere>) {
          return x <= s.d ? kInf : 0.0;
        } else if constexpr (std::is_same_v<T, SquareBarrier>) {
          return x <= s.R0 ? s.V0 : 0.0;
        } else if constexpr (std::is_same_v<T, HardCoreWell>) {
          if (x <= s.d) return kInf;
          return x <= s.R0 ? -std::abs(s.w(x)) : 0.0;
        } else {
          if (s.core > 0.0 && x <= s.core) return kInf;
          double val = 0.0;
          if (table_ && x >= s.r.front() && x <= s.r.back()) val += (*table_)(x);
          if (s.tail && x >= s.tail->start) val += s.tail->coef * std::pow(x, -s.tail->exponent);
          return val;
        }
      },
      shape_);
}

double InteractionPotential::operator()(double r) const {
  if (cutoff_ && r > *cutoff_) return 0.0;
  return energy_ * base(r / length_);
}

double InteractionPotential::core_radius() const {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HardSphere> || std::is_same_v<T, HardCoreWell>)
          return s.d * length_;
        else if constexpr (std::is_same_v<T, TabulatedShape>)
          return s.core * length_;
        else
          return 0.0;
      },
      shape_);
}

std::optional<PowerTail> InteractionPotential::base_tail() const {
  if (const auto* t = std::get_if<TabulatedShape>(&shape_)) return t->tail;
  return std::nullopt;
}

double InteractionPotential::support_end() const {
  const double end = std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FreeShape>)
          return 0.0;
        else if constexpr (std::is_same_v<T, HardSphere>)
          return s.d;
        else if constexpr (std::is_same_v<T, SquareBarrier>)
          return s.V0 > 0.0 ? s.R0 : 0.0;
        else if constexpr (std::is_same_v<T, HardCoreWell>)
          return s.R0;
        else
          return s.tail ? kInf : std::max(s.core, s.r.back());
      },
      shape_);
  const double scaled = end * length_;
  return cutoff_ ? std::min(scaled, *cutoff_) : scaled;
}

std::optional<double> InteractionPotential::tail_exponent() const {
  if (cutoff_) return std::nullopt;
  if (auto t = base_tail()) return t->exponent;
  return std::nullopt;
}

bool InteractionPotential::nonnegative() const {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HardCoreWell>) {
          return false;
        } else if constexpr (std::is_same_v<T, TabulatedShape>) {
          for (double x : s.v)
            if (x < 0.0) return false;
          return !s.tail || s.tail->coef >= 0.0;
        } else {
          return true;
        }
      },
      shape_);
}

std::vector<double> InteractionPotential::breakpoints() const {
  std::vector<double> out = std::visit(
      [&](const auto& s) -> std::vector<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FreeShape>)
          return {};
        else if constexpr (std::is_same_v<T, HardSphere>)
          return {s.d};
        else if constexpr (std::is_same_v<T, SquareBarrier>)
          return {s.R0};
        else if constexpr (std::is_same_v<T, HardCoreWell>)
          return {s.d, s.R0};
        else {
          std::vector<double> b;
          if (s.core > 0.0) b.push_back(s.core);
          if (!s.r.empty()) {
            b.push_back(s.r.front());
            b.push_back(s.r.back());
          }
          if (s.tail) b.push_back(s.tail->start);
          return b;
        }
      },
      shape_);
  for (double& x : out) x *= length_;
  if (cutoff_) out.push_back(*cutoff_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  out.erase(std::remove_if(out.begin(), out.end(), [](double x) { return !(x > 0.0); }),
            out.end());
  if (cutoff_) out.erase(std::remove_if(out.begin(), out.end(),
                                        [c = *cutoff_](double x) { return x > c; }),
                         out.end());
  return out;
}

std::string InteractionPotential::kind_name() const {
  switch (shape_.index()) {
    case 0:
      return "none";
    case 1:
      return "hard_sphere";
    case 2:
      return "square_barrier";
    case 3:
      return "hard_core_well";
    default:
      return base_tail() && std::get<TabulatedShape>(shape_).r.empty() ? "power_tail"
                                                                       : "tabulated";
  }
}

std::string InteractionPotential::describe() const {
  std::string s = kind_name() + "(length_scale=" + fmt(length_) + ",energy_scale=" + fmt(energy_);
  if (cutoff_) s += ",cutoff=" + fmt(*cutoff_);
  return s + ")";
}

InteractionPotential InteractionPotential::truncated(double Rt) const {
  if (Rt < core_radius()) throw DomainError("truncation radius lies inside the hard core");
  InteractionPotential out = *this;
  out.cutoff_ = cutoff_ ? std::min(*cutoff_, Rt) : Rt;
  return out;
}

InteractionPotential InteractionPotential::rescaled(double length_factor,
                                                    double energy_factor) const {
  InteractionPotential out = *this;
  out.length_ *= length_factor;
  out.energy_ *= energy_factor;
  if (out.cutoff_) *out.cutoff_ *= length_factor;
  return out;
}

InteractionPotential scale_interaction(const InteractionPotential& v1, double a1, double a) {
  if (!(a1 > 0.0) || !(a > 0.0)) throw DomainError("scale_interaction needs a1 > 0 and a > 0");
  const double lambda = a1 / a;
  return v1.rescaled(1.0 / lambda, lambda * lambda);
}

double tail_integral(const InteractionPotential& v, double Rt, const QuadratureTolerance& tol) {
  const double core = v.core_radius();
  if (Rt < core) throw DomainError("tail_integral radius lies inside the hard core");
  if (auto p = v.tail_exponent(); p && *p <= 3.0)
    throw DomainError("scattering length infinite: tail decays like r^-" + std::to_string(*p) +
                      ", need exponent > 3");

  const double support = v.support_end();
  const double L = v.length_scale();
  const double E = v.energy_scale();

  // Analytic power-law piece.
  double analytic = 0.0;
  double numeric_end = support;
  std::optional<PowerTail> tail;
  if (const auto* t = std::get_if<TabulatedShape>(&v.shape())) tail = t->tail;
  if (tail) {
    const double start = tail->start * L;
    const double hi = v.cutoff() ? *v.cutoff() : kInf;
    const double lo = std::max(Rt, start);
    if (hi > lo) {
      const double p = tail->exponent;
      const double pref = 0.5 * E * tail->coef * std::pow(L, p);
      if (p == 3.0) {
        analytic = pref * std::log(hi / lo);
      } else {
        const double upper = std::isinf(hi) ? 0.0 : std::pow(hi, 3.0 - p);
        analytic = pref * (upper - std::pow(lo, 3.0 - p)) / (3.0 - p);
      }
    }
    // The table (if any) ends at or before the tail start.
    const auto& tab = std::get<TabulatedShape>(v.shape());
    numeric_end = tab.r.empty() ? start : std::min(start, tab.r.back() * L);
    if (v.cutoff()) numeric_end = std::min(numeric_end, *v.cutoff());
  }

  double numeric = 0.0;
  if (numeric_end > Rt) {
    // Only the non-tail part is integrated here; the tail starts at or after numeric_end.
    const auto bps = v.breakpoints();
    auto f = [&](double r) { return 0.5 * v(r) * r * r; };
    numeric = integrate(f, Rt, numeric_end, tol, bps).value;
  }
  return numeric + analytic;
}

std::pair<std::vector<double>, std::vector<double>> load_two_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open table file '" + path + "'");
  std::vector<double> a, b;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    double x, y;
    if (!(ls >> x)) continue;
    if (!(ls >> y))
      throw DomainError(path + ":" + std::to_string(lineno) + ": expected two columns");
    a.push_back(x);
    b.push_back(y);
  }
  return {std::move(a), std::move(b)};
}

}  // namespace gpb
