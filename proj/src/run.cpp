#include "gpb/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <stdexcept>
#include <thread>

#include "gpb/error.hpp"

#ifndef GPB_VERSION
#define GPB_VERSION "unknown"
#endif

namespace gpb {

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers; the first exception
// of each item is stored in errors[i].
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn,
                  std::vector<std::exception_ptr>& errors) {
  errors.assign(n, nullptr);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t count = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

std::string message(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

Json grid_json(const Grid& g) {
  Json j;
  j["kind"] = to_string(g.kind);
  j["h"] = g.h;
  j["R"] = g.R;
  j["boundary"] = to_string(g.boundary);
  return j;
}

bool structural_applies(const GpSolution& sol) {
  return sol.trap.convex() && sol.trap.symmetric();
}

const Table sandwich_table_layout = {
    {"N", "a", "lower", "gp", "upper", "upper_gap", "lower_gap", "upper_computed", "estar",
     "chemical_bound", "Y", "valid"},
    {"particle number", "scattering length a1/N", "assembled box lower bound",
     "GP energy E(N,a)", "explicit upper bound on the many-body energy", "upper/gp - 1",
     "1 - lower/gp", "upper bound with computed I, J, K", "E*(N,a)",
     "per-particle chemical potential bound", "a^3 N / L^3", "1 if every validity flag holds"},
    {}};

std::vector<double> sandwich_row(const BoundReport& r) {
  return {r.N,
          r.a,
          r.lower_assembled.value,
          r.gp_reference,
          r.upper.value,
          r.upper_gap,
          r.lower_gap,
          r.upper_computed,
          r.estar,
          r.chemical.value,
          r.lower_assembled.Y,
          r.valid() ? 1.0 : 0.0};
}

void require_a1(const RunConfig& cfg, const char* cmd) {
  if (!cfg.a1)
    throw ConfigError(std::string(cmd) + " needs physics.a1 (a = a1/N)", "physics.a1");
}

RunReport run_scatter(const RunConfig& cfg) {
  RunReport rep;
  const InteractionPotential v = cfg.interaction.build(cfg.base_dir);
  const ScatteringResult res = compute_scattering(v, cfg.scattering);
  rep.result = to_json(res);
  rep.result["potential"] = v.describe();
  const bool sr_ok = !v.nonnegative() || res.a_lower <= res.certificate.sr_bound;
  rep.result["spruch_rosenberg_holds"] = sr_ok;
  rep.ok = sr_ok;
  rep.table.columns = {"r", "u", "du", "h"};
  rep.table.descriptions = {"radius", "zero-energy solution, u'(r_max) = 1", "u'", "r - u/u'"};
  const std::size_t n = res.u_samples.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 2000);
  for (std::size_t i = 0; i < n; i += stride)
    rep.table.rows.push_back({res.u_samples[i].r, res.u_samples[i].value,
                              res.du_samples[i].value, res.h_samples[i].value});
  if ((n - 1) % stride != 0)
    rep.table.rows.push_back({res.u_samples.back().r, res.u_samples.back().value,
                              res.du_samples.back().value, res.h_samples.back().value});
  return rep;
}

RunReport run_solve(const RunConfig& cfg, const RunOptions& opt) {
  RunReport rep;
  const TrapPotential V = cfg.trap.build(cfg.base_dir);
  const std::size_t n = cfg.N.size();
  std::vector<std::optional<GpSolution>> sols(n);
  std::vector<std::exception_ptr> errors;
  parallel_for(
      n, opt.threads,
      [&](std::size_t i) { sols[i] = minimize(V, cfg.a_for(cfg.N[i]), cfg.N[i], cfg.grid, cfg.solver); },
      errors);

  rep.table.columns = {"N",        "a",           "energy",          "kinetic",
                       "trap",     "interaction", "mu",              "rho_bar",
                       "rho_max",  "residual_gp", "virial_residual", "richardson_error",
                       "energy_extrapolated", "iterations"};
  rep.table.descriptions = {"particle number", "scattering length", "GP energy",
                            "int |grad Phi|^2", "int V Phi^2", "4 pi a int Phi^4",
                            "chemical potential E/N + 4 pi a rho_bar", "int Phi^4 / N",
                            "sup Phi^2", "L2 norm of the GP equation defect",
                            "(2/3)T - (s/3)P + U", "estimate from spacing 2h",
                            "Richardson value (radial grids)", "minimizer iterations"};
  Json list = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) {
      rep.ok = false;
      list.push_back({{"N", cfg.N[i]}, {"error", message(errors[i])}});
      continue;
    }
    const GpSolution& s = *sols[i];
    Json j = to_json(s);
    if (structural_applies(s)) {
      const StructuralChecklist c = structural_assertions(s);
      j["structural"] = to_json(c);
      if (!c.all_ok()) rep.ok = false;
    }
    if (!s.converged || !s.boundary_ok) rep.ok = false;
    list.push_back(std::move(j));
    rep.table.rows.push_back({cfg.N[i], s.a, s.energy, s.parts.kinetic, s.parts.trap,
                              s.parts.interaction, s.mu, s.rho_bar, s.rho_max, s.residual_gp,
                              s.virial_residual, s.richardson_error, s.energy_extrapolated,
                              static_cast<double>(s.iterations)});
  }
  rep.result["solutions"] = std::move(list);
  return rep;
}

RunReport run_tf(const RunConfig& cfg) {
  RunReport rep;
  const TrapPotential V = cfg.trap.build(cfg.base_dir);
  const TfSolution tf = tf_minimize(V, 1.0, 1.0);
  rep.result["tf_unit"] = to_json(tf);
  const auto rows = gp_tf_convergence(V, cfg.Na_list, cfg.solver, cfg.tf_nodes);

  rep.table.columns = {"Na", "E_gp", "ratio", "F_1_Na", "F_1_1", "l2_distance", "upper_bound",
                       "residual_gp"};
  rep.table.descriptions = {"coupling N a",
                            "E^GP(1, Na)",
                            "E^GP(1, Na) / (Na)^{s/(s+3)}",
                            "F(1, Na)",
                            "F(1, 1), the limit of ratio",
                            "L2 distance of the rescaled GP density to the TF density at N = a = 1",
                            "mollified TF trial bound on E^GP(1, Na)",
                            "GP equation defect"};
  Json list = Json::array();
  bool decreasing = true, below = true, upper_ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i > 0 && !(r.ratio < rows[i - 1].ratio)) decreasing = false;
    if (!r.F_below_gp) below = false;
    if (!(r.E_gp <= r.upper_bound)) upper_ok = false;
    rep.table.rows.push_back(
        {r.Na, r.E_gp, r.ratio, r.F, tf.F, r.l2_distance, r.upper_bound, r.residual_gp});
    list.push_back({{"Na", r.Na},
                    {"E_gp", r.E_gp},
                    {"ratio", r.ratio},
                    {"F", r.F},
                    {"l2_distance", r.l2_distance},
                    {"upper_bound", r.upper_bound},
                    {"residual_gp", r.residual_gp},
                    {"F_below_gp", r.F_below_gp}});
  }
  // The limit row.
  const double inf = std::numeric_limits<double>::infinity();
  rep.table.rows.push_back({inf, inf, tf.F, inf, tf.F, 0.0, inf, 0.0});
  const TfGradientBound gb = tf_gradient_bound(V, 1.0);
  rep.result["convergence"] = std::move(list);
  rep.result["gradient_bound"] = {{"delta", gb.delta},
                                  {"tau", gb.tau},
                                  {"functional", gb.functional},
                                  {"gradient_integral", gb.gradient_integral}};
  rep.result["ratio_decreasing"] = decreasing;
  rep.result["F_below_gp"] = below;
  rep.result["gp_below_upper_bound"] = upper_ok;
  rep.ok = decreasing && below && upper_ok;
  return rep;
}

void fill_sandwich(RunReport& rep, const std::vector<BoundReport>& reports,
                   const std::vector<std::string>& failures) {
  rep.table.columns = sandwich_table_layout.columns;
  rep.table.descriptions = sandwich_table_layout.descriptions;
  Json list = Json::array();
  for (const auto& r : reports) {
    list.push_back(to_json(r));
    rep.table.rows.push_back(sandwich_row(r));
    if (!r.valid()) rep.ok = false;
  }
  for (const auto& f : failures) {
    list.push_back({{"error", f}});
    rep.ok = false;
  }
  // Shrinking gaps along an N sweep.
  bool upper_shrinks = true, lower_shrinks = true;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (!(reports[i].upper_gap < reports[i - 1].upper_gap)) upper_shrinks = false;
    if (!(reports[i].lower_gap < reports[i - 1].lower_gap)) lower_shrinks = false;
  }
  rep.result["reports"] = std::move(list);
  rep.result["upper_gap_shrinks"] = upper_shrinks;
  rep.result["lower_gap_shrinks"] = lower_shrinks;
  if (reports.size() > 1 && !(upper_shrinks && lower_shrinks)) rep.ok = false;
}

RunReport run_bounds(const RunConfig& cfg) {
  RunReport rep;
  const TrapPotential V = cfg.trap.build(cfg.base_dir);
  const InteractionPotential v1 = cfg.interaction.build(cfg.base_dir);
  std::vector<BoundReport> reports;
  std::vector<std::string> failures;
  if (cfg.a1) {
    reports = sandwich_sweep(V, v1, *cfg.a1, cfg.N, cfg.sandwich);
  } else {
    for (double N : cfg.N) {
      try {
        reports.push_back(sandwich_report(V, v1, cfg.a_for(N) * N, N, cfg.sandwich));
      } catch (const std::exception& e) {
        failures.push_back("N = " + std::to_string(N) + ": " + e.what());
      }
    }
  }
  fill_sandwich(rep, reports, failures);
  return rep;
}

RunReport run_sandwich(const RunConfig& cfg) {
  require_a1(cfg, "sandwich");
  RunReport rep;
  const TrapPotential V = cfg.trap.build(cfg.base_dir);
  const InteractionPotential v1 = cfg.interaction.build(cfg.base_dir);
  fill_sandwich(rep, sandwich_sweep(V, v1, *cfg.a1, cfg.N, cfg.sandwich), {});
  return rep;
}

// Independent solves per N (no scaling shortcut), fanned out over threads.
RunReport run_sweep(const RunConfig& cfg, const RunOptions& opt) {
  require_a1(cfg, "sweep");
  RunReport rep;
  const TrapPotential V = cfg.trap.build(cfg.base_dir);
  const InteractionPotential v1 = cfg.interaction.build(cfg.base_dir);
  const std::size_t n = cfg.N.size();
  std::vector<std::optional<BoundReport>> reports(n);
  std::vector<double> direct(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::exception_ptr> errors;
  SolverOptions solver = cfg.solver;
  solver.richardson = false;
  parallel_for(
      n, opt.threads,
      [&](std::size_t i) {
        const double N = cfg.N[i];
        direct[i] = minimize(V, *cfg.a1 / N, N, cfg.grid, solver).energy;
        reports[i] = sandwich_report(V, v1, *cfg.a1, N, cfg.sandwich);
      },
      errors);
  std::vector<BoundReport> done;
  std::vector<std::string> failures;
  Json scaling = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) {
      failures.push_back("N = " + std::to_string(cfg.N[i]) + ": " + message(errors[i]));
      continue;
    }
    scaling.push_back({{"N", cfg.N[i]},
                       {"gp_direct", direct[i]},
                       {"gp_scaled", reports[i]->gp_reference},
                       {"relative_difference",
                        std::abs(direct[i] - reports[i]->gp_reference) / direct[i]}});
    done.push_back(*reports[i]);
  }
  fill_sandwich(rep, done, failures);
  rep.table.columns.push_back("gp_direct");
  rep.table.descriptions.push_back("GP energy solved directly at (N, a1/N)");
  for (std::size_t i = 0, k = 0; i < n; ++i)
    if (!errors[i]) rep.table.rows[k++].push_back(direct[i]);
  rep.result["scaling"] = std::move(scaling);
  return rep;
}

}  // namespace

Command parse_command(const std::string& s) {
  if (s == "scatter") return Command::scatter;
  if (s == "solve") return Command::solve;
  if (s == "tf") return Command::tf;
  if (s == "bounds") return Command::bounds;
  if (s == "sweep") return Command::sweep;
  if (s == "sandwich") return Command::sandwich;
  throw std::invalid_argument("unknown command '" + s + "'");
}

const char* to_string(Command c) {
  switch (c) {
    case Command::scatter:
      return "scatter";
    case Command::solve:
      return "solve";
    case Command::tf:
      return "tf";
    case Command::bounds:
      return "bounds";
    case Command::sweep:
      return "sweep";
    case Command::sandwich:
      return "sandwich";
  }
  return "?";
}

const char* version() { return GPB_VERSION; }

RunReport run(Command command, const RunConfig& cfg, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  switch (command) {
    case Command::scatter:
      rep = run_scatter(cfg);
      break;
    case Command::solve:
      rep = run_solve(cfg, opt);
      break;
    case Command::tf:
      rep = run_tf(cfg);
      break;
    case Command::bounds:
      rep = run_bounds(cfg);
      break;
    case Command::sweep:
      rep = run_sweep(cfg, opt);
      break;
    case Command::sandwich:
      rep = run_sandwich(cfg);
      break;
  }
  rep.command = to_string(command);
  rep.provenance["config_hash"] = hex64(fnv1a64(cfg.canonical));
  rep.provenance["version"] = version();
  rep.provenance["grid"] = grid_json(cfg.grid);
  if (opt.timing)
    rep.provenance["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

Json to_json(const GpSolution& s, bool with_values) {
  Json j;
  Json phi;
  phi["grid"] = grid_json(s.phi.grid);
  phi["N"] = s.phi.N;
  if (with_values && s.phi.values.size() <= 100000) {
    Json v = Json::array();
    for (double x : s.phi.values) v.push_back(number(x));
    phi["values"] = std::move(v);
  }
  j["phi"] = std::move(phi);
  j["trap"] = s.trap.describe();
  j["a"] = s.a;
  j["parts"] = {{"kinetic", number(s.parts.kinetic)},
                {"trap", number(s.parts.trap)},
                {"interaction", number(s.parts.interaction)}};
  j["energy"] = number(s.energy);
  j["mu"] = number(s.mu);
  j["rho_bar"] = number(s.rho_bar);
  j["rho_max"] = number(s.rho_max);
  j["residual_gp"] = number(s.residual_gp);
  j["virial_residual"] = number(s.virial_residual);
  j["iterations"] = s.iterations;
  j["converged"] = s.converged;
  j["positivity_floor_hit"] = s.positivity_floor_hit;
  j["boundary_ok"] = s.boundary_ok;
  j["richardson_error"] = number(s.richardson_error);
  j["energy_extrapolated"] = number(s.energy_extrapolated);
  j["tolerance"] = s.tolerance;
  return j;
}

Json to_json(const ScatteringResult& r) {
  Json j;
  j["a"] = number(r.a);
  j["a_lower"] = number(r.a_lower);
  j["a_upper"] = number(r.a_upper);
  j["a_error"] = number(r.a_error);
  j["r_used"] = r.r_used;
  j["steps"] = r.steps;
  j["max_local_error"] = number(r.max_local_error);
  j["certificate"] = {{"h_at_rmax", number(r.certificate.h_at_rmax)},
                      {"tail_bound", number(r.certificate.tail_bound)},
                      {"sr_bound", number(r.certificate.sr_bound)},
                      {"integrator_error", number(r.certificate.integrator_error)}};
  return j;
}

Json to_json(const TfSolution& t) {
  return {{"mu", t.mu},
          {"F", t.F},
          {"trap_energy", t.trap_energy},
          {"interaction_energy", t.interaction_energy},
          {"support_radius", t.support_radius},
          {"s", t.s},
          {"coef", t.coef},
          {"N", t.N},
          {"a", t.a},
          {"mu_bracket", {t.mu_lo, t.mu_hi}},
          {"norm_bracket", {t.norm_lo, t.norm_hi}}};
}

Json to_json(const StructuralChecklist& c) {
  return {{"positivity", to_string(c.positivity)},
          {"monotonicity", to_string(c.monotonicity)},
          {"log_concavity", to_string(c.log_concavity)},
          {"exponential_tail", to_string(c.exponential_tail)}};
}

Json to_json(const BoundReport& r) {
  Json j;
  j["N"] = r.N;
  j["a"] = r.a;
  j["a1"] = r.a1;
  j["scattering_length"] = {{"value", number(r.scattering_length)},
                            {"error", number(r.scattering_error)}};
  j["gp_reference"] = number(r.gp_reference);
  j["gp_mu"] = number(r.gp_mu);
  const DysonIngredients& in = r.ingredients;
  j["ingredients"] = {{"I", number(in.I)},
                      {"J", number(in.J)},
                      {"K", number(in.K)},
                      {"e_tilde", number(in.e_tilde)},
                      {"quadrature_error", number(in.quadrature_error)},
                      {"I_bound", number(in.I_bound)},
                      {"J_bound", number(in.J_bound)},
                      {"K_bound", number(in.K_bound)},
                      {"eps", number(in.eps)},
                      {"eps_bound", number(in.eps_bound)},
                      {"b", number(in.b)}};
  j["upper"] = {{"value", number(r.upper.value)},
                {"kinetic_factor", number(r.upper.kinetic_factor)},
                {"interaction_factor", number(r.upper.interaction_factor)},
                {"a_over_b", number(r.upper.a_over_b)},
                {"b", number(r.upper.b)},
                {"c", number(r.upper.c)},
                {"density_condition", number(r.upper.density_condition)}};
  j["upper_computed"] = number(r.upper_computed);
  j["soft_core_ok"] = r.soft_core_ok;
  j["estar"] = number(r.estar);
  j["chemical_potential"] = {{"estar_unit", number(r.chemical.estar_unit)},
                             {"rho_max", number(r.chemical.rho_max)},
                             {"b", number(r.chemical.b)},
                             {"factor", number(r.chemical.factor)},
                             {"value", number(r.chemical.value)},
                             {"valid", r.chemical.valid}};
  j["confinement_ok"] = r.confinement_ok;
  j["lower_homogeneous"] = {{"value", number(r.lower_homogeneous.value)},
                            {"Y", number(r.lower_homogeneous.Y)},
                            {"C", r.lower_homogeneous.C},
                            {"exponent", r.lower_homogeneous.exponent},
                            {"correction", number(r.lower_homogeneous.correction)},
                            {"valid", r.lower_homogeneous.valid}};
  const AssembledLowerBound& lo = r.lower_assembled;
  j["lower_assembled"] = {{"value", number(lo.value)},
                          {"E_R", number(lo.E_R)},
                          {"defect", number(lo.defect)},
                          {"L", lo.L},
                          {"Y", number(lo.Y)},
                          {"correction", number(lo.correction)},
                          {"max_ratio", number(lo.max_ratio)},
                          {"rho_min", number(lo.rho_min)},
                          {"cells", lo.cells},
                          {"valid", lo.valid}};
  j["upper_gap"] = number(r.upper_gap);
  j["lower_gap"] = number(r.lower_gap);
  j["ordered"] = r.ordered;
  j["complete"] = r.complete;
  j["valid"] = r.valid();
  j["notes"] = r.notes;
  return j;
}

}  // namespace gpb
