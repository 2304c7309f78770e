#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gpb/bounds.hpp"
#include "gpb/gp_solver.hpp"
#include "gpb/grid.hpp"
#include "gpb/potentials.hpp"
#include "gpb/scattering.hpp"

namespace gpb {

struct TrapSpec {
  std::string kind = "harmonic";  // harmonic | power | tabulated | zero
  double s = 2.0;
  double coef = 1.0;
  std::string table;
  double growth = 2.0;
  bool convex = false;

  TrapPotential build(const std::string& base_dir = ".") const;
};

struct InteractionSpec {
  // none | hard_sphere | square_barrier | hard_core_well | power_tail | tabulated
  std::string kind = "hard_sphere";
  double d = 1.0;
  double V0 = 2.0;
  double R0 = 1.0;
  double depth = 0.0;
  double coef = 1.0;
  double exponent = 6.0;
  double start = 1.0;
  double core = 0.0;
  std::string table;
  std::optional<PowerTail> tail;
  std::optional<double> cutoff;

  InteractionPotential build(const std::string& base_dir = ".") const;
};

struct RunConfig {
  TrapSpec trap;
  InteractionSpec interaction;
  std::vector<double> N{1.0};
  std::optional<double> a;
  std::optional<double> a1;
  std::vector<double> Na_list{1.0, 10.0, 100.0, 1000.0};
  Grid grid;
  SolverOptions solver;
  ScatteringOptions scattering;
  SandwichOptions sandwich;
  int tf_nodes = 2000;
  std::string json_path;
  std::string csv_path;
  std::string base_dir = ".";
  // "section.key = value" lines of every key that was set, in schema order;
  // the input of the config hash.
  std::string canonical;

  /// Explicit a, or a1 / N. Throws ConfigError if neither is set.
  double a_for(double N) const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Process environment lookup.
std::optional<std::string> process_env(const std::string& name);

/// INI text with sections [trap] [interaction] [physics] [grid] [solver]
/// [scattering] [bounds] [tf] [output]. Every key may be overridden by the
/// variable GPB_<SECTION>_<KEY>. Unknown sections or keys, malformed values
/// and violated invariants throw ConfigError with field and line.
RunConfig parse_config(const std::string& text, const EnvLookup& env = process_env,
                       const std::string& base_dir = ".");
RunConfig load_config(const std::string& path, const EnvLookup& env = process_env);

/// Names of every accepted key as "section.key".
std::vector<std::string> config_keys();

}  // namespace gpb
