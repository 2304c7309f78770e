#pragma once

#include <string>

#include "gpb/bounds.hpp"
#include "gpb/config.hpp"
#include "gpb/gp_solver.hpp"
#include "gpb/report.hpp"
#include "gpb/scattering.hpp"
#include "gpb/tf_limit.hpp"

namespace gpb {

enum class Command { scatter, solve, tf, bounds, sweep, sandwich };
Command parse_command(const std::string& s);
const char* to_string(Command c);

struct RunOptions {
  int threads = 1;
  bool timing = false;  // adds wall time to the provenance (breaks byte-for-byte determinism)
};

/// Runs one command. ok is true iff every validity flag of the result holds;
/// failures of individual sweep points are recorded and make ok false.
RunReport run(Command command, const RunConfig& config, const RunOptions& options = {});

const char* version();

Json to_json(const GpSolution& sol, bool with_values = true);
Json to_json(const ScatteringResult& res);
Json to_json(const TfSolution& tf);
Json to_json(const BoundReport& rep);
Json to_json(const StructuralChecklist& c);

}  // namespace gpb
