// gpb: batch front-end for the gpbounds library.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gpb/config.hpp"
#include "gpb/error.hpp"
#include "gpb/run.hpp"

namespace {

void write(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gross-Pitaevskii ground states, scattering lengths and energy bounds"};
  app.set_version_flag("--version", gpb::version());
  app.require_subcommand(1);

  std::string config_path, out_path, format = "json";
  int threads = 1;
  bool timing = false;

  const char* commands[][2] = {
      {"scatter", "zero-energy scattering length with its certificate"},
      {"solve", "GP ground state for each N"},
      {"tf", "Thomas-Fermi limit and the GP convergence table"},
      {"bounds", "upper and lower energy bounds"},
      {"sweep", "independent solves and bounds along N at fixed a1"},
      {"sandwich", "lower <= GP <= upper along N at fixed a1"},
  };
  for (auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("--config", config_path, "INI config file")->required()->check(
        CLI::ExistingFile);
    sub->add_option("--out", out_path, "output file (default: stdout, or [output] paths)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--threads", threads, "worker threads for sweeps")->check(
        CLI::PositiveNumber);
    sub->add_flag("--timing", timing, "record wall time (output no longer byte-reproducible)");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    const gpb::RunConfig cfg = gpb::load_config(config_path);
    const gpb::RunReport rep =
        gpb::run(gpb::parse_command(name), cfg, gpb::RunOptions{threads, timing});
    const gpb::Format fmt = gpb::parse_format(format);
    if (!out_path.empty()) {
      write(out_path, gpb::emit(rep, fmt));
    } else if (!cfg.json_path.empty() || !cfg.csv_path.empty()) {
      if (!cfg.json_path.empty()) write(cfg.json_path, gpb::emit(rep, gpb::Format::json));
      if (!cfg.csv_path.empty()) write(cfg.csv_path, gpb::emit(rep, gpb::Format::csv));
    } else {
      write("-", gpb::emit(rep, fmt));
    }
    if (!rep.ok) std::cerr << "gpb: some validity flags are false\n";
    return rep.ok ? 0 : 1;
  } catch (const gpb::ConfigError& e) {
    std::cerr << "gpb: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gpb: " << e.what() << "\n";
    return 3;
  }
}
