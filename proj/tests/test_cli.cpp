#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <map>
#include <random>

#include "gpb/config.hpp"
#include "gpb/error.hpp"
#include "gpb/report.hpp"
#include "gpb/run.hpp"

using namespace gpb;

namespace {

std::optional<std::string> no_env(const std::string&) { return std::nullopt; }

EnvLookup env_from(std::map<std::string, std::string> vars) {
  return [vars](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

ConfigError config_error(const std::string& text, const EnvLookup& env = no_env) {
  try {
    parse_config(text, env);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError");
  return ConfigError("");
}

bool contains(const std::string& s, const std::string& part) {
  return s.find(part) != std::string::npos;
}

double random_value(std::mt19937& rng) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  switch (pick(rng)) {
    case 0:
      return INFINITY;
    case 1:
      return -INFINITY;
    case 2:
      return NAN;
    case 3:
      return 0.0;
    default:
      return mant(rng) * std::pow(10.0, expo(rng));
  }
}

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name, const std::string& text)
      : path(std::filesystem::temp_directory_path() / name) {
    std::ofstream(path) << text;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("defaults") {
  const auto cfg = parse_config("", no_env);
  CHECK(cfg.trap.kind == "harmonic");
  CHECK(cfg.interaction.kind == "hard_sphere");
  CHECK(cfg.N == std::vector<double>{1.0});
  CHECK_FALSE(cfg.a);
  CHECK_FALSE(cfg.a1);
  CHECK(cfg.grid.kind == GridKind::radial);
  CHECK(cfg.tf_nodes == 2000);
  CHECK(cfg.canonical.empty());
  CHECK_THROWS_AS(cfg.a_for(1.0), ConfigError);

  const auto with_a1 = parse_config("[physics]\nN = 10, 100\na1 = 2\n", no_env);
  CHECK(with_a1.a_for(10.0) == doctest::Approx(0.2));
  CHECK(with_a1.a_for(100.0) == doctest::Approx(0.02));
}

TEST_CASE("unknown sections and keys carry line numbers") {
  auto e = config_error("[trap]\nkind = harmonic\n\n[physiks]\nN = 1\n");
  CHECK(e.line() == 4);
  CHECK(contains(e.what(), "physiks"));

  e = config_error("[physics]\nN = 1\nNN = 2\n");
  CHECK(e.line() == 3);
  CHECK(e.field() == "physics.NN");
  CHECK(contains(e.what(), "(line 3)"));
}

TEST_CASE("keys that do not apply to the chosen kind") {
  auto e = config_error("[trap]\nkind = harmonic\ns = 4\n");
  CHECK(e.field() == "trap.s");
  CHECK(e.line() == 3);
  e = config_error("[interaction]\nkind = hard_sphere\nV0 = 2\n");
  CHECK(e.field() == "interaction.V0");
  CHECK(contains(e.what(), "hard_sphere"));
}

TEST_CASE("malformed values and violated invariants") {
  CHECK(config_error("[physics]\na = abc\n").field() == "physics.a");
  CHECK(config_error("[physics]\nN = 1, x\n").field() == "physics.N");
  CHECK(config_error("[physics]\nN = 10, 5\n").field() == "physics.N");
  CHECK(config_error("[physics]\nN = 0, 5\n").field() == "physics.N");
  CHECK(config_error("[physics]\na = 1\na1 = 1\n").field() == "physics.a1");
  CHECK(config_error("[physics]\na = -1\n").field() == "physics.a");
  CHECK(config_error("[solver]\ntolerance = 0.1\n").field() == "solver.tolerance");
  CHECK(config_error("[solver]\ntolerance = 0\n").field() == "solver.tolerance");
  CHECK(config_error("[solver]\nmax_iter = 2.5\n").field() == "solver.max_iter");
  CHECK(config_error("[solver]\nrichardson = maybe\n").field() == "solver.richardson");
  CHECK(config_error("[grid]\nh = 0.5\nR = 8\n").field() == "grid.h");
  CHECK(config_error("[grid]\nkind = polar\n").field() == "grid.kind");
  CHECK(config_error("[scattering]\nsteps = 10\n").field() == "scattering.steps");
  CHECK(config_error("[tf]\nnodes = 8\n").field() == "tf.nodes");
  CHECK(config_error("[trap]\nkind = tabulated\n").field() == "trap.table");
  CHECK(config_error("[interaction]\nkind = power_tail\ncutoff = 5\ntail_coef = 1\n").field() ==
        "interaction.tail_coef");
  CHECK_THROWS_AS(parse_config("[physics\nN = 1\n", no_env), ConfigError);

  // The last valid tolerance is accepted.
  CHECK(parse_config("[solver]\ntolerance = 1e-2\n", no_env).solver.tolerance == 1e-2);
}

TEST_CASE("environment overrides") {
  const auto cfg = parse_config("[physics]\nN = 1\na = 1\n",
                                env_from({{"GPB_PHYSICS_A", "0.5"}, {"GPB_GRID_H", "0.025"}}));
  CHECK(*cfg.a == 0.5);
  CHECK(cfg.grid.h == 0.025);
  CHECK(contains(cfg.canonical, "physics.a = 0.5"));

  const auto e = config_error("", env_from({{"GPB_SOLVER_TOLERANCE", "1"}}));
  CHECK(e.field() == "solver.tolerance");
  CHECK(e.line() == 0);
  CHECK(contains(e.what(), "(environment override)"));

  // Variables for keys outside the schema are not looked at.
  CHECK_NOTHROW(parse_config("", env_from({{"GPB_PHYSICS_NN", "2"}})));
}

TEST_CASE("config_keys lists every section") {
  const auto keys = config_keys();
  for (const char* k : {"trap.kind", "interaction.cutoff", "physics.a1", "grid.boundary",
                        "solver.richardson", "scattering.steps", "bounds.p_start", "tf.nodes",
                        "output.csv"})
    CHECK(std::find(keys.begin(), keys.end(), k) != keys.end());
  for (const auto& k : keys) {
    CHECK(k.find('.') != std::string::npos);
  }
}

TEST_CASE("canonical form ignores layout and comments") {
  const auto a = parse_config("[physics]\nN = 1, 10\na = 1\n[grid]\nh = 0.02\n", no_env);
  const auto b = parse_config(
      "; header\n[grid]\n  h   =   0.02  \n\n[physics]\n# particle numbers\na=1\nN = 1, 10\n",
      no_env);
  CHECK(a.canonical == b.canonical);
  const auto c = parse_config("[physics]\nN = 1, 10\na = 2\n[grid]\nh = 0.02\n", no_env);
  CHECK(a.canonical != c.canonical);
  CHECK(fnv1a64(a.canonical) != fnv1a64(c.canonical));
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
}

TEST_CASE("report round trip on random tables") {
  std::mt19937 rng(2026);
  std::uniform_int_distribution<int> ncol(1, 6), nrow(0, 12);
  for (int k = 0; k < 40; ++k) {
    RunReport rep;
    rep.command = "solve";
    rep.ok = k % 3 != 0;
    rep.provenance["config_hash"] = hex64(fnv1a64(std::to_string(k)));
    const int c = ncol(rng), n = nrow(rng);
    for (int j = 0; j < c; ++j) {
      rep.table.columns.push_back("col" + std::to_string(j));
      rep.table.descriptions.push_back("column number " + std::to_string(j));
    }
    for (int i = 0; i < n; ++i) {
      std::vector<double> row;
      for (int j = 0; j < c; ++j) row.push_back(random_value(rng));
      rep.table.rows.push_back(row);
    }
    rep.result["x"] = number(random_value(rng));

    const auto back = parse_json_report(emit(rep, Format::json));
    CHECK(back == rep);
    CHECK(parse_csv(emit(rep, Format::csv)) == rep.table);
  }
}

TEST_CASE("number encoding") {
  CHECK(number(INFINITY) == "inf");
  CHECK(number(-INFINITY) == "-inf");
  CHECK(number(NAN) == "nan");
  CHECK(to_double(number(0.1)) == 0.1);
  CHECK(std::isnan(to_double(Json("nan"))));
  CHECK(parse_format("csv") == Format::csv);
  CHECK_THROWS(parse_format("xml"));
}

TEST_CASE("empty table gives a header only") {
  RunReport rep;
  rep.command = "scatter";
  rep.table.columns = {"r", "u"};
  rep.table.descriptions = {"radius", "solution"};
  const std::string csv = emit(rep, Format::csv);
  const auto t = parse_csv(csv);
  CHECK(t.columns == rep.table.columns);
  CHECK(t.rows.empty());
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= 1);
  CHECK(csv.back() == '\n');
}

TEST_CASE("solve without interaction") {
  const auto cfg = parse_config("[physics]\nN = 1\na = 0\n", no_env);
  const auto rep = run(Command::solve, cfg);
  CHECK(rep.ok);
  CHECK(rep.command == "solve");
  REQUIRE(rep.result["solutions"].size() == 1);
  const auto& s = rep.result["solutions"][0];
  CHECK(to_double(s["energy"]) == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(s.contains("structural"));
  CHECK(rep.provenance.contains("config_hash"));
  CHECK(rep.provenance.contains("version"));
  CHECK_FALSE(rep.provenance.contains("wall_time_s"));
  REQUIRE(rep.table.rows.size() == 1);
  CHECK(rep.table.rows[0][2] == doctest::Approx(3.0).epsilon(1e-3));

  // Byte-for-byte reproducible.
  const auto again = run(Command::solve, cfg, RunOptions{2, false});
  CHECK(emit(rep, Format::json) == emit(again, Format::json));
  CHECK(emit(rep, Format::csv) == emit(again, Format::csv));
  CHECK(run(Command::solve, cfg, RunOptions{1, true}).provenance.contains("wall_time_s"));
}

TEST_CASE("scatter and tf commands") {
  const auto sc = run(Command::scatter,
                      parse_config("[interaction]\nkind = square_barrier\nV0 = 2\nR0 = 1\n", no_env));
  CHECK(sc.ok);
  CHECK(sc.table.columns.front() == "r");
  CHECK_FALSE(sc.table.rows.empty());

  const auto tf = run(Command::tf, parse_config("[physics]\nNa_list = 1, 10\n[tf]\nnodes = 64\n",
                                                no_env));
  CHECK(tf.result["convergence"].size() == 2);
  CHECK(tf.result["F_below_gp"] == true);
  REQUIRE(tf.table.rows.size() == 3);  // two couplings and the limit row
  CHECK(std::isinf(tf.table.rows[2][0]));
}

TEST_CASE("sandwich and sweep need a1") {
  const auto cfg = parse_config("[physics]\nN = 10\na = 0.1\n", no_env);
  CHECK_THROWS_AS(run(Command::sandwich, cfg), ConfigError);
  CHECK_THROWS_AS(run(Command::sweep, cfg), ConfigError);
  CHECK(parse_command("sweep") == Command::sweep);
  CHECK_THROWS(parse_command("nope"));
}

#ifdef GPB_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GPB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("command line exit codes") {
  const TempFile ok("gpb_cli_ok.ini", "[physics]\nN = 1\na = 0\n");
  const TempFile bad_key("gpb_cli_bad.ini", "[physics]\nNN = 1\n");
  const TempFile invalid("gpb_cli_invalid.ini", "[physics]\nN = 1\na = 1\n[solver]\nmax_iter = 1\n");
  const TempFile missing("gpb_cli_missing.ini",
                         "[trap]\nkind = tabulated\ntable = /nonexistent/trap.txt\n[physics]\na = 0\n");
  const auto out = std::filesystem::temp_directory_path() / "gpb_cli_out.csv";

  CHECK(run_cli("solve --config " + ok.path.string()) == 0);
  CHECK(run_cli("solve --format csv --config " + ok.path.string() + " --out " + out.string()) == 0);
  {
    std::ifstream in(out);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(parse_csv(text).rows.size() == 1);
  }
  std::filesystem::remove(out);
  CHECK(run_cli("solve --config " + invalid.path.string()) == 1);
  CHECK(run_cli("solve --config " + bad_key.path.string()) == 2);
  CHECK(run_cli("solve --config " + missing.path.string()) == 3);
  CHECK(run_cli("--version") == 0);
}
#endif
