#include "gpb/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gpb/error.hpp"

namespace gpb {

namespace {

struct Section {
  const char* name;
  std::vector<std::string> keys;
};

const std::vector<Section>& schema() {
  static const std::vector<Section> s = {
      {"trap", {"kind", "s", "coef", "table", "growth", "convex"}},
      {"interaction",
       {"kind", "d", "V0", "R0", "depth", "coef", "exponent", "start", "core", "table",
        "tail_coef", "tail_exponent", "tail_start", "cutoff"}},
      {"physics", {"N", "a", "a1", "Na_list"}},
      {"grid", {"kind", "h", "R", "boundary"}},
      {"solver", {"tolerance", "max_iter", "richardson", "verify_uniqueness"}},
      {"scattering", {"r_max", "steps", "tolerance"}},
      {"bounds",
       {"C", "L", "box_R", "box_h", "exponent", "p_start", "p_max", "gap_tolerance"}},
      {"tf", {"nodes"}},
      {"output", {"json", "csv"}},
  };
  return s;
}

const std::map<std::string, std::set<std::string>> trap_kind_keys = {
    {"harmonic", {}},
    {"power", {"s", "coef"}},
    {"tabulated", {"table", "growth", "convex"}},
    {"zero", {}},
};

const std::map<std::string, std::set<std::string>> interaction_kind_keys = {
    {"none", {}},
    {"hard_sphere", {"d", "cutoff"}},
    {"square_barrier", {"V0", "R0", "cutoff"}},
    {"hard_core_well", {"d", "R0", "depth", "cutoff"}},
    {"power_tail", {"coef", "exponent", "start", "core", "cutoff"}},
    {"tabulated", {"table", "core", "tail_coef", "tail_exponent", "tail_start", "cutoff"}},
};

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

struct Value {
  std::string text;
  int line = 0;  // 0 for environment overrides
};

// Line of "key = ..." inside [section], or of the header when key is empty; 0 when not found.
int find_line(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream in(text);
  std::string line, current;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = trim(t.substr(1, t.size() - 2));
      if (key.empty() && current == section) return no;
      continue;
    }
    const auto eq = t.find('=');
    if (current == section && trim(t.substr(0, eq)) == key) return no;
  }
  return 0;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Value> values) : values_(std::move(values)) {}

  bool has(const std::string& field) const { return values_.count(field) > 0; }

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    auto it = values_.find(field);
    const int line = it == values_.end() ? 0 : it->second.line;
    std::string where = line > 0 ? " (line " + std::to_string(line) + ")" : "";
    if (it != values_.end() && line == 0) where = " (environment override)";
    throw ConfigError(field + ": " + msg + where, field, line);
  }

  std::string text(const std::string& field, const std::string& fallback) const {
    auto it = values_.find(field);
    return it == values_.end() ? fallback : it->second.text;
  }

  double number(const std::string& field, double fallback) const {
    auto it = values_.find(field);
    if (it == values_.end()) return fallback;
    return parse_number(field, it->second.text);
  }

  std::optional<double> optional_number(const std::string& field) const {
    if (!has(field)) return std::nullopt;
    return number(field, 0.0);
  }

  int integer(const std::string& field, int fallback) const {
    const double v = number(field, fallback);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(field, "expected an integer");
    return static_cast<int>(v);
  }

  bool boolean(const std::string& field, bool fallback) const {
    auto it = values_.find(field);
    if (it == values_.end()) return fallback;
    const std::string v = it->second.text;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(field, "expected true or false, got '" + v + "'");
  }

  std::vector<double> list(const std::string& field, std::vector<double> fallback) const {
    auto it = values_.find(field);
    if (it == values_.end()) return fallback;
    std::string s = it->second.text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_number(field, tok));
    if (out.empty()) fail(field, "empty list");
    return out;
  }

 private:
  double parse_number(const std::string& field, const std::string& s) const {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v))
      fail(field, "expected a finite number, got '" + s + "'");
    return v;
  }

  std::map<std::string, Value> values_;
};

void require_increasing(const Reader& r, const std::string& field, const std::vector<double>& v) {
  for (double x : v)
    if (!(x > 0.0)) r.fail(field, "entries must be positive");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) r.fail(field, "list must be strictly increasing");
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& s : schema())
    for (const auto& k : s.keys) out.push_back(std::string(s.name) + "." + k);
  return out;
}

TrapPotential TrapSpec::build(const std::string& base_dir) const {
  if (kind == "harmonic") return TrapPotential::harmonic();
  if (kind == "power") return TrapPotential::power(s, coef);
  if (kind == "zero") return TrapPotential::zero_in_box();
  if (kind == "tabulated") {
    const auto path = std::filesystem::path(base_dir) / table;
    auto [r, v] = load_two_column(path.string());
    return TrapPotential::tabulated_radial(std::move(r), std::move(v), growth, convex);
  }
  throw ConfigError("trap.kind: unknown kind '" + kind + "'", "trap.kind");
}

InteractionPotential InteractionSpec::build(const std::string& base_dir) const {
  InteractionPotential v;
  if (kind == "none") {
    return InteractionPotential::none();
  } else if (kind == "hard_sphere") {
    v = InteractionPotential::hard_sphere(d);
  } else if (kind == "square_barrier") {
    v = InteractionPotential::square_barrier(V0, R0);
  } else if (kind == "hard_core_well") {
    v = InteractionPotential::hard_core_well(d, R0, depth);
  } else if (kind == "power_tail") {
    v = InteractionPotential::power_tail(coef, exponent, start, core);
  } else if (kind == "tabulated") {
    const auto path = std::filesystem::path(base_dir) / table;
    auto [r, vals] = load_two_column(path.string());
    v = InteractionPotential::tabulated(std::move(r), std::move(vals), core, tail);
  } else {
    throw ConfigError("interaction.kind: unknown kind '" + kind + "'", "interaction.kind");
  }
  return cutoff ? v.truncated(*cutoff) : v;
}

double RunConfig::a_for(double n) const {
  if (a) return *a;
  if (a1) return *a1 / n;
  throw ConfigError("physics: set exactly one of a or a1", "physics.a");
}

RunConfig parse_config(const std::string& text, const EnvLookup& env,
                       const std::string& base_dir) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  {
    std::istringstream in(text);
    try {
      pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError("config syntax: " + e.message() + " (line " + std::to_string(e.line()) +
                            ")",
                        "", static_cast<int>(e.line()));
    }
  }

  std::map<std::string, Value> values;
  for (const auto& [sec_name, sec] : tree) {
    auto it = std::find_if(schema().begin(), schema().end(),
                           [&](const Section& s) { return sec_name == s.name; });
    if (sec.empty() && !sec.data().empty()) {
      const std::string field = sec_name;
      throw ConfigError(field + ": key outside any section", field, find_line(text, "", field));
    }
    if (it == schema().end()) {
      const int line = find_line(text, sec_name, "");
      throw ConfigError("unknown section [" + sec_name + "] (line " + std::to_string(line) + ")",
                        sec_name, line);
    }
    for (const auto& [key, node] : sec) {
      const std::string field = sec_name + "." + key;
      const int line = find_line(text, sec_name, key);
      if (std::find(it->keys.begin(), it->keys.end(), key) == it->keys.end())
        throw ConfigError("unknown key " + field + " (line " + std::to_string(line) + ")", field,
                          line);
      values[field] = {trim(node.data()), line};
    }
  }
  for (const auto& s : schema())
    for (const auto& k : s.keys) {
      const std::string var = "GPB_" + upper(s.name) + "_" + upper(k);
      if (auto v = env(var)) values[std::string(s.name) + "." + k] = {trim(*v), 0};
    }

  RunConfig cfg;
  cfg.base_dir = base_dir;
  for (const auto& s : schema())
    for (const auto& k : s.keys) {
      auto it = values.find(std::string(s.name) + "." + k);
      if (it != values.end()) cfg.canonical += it->first + " = " + it->second.text + "\n";
    }
  const Reader r(values);

  // [trap]
  cfg.trap.kind = r.text("trap.kind", cfg.trap.kind);
  auto tk = trap_kind_keys.find(cfg.trap.kind);
  if (tk == trap_kind_keys.end())
    r.fail("trap.kind", "unknown kind '" + cfg.trap.kind + "' (harmonic, power, tabulated, zero)");
  for (const auto& k : schema()[0].keys)
    if (k != "kind" && r.has("trap." + k) && !tk->second.count(k))
      r.fail("trap." + k, "does not apply to trap kind " + cfg.trap.kind);
  cfg.trap.s = r.number("trap.s", cfg.trap.s);
  cfg.trap.coef = r.number("trap.coef", cfg.trap.coef);
  cfg.trap.table = r.text("trap.table", "");
  cfg.trap.growth = r.number("trap.growth", cfg.trap.growth);
  cfg.trap.convex = r.boolean("trap.convex", cfg.trap.convex);
  if (cfg.trap.kind == "power" && !(cfg.trap.s > 0.0 && cfg.trap.coef > 0.0))
    r.fail("trap.s", "power trap needs s > 0 and coef > 0");
  if (cfg.trap.kind == "tabulated" && cfg.trap.table.empty())
    r.fail("trap.table", "tabulated trap needs a table path");

  // [interaction]
  InteractionSpec& is = cfg.interaction;
  is.kind = r.text("interaction.kind", is.kind);
  auto ik = interaction_kind_keys.find(is.kind);
  if (ik == interaction_kind_keys.end())
    r.fail("interaction.kind", "unknown kind '" + is.kind + "'");
  for (const auto& k : schema()[1].keys)
    if (k != "kind" && r.has("interaction." + k) && !ik->second.count(k))
      r.fail("interaction." + k, "does not apply to interaction kind " + is.kind);
  is.d = r.number("interaction.d", is.d);
  is.V0 = r.number("interaction.V0", is.V0);
  is.R0 = r.number("interaction.R0", is.R0);
  is.depth = r.number("interaction.depth", is.depth);
  is.coef = r.number("interaction.coef", is.coef);
  is.exponent = r.number("interaction.exponent", is.exponent);
  is.start = r.number("interaction.start", is.start);
  is.core = r.number("interaction.core", is.core);
  is.table = r.text("interaction.table", "");
  is.cutoff = r.optional_number("interaction.cutoff");
  const bool any_tail = r.has("interaction.tail_coef") || r.has("interaction.tail_exponent") ||
                        r.has("interaction.tail_start");
  if (any_tail) {
    if (!(r.has("interaction.tail_coef") && r.has("interaction.tail_exponent") &&
          r.has("interaction.tail_start")))
      r.fail("interaction.tail_coef", "tail needs tail_coef, tail_exponent and tail_start");
    is.tail = PowerTail{r.number("interaction.tail_coef", 0.0),
                        r.number("interaction.tail_exponent", 0.0),
                        r.number("interaction.tail_start", 0.0)};
  }
  if (is.kind == "tabulated" && is.table.empty())
    r.fail("interaction.table", "tabulated interaction needs a table path");

  // [physics]
  cfg.N = r.list("physics.N", cfg.N);
  require_increasing(r, "physics.N", cfg.N);
  cfg.a = r.optional_number("physics.a");
  cfg.a1 = r.optional_number("physics.a1");
  if (cfg.a && cfg.a1) r.fail("physics.a1", "set exactly one of a or a1");
  if (cfg.a && !(*cfg.a >= 0.0)) r.fail("physics.a", "must be >= 0");
  if (cfg.a1 && !(*cfg.a1 >= 0.0)) r.fail("physics.a1", "must be >= 0");
  cfg.Na_list = r.list("physics.Na_list", cfg.Na_list);
  require_increasing(r, "physics.Na_list", cfg.Na_list);

  // [grid]
  const std::string gk = r.text("grid.kind", "radial");
  if (gk == "radial")
    cfg.grid.kind = GridKind::radial;
  else if (gk == "cartesian")
    cfg.grid.kind = GridKind::cartesian;
  else
    r.fail("grid.kind", "expected radial or cartesian, got '" + gk + "'");
  const std::string gb = r.text("grid.boundary", "decay");
  if (gb == "decay")
    cfg.grid.boundary = Boundary::decay;
  else if (gb == "neumann")
    cfg.grid.boundary = Boundary::neumann;
  else
    r.fail("grid.boundary", "expected decay or neumann, got '" + gb + "'");
  cfg.grid.h = r.number("grid.h", cfg.grid.h);
  cfg.grid.R = r.number("grid.R", cfg.grid.R);
  try {
    cfg.grid.validate();
  } catch (const DomainError& e) {
    r.fail(r.has("grid.h") ? "grid.h" : "grid.R", e.what());
  }

  // [solver]
  cfg.solver.tolerance = r.number("solver.tolerance", cfg.solver.tolerance);
  if (!(cfg.solver.tolerance > 0.0 && cfg.solver.tolerance <= 1e-2))
    r.fail("solver.tolerance", "must lie in (0, 1e-2]");
  cfg.solver.max_iter = r.integer("solver.max_iter", cfg.solver.max_iter);
  if (cfg.solver.max_iter < 1) r.fail("solver.max_iter", "must be positive");
  cfg.solver.richardson = r.boolean("solver.richardson", cfg.solver.richardson);
  cfg.solver.verify_uniqueness =
      r.boolean("solver.verify_uniqueness", cfg.solver.verify_uniqueness);

  // [scattering]
  cfg.scattering.r_max = r.number("scattering.r_max", cfg.scattering.r_max);
  if (cfg.scattering.r_max < 0.0) r.fail("scattering.r_max", "must be >= 0 (0 = automatic)");
  cfg.scattering.steps = r.integer("scattering.steps", cfg.scattering.steps);
  if (cfg.scattering.steps < 100) r.fail("scattering.steps", "must be >= 100");
  cfg.scattering.tolerance = r.number("scattering.tolerance", cfg.scattering.tolerance);
  if (!(cfg.scattering.tolerance > 0.0)) r.fail("scattering.tolerance", "must be positive");

  // [bounds]
  SandwichOptions& sw = cfg.sandwich;
  sw.C = r.number("bounds.C", sw.C);
  sw.L = r.number("bounds.L", sw.L);
  sw.box_R = r.number("bounds.box_R", sw.box_R);
  sw.box_h = r.number("bounds.box_h", sw.box_h);
  sw.exponent = r.number("bounds.exponent", sw.exponent);
  sw.estar.p_start = r.number("bounds.p_start", sw.estar.p_start);
  sw.estar.p_max = r.number("bounds.p_max", sw.estar.p_max);
  sw.estar.gap_tolerance = r.number("bounds.gap_tolerance", sw.estar.gap_tolerance);
  if (!(sw.C > 0.0)) r.fail("bounds.C", "must be positive");
  if (!(sw.exponent > 0.0)) r.fail("bounds.exponent", "must be positive");
  if (!(sw.L > 0.0)) r.fail("bounds.L", "must be positive");
  try {
    Grid{GridKind::cartesian, sw.box_h, sw.box_R, Boundary::neumann}.validate();
  } catch (const DomainError& e) {
    r.fail("bounds.box_h", e.what());
  }
  const double cells = 2.0 * sw.box_R / sw.L, per = sw.L / sw.box_h;
  if (std::abs(cells - std::round(cells)) > 1e-9 * cells ||
      std::abs(per - std::round(per)) > 1e-9 * per || std::round(per) < 1.0)
    r.fail("bounds.L", "must divide 2*box_R and be a multiple of box_h");
  if (!(sw.estar.p_start >= 4.0 && sw.estar.p_max >= sw.estar.p_start))
    r.fail("bounds.p_start", "need 4 <= p_start <= p_max");
  if (!(sw.estar.gap_tolerance > 0.0)) r.fail("bounds.gap_tolerance", "must be positive");
  sw.gp_grid = cfg.grid;
  sw.solver = cfg.solver;
  sw.scattering = cfg.scattering;

  // [tf]
  cfg.tf_nodes = r.integer("tf.nodes", cfg.tf_nodes);
  if (cfg.tf_nodes < 32) r.fail("tf.nodes", "must be >= 32");

  // [output]
  cfg.json_path = r.text("output.json", "");
  cfg.csv_path = r.text("output.csv", "");
  return cfg;
}

RunConfig load_config(const std::string& path, const EnvLookup& env) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path, "", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), env, dir.empty() ? "." : dir.string());
}

}  // namespace gpb
