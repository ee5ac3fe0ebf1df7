#include "fnls/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "fnls/errors.hpp"

namespace fnls {

namespace {

struct Value {
  std::string text;
  int line = 0, column = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const Value& at) {
  const std::string t = trim(s);
  if (t == "pi") return M_PI;
  std::string num = t;
  double factor = 1.0;
  if (t.size() > 3 && t.compare(t.size() - 3, 3, "*pi") == 0) {
    num = trim(t.substr(0, t.size() - 3));
    factor = M_PI;
  }
  double v = 0.0;
  const char* first = num.data();
  const char* last = first + num.size();
  if (!num.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || num.empty()) throw ParseError("expected a number, got '" + t + "'", at.line, at.column);
  return v * factor;
}

long to_long(const std::string& s, const Value& at) {
  const std::string t = trim(s);
  long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ParseError("expected an integer, got '" + t + "'", at.line, at.column);
  return v;
}

std::uint64_t to_u64(const std::string& s, const Value& at) {
  const std::string t = trim(s);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ParseError("expected an unsigned integer, got '" + t + "'", at.line, at.column);
  return v;
}

bool to_bool(const std::string& s, const Value& at) {
  const std::string t = trim(s);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ParseError("expected true or false, got '" + t + "'", at.line, at.column);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_same_v<T, double>)
      out += format_double(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

struct Key {
  std::string section, name;
  std::function<void(RunConfig&, const Value&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define FNLS_DOUBLE(sec, key, field)                                                          \
  Key { sec, key, [](RunConfig& c, const Value& v) { c.field = to_double(v.text, v); },       \
        [](const RunConfig& c) { return format_double(c.field); } }
#define FNLS_INT(sec, key, field)                                                                \
  Key { sec, key, [](RunConfig& c, const Value& v) { c.field = static_cast<decltype(c.field)>(to_long(v.text, v)); }, \
        [](const RunConfig& c) { return std::to_string(c.field); } }
#define FNLS_BOOL(sec, key, field)                                                            \
  Key { sec, key, [](RunConfig& c, const Value& v) { c.field = to_bool(v.text, v); },         \
        [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); } }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      Key{"run", "command", [](RunConfig& c, const Value& v) {
            try {
              c.command = parse_command(trim(v.text));
            } catch (const ValidationError&) {
              throw ParseError("unknown command '" + trim(v.text) + "'", v.line, v.column);
            }
          },
          [](const RunConfig& c) { return to_string(c.command); }},
      Key{"run", "out", [](RunConfig& c, const Value& v) { c.out_dir = trim(v.text); },
          [](const RunConfig& c) { return c.out_dir; }},
      Key{"run", "seed", [](RunConfig& c, const Value& v) { c.seed = to_u64(v.text, v); },
          [](const RunConfig& c) { return std::to_string(c.seed); }},
      FNLS_INT("run", "workers", workers),

      FNLS_DOUBLE("problem", "alpha", problem.alpha),
      FNLS_DOUBLE("problem", "sigma", problem.sigma),
      FNLS_INT("problem", "gamma", problem.gamma),
      FNLS_DOUBLE("problem", "T", problem.T),

      FNLS_DOUBLE("branch", "c", branch.c),
      FNLS_DOUBLE("branch", "mu", branch.mu),
      FNLS_DOUBLE("branch", "omega", branch.omega),
      FNLS_DOUBLE("branch", "p0", branch.p0),

      FNLS_INT("solver", "modes", solver.modes),
      FNLS_INT("solver", "grid", solver.grid),
      FNLS_DOUBLE("solver", "tol", solver.tol),
      FNLS_INT("solver", "max_iter", solver.max_iter),
      FNLS_DOUBLE("solver", "newton_switch", solver.newton_switch),
      FNLS_INT("solver", "max_newton", solver.max_newton),

      FNLS_INT("spectrum", "size", spectrum.size),
      FNLS_BOOL("spectrum", "doubling", spectrum.doubling),
      FNLS_DOUBLE("spectrum", "delta", spectrum.delta),

      Key{"kernels", "times",
          [](RunConfig& c, const Value& v) {
            c.kernels.times.clear();
            for (const auto& s : split_list(v.text)) c.kernels.times.push_back(to_double(s, v));
          },
          [](const RunConfig& c) { return join(c.kernels.times); }},
      FNLS_BOOL("kernels", "scale_times", kernels.scale_times),
      FNLS_INT("kernels", "grid", kernels.grid),
      FNLS_INT("kernels", "probe_grid", kernels.probe_grid),
      FNLS_INT("kernels", "probe_trials", kernels.probe_trials),

      FNLS_INT("rearrange", "grid", rearrange.grid),
      FNLS_INT("rearrange", "trials", rearrange.trials),
      FNLS_INT("rearrange", "active_modes", rearrange.active_modes),
      Key{"rearrange", "study_grids",
          [](RunConfig& c, const Value& v) {
            c.rearrange.study_grids.clear();
            for (const auto& s : split_list(v.text))
              c.rearrange.study_grids.push_back(static_cast<int>(to_long(s, v)));
          },
          [](const RunConfig& c) { return join(c.rearrange.study_grids); }},
      FNLS_INT("rearrange", "study_fields", rearrange.study_fields),
      FNLS_INT("rearrange", "reference_grid", rearrange.reference_grid),

      FNLS_DOUBLE("evolve", "dt", evolve.dt),
      FNLS_DOUBLE("evolve", "horizon", evolve.horizon),
      FNLS_DOUBLE("evolve", "log_interval", evolve.log_interval),
      Key{"evolve", "eps",
          [](RunConfig& c, const Value& v) {
            c.evolve.eps.clear();
            for (const auto& s : split_list(v.text)) c.evolve.eps.push_back(to_double(s, v));
          },
          [](const RunConfig& c) { return join(c.evolve.eps); }},
      FNLS_INT("evolve", "perturbations", evolve.perturbations),
      FNLS_BOOL("evolve", "preserve_momentum", evolve.preserve_momentum),
      FNLS_DOUBLE("evolve", "tol_cons", evolve.tol_cons),
      FNLS_DOUBLE("evolve", "equilibrium_dt", evolve.equilibrium_dt),
      FNLS_INT("evolve", "equilibrium_steps", evolve.equilibrium_steps),

      Key{"sweep", "param", [](RunConfig& c, const Value& v) { c.sweep.param = trim(v.text); },
          [](const RunConfig& c) { return c.sweep.param; }},
      FNLS_DOUBLE("sweep", "to", sweep.to),
      FNLS_INT("sweep", "steps", sweep.steps),
  };
  return table;
}

#undef FNLS_DOUBLE
#undef FNLS_INT
#undef FNLS_BOOL

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string to_string(Command c) {
  switch (c) {
    case Command::solve: return "solve";
    case Command::spectrum: return "spectrum";
    case Command::kernels: return "kernels";
    case Command::rearrange: return "rearrange";
    case Command::evolve: return "evolve";
    case Command::sweep: return "sweep";
    case Command::report: return "report";
  }
  return "solve";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::solve, Command::spectrum, Command::kernels, Command::rearrange, Command::evolve,
                    Command::sweep, Command::report})
    if (to_string(c) == name) return c;
  throw ValidationError("unknown command '" + name +
                        "' (expected solve, spectrum, kernels, rearrange, evolve, sweep or report)");
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, const Key*> lookup;
  for (const Key& k : keys()) lookup[k.section + "." + k.name] = &k;

  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  for (int lineno = 1; std::getline(in, raw); ++lineno) {
    const std::string line = trim(raw);
    const int indent = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line[0] == '[') {
      const auto close = line.find(']');
      if (close == std::string::npos) throw ParseError("missing ']' in section header", lineno, indent + static_cast<int>(line.size()));
      if (trim(line.substr(close + 1)).size() > 0) throw ParseError("text after section header", lineno, indent + static_cast<int>(close) + 1);
      section = trim(line.substr(1, close - 1));
      bool known = false;
      for (const Key& k : keys()) known = known || k.section == section;
      if (!known) throw ParseError("unknown section '" + section + "'", lineno, indent + 1);
      continue;
    }
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno, indent);
    if (section.empty()) throw ParseError("key outside of any section", lineno, indent);
    const std::string key = trim(raw.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", lineno, indent);
    std::string value = raw.substr(eq + 1);
    const auto hash = value.find('#');
    if (hash != std::string::npos) value = value.substr(0, hash);
    const int vcol = static_cast<int>(raw.find_first_not_of(" \t", eq + 1)) + 1;
    if (trim(value).empty()) throw ParseError("missing value for '" + key + "'", lineno, static_cast<int>(eq) + 2);
    const std::string full = section + "." + key;
    auto it = lookup.find(full);
    if (it == lookup.end()) throw ParseError("unknown key '" + key + "' in [" + section + "]", lineno, indent);
    if (!seen.insert(full).second) throw ParseError("duplicate key '" + key + "'", lineno, indent);
    it->second->set(cfg, Value{value, lineno, vcol > 0 ? vcol : indent});
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IOError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
  std::vector<std::string> bad;
  const ProblemParams& p = cfg.problem;
  if (!(p.alpha > 1.0 && p.alpha <= 2.0)) bad.push_back("alpha must lie in (1,2], got " + format_double(p.alpha));
  if (!(p.sigma > 0.0)) bad.push_back("sigma must be positive");
  if (p.gamma != 1 && p.gamma != -1) bad.push_back("gamma must be +1 (focusing) or -1 (defocusing)");
  if (!(p.T > 0.0)) bad.push_back("T must be positive");
  const bool windows = bad.empty();
  if (windows && !p.focusing()) {
    if (!(std::abs(cfg.branch.c) < p.c_star()))
      bad.push_back("c must satisfy |c| < c_* = (pi/T)^(alpha-1) = " + format_double(p.c_star()) + ", got " +
                    format_double(cfg.branch.c));
    if (!(cfg.branch.mu > 0.0)) bad.push_back("mu must be positive");
  }
  if (windows && p.focusing()) {
    if (!(std::abs(cfg.branch.omega) < p.omega_bound()))
      bad.push_back("omega must satisfy |omega| < (pi/T)^alpha = " + format_double(p.omega_bound()) + ", got " +
                    format_double(cfg.branch.omega));
    if (!(cfg.branch.p0 > 0.0)) bad.push_back("p0 must be positive");
  }
  if (cfg.solver.modes < 4) bad.push_back("solver modes must be at least 4");
  if (cfg.solver.grid != 0 && (cfg.solver.grid < 4 * cfg.solver.modes || cfg.solver.grid % 2))
    bad.push_back("solver grid must be 0 or an even number >= 4 * modes");
  if (!(cfg.solver.tol > 0.0)) bad.push_back("solver tol must be positive");
  if (cfg.spectrum.size < 8) bad.push_back("spectrum size must be at least 8");
  if (!(cfg.spectrum.delta > 0.0)) bad.push_back("spectrum delta must be positive");
  for (double t : cfg.kernels.times)
    if (!(t > 0.0)) bad.push_back("kernel times must be positive");
  if (cfg.kernels.grid < 8 || cfg.kernels.grid % 4) bad.push_back("kernel grid must be a multiple of 4, >= 8");
  if (cfg.kernels.probe_grid < 16 || cfg.kernels.probe_grid % 4)
    bad.push_back("kernel probe_grid must be a multiple of 4, >= 16");
  if (cfg.rearrange.grid < 8 || cfg.rearrange.grid % 4) bad.push_back("rearrange grid must be a multiple of 4, >= 8");
  for (int n : cfg.rearrange.study_grids)
    if (n < 64 || n % 4) bad.push_back("rearrange study_grids entries must be multiples of 4, >= 64");
  if (cfg.rearrange.reference_grid % 4) bad.push_back("rearrange reference_grid must be a multiple of 4");
  if (!(cfg.evolve.dt > 0.0) || !(cfg.evolve.equilibrium_dt > 0.0)) bad.push_back("time steps must be positive");
  for (double e : cfg.evolve.eps)
    if (!(e > 0.0 && e <= 1e-2)) bad.push_back("perturbation sizes must lie in (0, 1e-2]");
  if (cfg.sweep.param != "c" && cfg.sweep.param != "mu" && cfg.sweep.param != "omega")
    bad.push_back("sweep param must be c, mu or omega");
  if (cfg.sweep.steps < 1) bad.push_back("sweep steps must be positive");
  if (windows && cfg.command == Command::sweep) {
    if (cfg.sweep.param == "c" && !(std::abs(cfg.sweep.to) < p.c_star()))
      bad.push_back("sweep target c must satisfy |c| < c_* = " + format_double(p.c_star()));
    if (cfg.sweep.param == "omega" && !(std::abs(cfg.sweep.to) < p.omega_bound()))
      bad.push_back("sweep target omega must satisfy |omega| < (pi/T)^alpha = " + format_double(p.omega_bound()));
    if ((cfg.sweep.param == "omega") != p.focusing())
      bad.push_back("sweep param omega applies to the focusing branch only; c and mu to the defocusing branch");
  }
  if (cfg.workers < 1) bad.push_back("workers must be at least 1");
  if (bad.empty()) return;
  std::string msg;
  for (std::size_t i = 0; i < bad.size(); ++i) msg += (i ? "; " : "") + bad[i];
  throw ValidationError(msg);
}

std::string echo_config(const RunConfig& cfg) {
  std::string out, section;
  for (const Key& k : keys()) {
    if (k.section != section) {
      if (!section.empty()) out += "\n";
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += k.name + " = " + k.get(cfg) + "\n";
  }
  return out;
}

}  // namespace fnls
