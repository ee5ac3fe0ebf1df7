#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "fnls/functionals.hpp"
#include "fnls/profile.hpp"

namespace fnls {

enum class Command { solve, spectrum, kernels, rearrange, evolve, sweep, report };

std::string to_string(Command c);
Command parse_command(const std::string& name);  // ValidationError on unknown names

struct BranchConfig {
  double c = 0.0, mu = 1.0;     // defocusing
  double omega = 0.0, p0 = 1.0;  // focusing
};

struct SpectrumConfig {
  int size = 256;
  bool doubling = false;
  double delta = 1e-3;  // finite-difference step for Jordan / stability indices
};

struct KernelConfig {
  std::vector<double> times = {0.1, 1.0, 10.0};
  bool scale_times = true;  // multiply times by (T/pi)^alpha
  int grid = 1024;
  int probe_grid = 256;
  int probe_trials = 20;
};

struct RearrangeConfig {
  int grid = 512;
  int trials = 100;
  int active_modes = 8;
  std::vector<int> study_grids = {256, 512, 1024};
  int study_fields = 10;
  int reference_grid = 65536;
};

struct EvolveConfig {
  double dt = 2e-3;
  double horizon = 0.0;       // 0 -> 100 T
  double log_interval = 0.0;  // 0 -> T / 20
  std::vector<double> eps = {1e-4, 1e-3};
  int perturbations = 1;
  bool preserve_momentum = true;
  double tol_cons = 1e-6;
  double equilibrium_dt = 5e-5;
  long equilibrium_steps = 100000;
};

struct SweepConfig {
  std::string param = "c";  // c | mu | omega
  double to = 0.0;
  int steps = 10;
};

struct RunConfig {
  Command command = Command::solve;
  ProblemParams problem;
  BranchConfig branch;
  SolverSettings solver;
  SpectrumConfig spectrum;
  KernelConfig kernels;
  RearrangeConfig rearrange;
  EvolveConfig evolve;
  SweepConfig sweep;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int workers = 1;
};

// Grammar (see docs/config.md): lines are blank, comments starting with '#' or ';',
// "[section]" headers, or "key = value". Values are numbers, "pi", "<number>*pi",
// true/false, bare words, or comma-separated lists. Syntax errors throw ParseError;
// all window violations are collected into one ValidationError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Throws ValidationError naming every violated parameter window.
void validate(const RunConfig& cfg);

// Normalized INI text of the full configuration (every key, shortest round-trip numbers).
std::string echo_config(const RunConfig& cfg);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace fnls
