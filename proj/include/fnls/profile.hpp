#pragma once
#include <optional>
#include <string>
#include <vector>

#include "fnls/functionals.hpp"

namespace fnls {

struct SolverSettings {
  int modes = 64;      // M
  int grid = 0;        // N for nonlinear terms; 0 -> default_grid(M)
  double tol = 1e-9;   // residual sup-norm
  int max_iter = 50000;
  double newton_switch = 1e-6;  // gradient stage hands over below this residual
  int max_newton = 40;

  int grid_size() const { return grid > 0 ? grid : default_grid(modes); }
};

struct StandingProfile {
  AntiperiodicField field;
  ProblemParams params;
  double omega = 0.0;
  double c = 0.0;
  double mu = 0.0;
  double p0 = 0.0;
  double residual = 0.0;
  int iterations = 0;
  int newton_iterations = 0;
  int grid = 0;
  double energy = 0.0;             // attained constrained energy (F_c or R_omega before rescaling)
  double energy_change = 0.0;      // relative energy change over the last iteration
  double eta = 0.0;                // focusing multiplier before rescaling
  double evenness_defect = 0.0;    // filled by gauge_fix
  double imag_defect = 0.0;        // filled by gauge_fix
};

StandingProfile solve_defocusing(const ProblemParams& params, double c, double mu, const SolverSettings& s,
                                 const std::optional<AntiperiodicField>& init = std::nullopt);

StandingProfile solve_focusing(const ProblemParams& params, double omega, double p0, const SolverSettings& s,
                               const std::optional<AntiperiodicField>& init = std::nullopt);

StandingProfile gauge_fix(const StandingProfile& p);

enum class ContinuationParam { c, mu, omega };

struct ContinuationResult {
  std::vector<StandingProfile> profiles;  // converged ones, in order
  std::vector<double> values;             // parameter values of the converged profiles
  bool failed = false;
  double failed_at = 0.0;
  std::string message;
};

// Stops (failed = true) at the first non-converged step, or when a profile with a varying modulus
// lands on a constant-modulus plane wave, which is where the travelling branch ends.
ContinuationResult continue_in(const StandingProfile& p, ContinuationParam which, double target, int steps,
                               const SolverSettings& s);

// (max |u| - min |u|) / max |u| on a grid of size N.
double modulus_variation(const AntiperiodicField& u, int N);

// Residual field of the profile equation and its sup-norm on the profile grid.
AntiperiodicField profile_residual_field(const StandingProfile& p);
double profile_residual(const StandingProfile& p);

// Best group-orbit alignment of u onto ref:
//   minimize || exp(-i phase) u(. + shift) - ref ||_W over (phase, shift),
// with W the weighted norm sum (1 + |pi k/T|^weight_alpha)|c_k|^2 (weight_alpha = 0 gives L^2 up to a factor).
struct Alignment {
  double phase = 0.0;
  double shift = 0.0;
  AntiperiodicField aligned;
};
Alignment align_to(const AntiperiodicField& u, const AntiperiodicField& ref, double weight_alpha, bool use_weight);

// Pointwise evaluation of f and its first two derivatives at x.
void evaluate_at(const AntiperiodicField& f, double x, cplx* v, cplx* d1, cplx* d2);

}  // namespace fnls
