#pragma once
#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "fnls/linearized.hpp"
#include "fnls/profile.hpp"

namespace fnls {

struct ConservedSample {
  double time = 0.0;
  double H = 0.0, Q = 0.0, N = 0.0;
};

struct EvolutionState {
  AntiperiodicField field;
  double time = 0.0;
  double dt = 1e-3;
  std::vector<ConservedSample> conserved_log;
};

// Co-moving, co-rotating flow  i u_t = Lambda^alpha u + omega u + i c u' - gamma |u|^{2 sigma} u
// on the full grid of 4M points, M the mode count of the loaded field. Strang splitting: exact
// half-step phase rotation, exact linear step, exact half-step phase rotation.
class Propagator {
 public:
  Propagator(const ProblemParams& params, double omega, double c, double dt, int M, bool nonlinear = true);

  void load(const AntiperiodicField& u);
  AntiperiodicField field() const;
  void advance(long steps);
  double sup_norm() const;
  int grid() const { return N_; }

 private:
  void rotate(double tau);

  ProblemParams params_;
  double dt_;
  int M_, N_;
  bool nonlinear_;
  CVec u_, work_, linear_;
};

// One Strang step on the state (advances time, no logging).
void step(EvolutionState& state, const ProblemParams& params, double omega, double c = 0.0);

struct EvolveOptions {
  double dt = 1e-3;
  long steps = 1000;
  long log_every = 100;
  double omega = 0.0, c = 0.0;
  bool nonlinear = true;
  double blowup_guard = std::numeric_limits<double>::infinity();  // on ||u||_inf
};

// Evolves and logs (H, Q, N) every log_every steps. Throws BlowupDetected past the guard.
EvolutionState evolve(const AntiperiodicField& u0, const ProblemParams& params, const EvolveOptions& opt);

// Largest relative drift of H, Q and N in a log. N is measured relative to max(|N_0|, Q_0), since
// N_0 vanishes for real data.
struct DriftSummary {
  double H = 0.0, Q = 0.0, N = 0.0;
  double max() const { return std::max({H, Q, N}); }
};
DriftSummary conservation_drift(const std::vector<ConservedSample>& log);

// rho(u, phi) = inf over phase and shift of || u - exp(i beta) phi(. - x0) ||_X.
double orbital_distance(const AntiperiodicField& u, const StandingProfile& phi);

// Random perturbation of X-norm eps. With preserve_momentum, v is made orthogonal to i phi' and
// corrected along i phi' so that N(phi + v) = 0 exactly.
AntiperiodicField make_perturbation(const StandingProfile& phi, double eps, std::mt19937_64& rng,
                                    bool preserve_momentum, int active_modes = 8);

struct CoercivityReport {
  // minimum X-normalized Rayleigh quotient per (operator, sector) under the constraints
  // L_plus even: v perp phi; L_plus odd: v perp phi'; L_minus even: v perp phi; L_minus odd: v perp phi'
  double plus_even = 0.0, plus_odd = 0.0, minus_even = 0.0, minus_odd = 0.0;
  double minimum = 0.0;
  bool positive = false;
};

CoercivityReport coercivity_check(const StandingProfile& phi, int size);

struct StabilityIndices {
  double delta = 0.0;
  double dNdc = 0.0, dNdc_half = 0.0;            // defocusing
  double dQdmu = 0.0;                            // defocusing
  double dQdomega = 0.0, dQdomega_half = 0.0;    // focusing
  double lplus_inverse_pairing = 0.0;            // focusing: <L_+^{-1} phi, phi> over [0, T]
  double richardson = 0.0;                       // relative disagreement of the two step sizes
};

// Central differences at delta and delta/2; throws StepTooLarge when they disagree by more than
// 1e-4 relative. Focusing additionally checks <L_+^{-1} phi, phi> = -dQ/domega to 1e-4 relative.
StabilityIndices stability_indices(const StandingProfile& phi, const SolverSettings& s, int size,
                                   double delta = 1e-3);

struct StabilityOptions {
  std::vector<double> eps = {1e-4, 1e-3};
  int perturbations = 1;       // per eps
  double horizon = 0.0;        // 0 -> 100 T
  double dt = 2e-3;
  double log_interval = 0.0;   // 0 -> T / 20
  std::uint64_t seed = 1;
  bool preserve_momentum = true;
  double tol_cons = 1e-6;
  double guard_factor = 1e3;   // blow-up guard relative to ||phi||_inf
  int workers = 1;
};

struct StabilityRun {
  double eps = 0.0;
  double v_norm = 0.0;          // ||v||_X of the applied perturbation
  double N_initial = 0.0;       // N(phi + v)
  std::vector<double> times, rho;
  double rho_max = 0.0;
  double C_emp = 0.0;           // max rho / ||v||_X
  double trend_ratio = 0.0;     // max rho over last third / max rho over first third
  DriftSummary drift;
};

struct StabilityReport {
  std::vector<StabilityRun> runs;
  double C_emp = 0.0;  // max over runs
  double horizon = 0.0, dt = 0.0;
};

// Throws BlowupDetected or ConservationDriftExceeded (drift above tol_cons).
StabilityReport stability_experiment(const StandingProfile& phi, const StabilityOptions& opt);

}  // namespace fnls
