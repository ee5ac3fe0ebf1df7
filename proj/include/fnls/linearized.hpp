#pragma once
#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fnls/profile.hpp"

namespace fnls {

enum class Sector { even, odd };
enum class Which { L_plus, L_minus };

std::string to_string(Sector s);
std::string to_string(Which w);

// Matrix of L in the orthonormal basis sqrt(1/T) cos((2j+1) pi x/T) (even) or sqrt(1/T) sin(...) (odd),
// orthonormal over one full period [0, 2T).
struct SectorOperator {
  Sector sector = Sector::even;
  Which which = Which::L_plus;
  int size = 0;
  int quad_grid = 0;
  double T = 1.0;
  Eigen::MatrixXd matrix;
};

struct SectorSpectrum {
  Sector sector = Sector::even;
  Which which = Which::L_plus;
  double T = 1.0;
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns; empty when not requested
  double residual = 0.0;         // max_i ||A v_i - lambda_i v_i|| / ||A||
};

// Quadrature grid used by assemble for a given basis size.
int quadrature_grid(int size, const StandingProfile& p);

// Potential V of L_plus / L_minus sampled on a grid of size N (omega excluded).
std::vector<double> potential_samples(const StandingProfile& p, Which which, int N);

SectorOperator assemble(const StandingProfile& p, Which which, Sector sector, int size, int quad_grid = 0);
// Same entries from an arbitrary real, even, T-periodic potential (samples over [0, 2T)).
SectorOperator assemble_from_potential(const std::vector<double>& V, double T, double alpha, double omega,
                                       Sector sector, int size);
SectorSpectrum eigensolve(const SectorOperator& op, bool vectors = true);
// Eigenvalues of the operator in the full odd-mode exponential basis (no sector split).
Eigen::VectorXd full_spectrum(const StandingProfile& p, Which which, int size, int quad_grid = 0);

// Sector coefficients of a real field in the orthonormal basis, and the inverse synthesis.
Eigen::VectorXd sector_coefficients(const AntiperiodicField& f, Sector sector, int size);
AntiperiodicField sector_field(const Eigen::VectorXd& a, Sector sector, double T);

// Sign alternations among samples above 1e-7 ||v||_inf on the sector's reference interval
// ((-T/2, T/2) for even, (0, T) for odd).
int count_sign_changes(const Eigen::VectorXd& a, Sector sector, double T, int N);

// Apply L (with omega) to a field pointwise on the profile grid.
AntiperiodicField apply_operator(const StandingProfile& p, Which which, const AntiperiodicField& v);
GridSamples apply_operator_grid(const StandingProfile& p, Which which, const AntiperiodicField& v);

// Solve A y = rhs with eigencomponents |lambda| <= tol removed. kernel_component receives the
// size of rhs along the removed directions relative to ||rhs||.
Eigen::VectorXd deflated_solve(const SectorSpectrum& s, const Eigen::VectorXd& rhs, double tol,
                               double* kernel_component = nullptr);

struct OperatorSummary {
  Which which = Which::L_plus;
  int morse = 0;
  int near_zero = 0;
  double lambda0 = 0.0;        // near-kernel eigenvalue
  double gap = 0.0;            // distance to the next eigenvalue in the same sector
  double kernel_residual = 0;  // ||L phi'||_inf (L_plus) or ||L phi||_inf (L_minus)
  double alignment = 0.0;      // |cos| between near-kernel eigenvector and phi' / phi
  double even_ground = 0.0, odd_ground = 0.0;
  int ground_sign_changes_even = 0, ground_sign_changes_odd = 0;
  int second_sign_changes_even = 0, second_sign_changes_odd = 0;
  std::string potential_monotonicity;  // "nonincreasing", "nondecreasing", "constant", "none"
  bool ordering_consistent = false;
  std::vector<double> lowest_even, lowest_odd;  // lowest 10 per sector
  double doubling_shift = -1.0;                 // max move of the lowest 10 under size doubling, -1 if not run
};

struct NondegeneracyReport {
  int size = 0;
  double scale = 0.0;
  double tol_kernel = 0.0;
  OperatorSummary plus, minus;
  int morse_plus = 0, morse_minus = 0;
  bool ground_sign_definite = false;
  bool passed = false;  // every structural prediction holds
};

// Checks for a real c = 0 profile. With doubling, every sector is re-solved at 2*size on the same
// quadrature grid and the shift of the lowest ten eigenvalues is recorded.
NondegeneracyReport nondegeneracy_check(const StandingProfile& p, int size, bool doubling = false);

struct FredholmReport {
  double lminus_dphi_identity = 0.0;  // ||L_- phi' - gamma 2 sigma phi^{2 sigma} phi'||_inf
  double lplus_phi_identity = 0.0;    // ||L_+ phi + gamma 2 sigma phi^{2 sigma + 1}||_inf
  double solve_residual = 0.0;        // relative residual of the deflated solve of L_- y = -phi'
  double kernel_component = 0.0;
  double dNdc_pairing = 0.0;          // int_0^T phi' y
  double continuation_mismatch = -1;  // ||y - Im dphi/dc||_inf when supplied
  AntiperiodicField y;
};

FredholmReport fredholm_range_checks(const StandingProfile& p, int size, const AntiperiodicField* im_dphi_dc = nullptr);

struct JordanReport {
  double delta = 0.0;
  double dQdmu = 0.0, domega_dmu = 0.0, dNdc = 0.0, dNdmu = 0.0, domega_dc = 0.0;
  double chain_mu_residual = 0.0;  // ||L_+ dphi/dmu + (domega/dmu) phi||_inf
  double chain_c_residual = 0.0;   // ||L_- Im dphi/dc + phi'||_inf
  double re_dphi_dc = 0.0;         // ||Re dphi/dc||_inf
  double omega_even_defect = 0.0;  // |omega(delta) - omega(-delta)|
  double det_c_omega = 0.0;        // det d(c, omega)/d(c, mu)
  double det_N_Q = 0.0;            // det d(N, Q)/d(c, mu)
  double dNdc_pairing = 0.0;
  double fredholm_mismatch = 0.0;
  AntiperiodicField dphi_dmu, im_dphi_dc;
};

JordanReport jordan_structure(const StandingProfile& p, const SolverSettings& s, int size, double delta = 1e-3);

}  // namespace fnls
