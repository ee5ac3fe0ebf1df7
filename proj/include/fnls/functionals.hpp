#pragma once
#include "fnls/spectral.hpp"

namespace fnls {

struct ProblemParams {
  double alpha = 1.5;
  double sigma = 1.0;
  int gamma = -1;  // +1 focusing, -1 defocusing
  double T = M_PI;

  void validate() const;
  bool focusing() const { return gamma == 1; }
  double c_star() const;       // (pi/T)^(alpha-1)
  double omega_bound() const;  // (pi/T)^alpha
};

// Grid used for pointwise nonlinear terms when none is given.
inline int default_grid(int M) { return 8 * M; }

struct FunctionalValues {
  double K = 0, P = 0, Q = 0, N = 0, H = 0, F_c = 0, E = 0;
  double c = 0, omega = 0;
};

double charge(const AntiperiodicField& u);
double momentum(const AntiperiodicField& u);
double kinetic(const AntiperiodicField& u, double alpha);
// (1/(2 sigma + 2)) int_0^T |u|^(2 sigma + 2), trapezoid on a grid of size N (0 -> default).
double potential(const AntiperiodicField& u, double sigma, int N = 0);
double hamiltonian(const AntiperiodicField& u, const ProblemParams& p, int N = 0);
double F_c(const AntiperiodicField& u, double c, const ProblemParams& p, int N = 0);
double lagrangian(const AntiperiodicField& u, double c, double omega, const ProblemParams& p, int N = 0);
FunctionalValues evaluate(const AntiperiodicField& u, const ProblemParams& p, double c, double omega, int N = 0);

// Odd-mode projection of |u|^(2 sigma) u sampled on a grid of size N.
AntiperiodicField nonlinearity(const AntiperiodicField& u, double sigma, int N = 0);

// Lambda^alpha u + omega u + i c u' - gamma |u|^(2 sigma) u
AntiperiodicField gradient(const AntiperiodicField& u, double c, double omega, const ProblemParams& p, int N = 0);

// Variational derivatives of the individual functionals.
AntiperiodicField grad_kinetic(const AntiperiodicField& u, double alpha);
AntiperiodicField grad_momentum(const AntiperiodicField& u);

}  // namespace fnls
