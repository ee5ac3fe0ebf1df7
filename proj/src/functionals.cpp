#include "fnls/functionals.hpp"

#include <cmath>
#include <sstream>

#include "fnls/errors.hpp"

namespace fnls {

void ProblemParams::validate() const {
  std::ostringstream msg;
  if (!(alpha > 1.0 && alpha <= 2.0)) msg << "alpha must lie in (1,2]; ";
  if (!(sigma > 0.0)) msg << "sigma must be positive; ";
  if (gamma != 1 && gamma != -1) msg << "gamma must be +1 or -1; ";
  if (!(T > 0.0)) msg << "T must be positive; ";
  if (!msg.str().empty()) throw ValidationError(msg.str());
}

double ProblemParams::c_star() const { return std::pow(M_PI / T, alpha - 1.0); }
double ProblemParams::omega_bound() const { return std::pow(M_PI / T, alpha); }

double charge(const AntiperiodicField& u) {
  double s = 0.0;
  for (const auto& z : u.coeffs()) s += std::norm(z);
  return 0.5 * u.half_period() * s;
}

double momentum(const AntiperiodicField& u) {
  double s = 0.0;
  for (int i = 0; i < u.size(); ++i) s += u.wavenumber(i) * std::norm(u[i]);
  return -0.5 * M_PI * s;
}

double kinetic(const AntiperiodicField& u, double alpha) {
  const double T = u.half_period();
  double s = 0.0;
  for (int i = 0; i < u.size(); ++i) s += std::pow(std::abs(M_PI * u.wavenumber(i) / T), alpha) * std::norm(u[i]);
  return 0.5 * T * s;
}

double potential(const AntiperiodicField& u, double sigma, int N) {
  if (N == 0) N = default_grid(u.mode_count());
  const GridSamples g = to_grid(u, N);
  const double q = 2.0 * sigma + 2.0;
  double s = 0.0;
  for (const auto& z : g.values) s += std::pow(std::abs(z), q);
  // int_0^T = half of the full-period trapezoid sum.
  return 0.5 * g.spacing() * s / q;
}

double hamiltonian(const AntiperiodicField& u, const ProblemParams& p, int N) {
  return kinetic(u, p.alpha) - p.gamma * potential(u, p.sigma, N);
}

double F_c(const AntiperiodicField& u, double c, const ProblemParams& p, int N) {
  return hamiltonian(u, p, N) + c * momentum(u);
}

double lagrangian(const AntiperiodicField& u, double c, double omega, const ProblemParams& p, int N) {
  return hamiltonian(u, p, N) + omega * charge(u) + c * momentum(u);
}

FunctionalValues evaluate(const AntiperiodicField& u, const ProblemParams& p, double c, double omega, int N) {
  FunctionalValues v;
  v.K = kinetic(u, p.alpha);
  v.P = potential(u, p.sigma, N);
  v.Q = charge(u);
  v.N = momentum(u);
  v.H = v.K - p.gamma * v.P;
  v.F_c = v.H + c * v.N;
  v.E = v.F_c + omega * v.Q;
  v.c = c;
  v.omega = omega;
  return v;
}

AntiperiodicField nonlinearity(const AntiperiodicField& u, double sigma, int N) {
  if (N == 0) N = default_grid(u.mode_count());
  GridSamples g = to_grid(u, N);
  for (auto& z : g.values) z *= std::pow(std::abs(z), 2.0 * sigma);
  ModeProjection pr = project_modes(g, u.mode_count());
  if (pr.even_energy > kEpsAnti)
    throw AntiperiodicityViolation("aliasing defect " + std::to_string(pr.even_energy) + " in nonlinear term");
  return std::move(pr.field);
}

AntiperiodicField grad_kinetic(const AntiperiodicField& u, double alpha) {
  return apply_multiplier(u, fractional_laplacian(alpha, u.half_period()));
}

AntiperiodicField grad_momentum(const AntiperiodicField& u) {
  // i u'
  AntiperiodicField r(u);
  for (int i = 0; i < r.size(); ++i) r[i] *= -M_PI * r.wavenumber(i) / u.half_period();
  return r;
}

AntiperiodicField gradient(const AntiperiodicField& u, double c, double omega, const ProblemParams& p, int N) {
  const double T = u.half_period();
  AntiperiodicField r(u);
  for (int i = 0; i < r.size(); ++i) {
    const double kk = M_PI * r.wavenumber(i) / T;
    r[i] *= std::pow(std::abs(kk), p.alpha) + omega - c * kk;
  }
  if (u.max_abs_coeff() > 0.0) {
    AntiperiodicField nl = nonlinearity(u, p.sigma, N);
    for (int i = 0; i < r.size(); ++i) r[i] -= static_cast<double>(p.gamma) * nl[i];
  }
  return r;
}

}  // namespace fnls
