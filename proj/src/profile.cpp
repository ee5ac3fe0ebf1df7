#include "fnls/profile.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "fnls/errors.hpp"

namespace fnls {

namespace {

inline int wrap(int k, int N) { return ((k % N) + N) % N; }

double sup(const AntiperiodicField& f, int N) { return to_grid(f, N).max_abs(); }

AntiperiodicField fundamental(double T, int M, double amplitude) {
  AntiperiodicField f(T, M);
  f[f.index(1)] = 0.5 * amplitude;
  f[f.index(-1)] = 0.5 * amplitude;
  return f;
}

// Diagonal metric |pi k/T|^alpha + shift.
double metric_weight(int k, double alpha, double T, double shift) {
  return std::pow(std::abs(M_PI * k / T), alpha) + shift;
}

AntiperiodicField precondition(const AntiperiodicField& r, double alpha, double shift) {
  AntiperiodicField d(r);
  for (int i = 0; i < d.size(); ++i) d[i] /= metric_weight(d.wavenumber(i), alpha, r.half_period(), shift);
  return d;
}

double metric_norm2(const AntiperiodicField& s, double alpha, double shift) {
  double acc = 0.0;
  for (int i = 0; i < s.size(); ++i)
    acc += metric_weight(s.wavenumber(i), alpha, s.half_period(), shift) * std::norm(s[i]);
  return s.half_period() * acc;
}

// Barzilai-Borwein step in the preconditioned metric, safeguarded.
double bb_step(const AntiperiodicField& ds, const AntiperiodicField& dy, double alpha, double shift) {
  const double sy = inner(ds, dy);
  if (!(sy > 0.0)) return 1.0;
  return std::clamp(metric_norm2(ds, alpha, shift) / sy, 1e-6, 1e6);
}

struct NewtonOutcome {
  AntiperiodicField u;
  double omega = 0.0;
  double residual = 0.0;
  double energy_change = 0.0;
  int iterations = 0;
};

// Bordered Newton iteration on the profile equation. Unknowns: real and imaginary parts of all
// coefficients, omega (when the charge is fixed), and two multipliers for the phase and translation
// directions, which are the kernel of the linearization.
NewtonOutcome newton_polish(AntiperiodicField u, double omega, const ProblemParams& p, double c, bool fix_charge,
                            double mu, int N, bool real_mode, int max_it) {
  const double T = u.half_period();
  const int n = u.size();
  const int dim = 2 * n;
  const int extra = (fix_charge ? 1 : 0) + 2;
  const double g = p.gamma;

  auto energy = [&](const AntiperiodicField& v, double om) { return lagrangian(v, c, om, p, N); };

  NewtonOutcome best{u, omega, sup(gradient(u, c, omega, p, N), N), 0.0, 0};
  double res = best.residual;
  double prev_energy = energy(u, omega);
  int stalls = 0;

  for (int it = 0; it < max_it; ++it) {
    const AntiperiodicField R = gradient(u, c, omega, p, N);
    const GridSamples ug = to_grid(u, N);
    CVec a(N), b(N), ahat(N), bhat(N);
    for (int j = 0; j < N; ++j) {
      const cplx z = ug.values[j];
      const double m = std::abs(z);
      a[j] = (1.0 + p.sigma) * std::pow(m, 2.0 * p.sigma);
      b[j] = m > 0.0 ? p.sigma * std::pow(m, 2.0 * p.sigma - 2.0) * z * z : cplx{};
    }
    fft::dft(a.data(), ahat.data(), N, -1);
    fft::dft(b.data(), bhat.data(), N, -1);
    for (int j = 0; j < N; ++j) {
      ahat[j] /= static_cast<double>(N);
      bhat[j] /= static_cast<double>(N);
    }

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim + extra, dim + extra);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim + extra);
    for (int i = 0; i < n; ++i) {
      const int k = u.wavenumber(i);
      const double kk = M_PI * k / T;
      const double D = std::pow(std::abs(kk), p.alpha) + omega - c * kk;
      for (int l = 0; l < n; ++l) {
        const int m = u.wavenumber(l);
        const cplx A = ahat[wrap(k - m, N)];
        const cplx B = bhat[wrap(k + m, N)];
        J(i, l) = -g * (A.real() + B.real());
        J(i, n + l) = -g * (-A.imag() + B.imag());
        J(n + i, l) = -g * (A.imag() + B.imag());
        J(n + i, n + l) = -g * (A.real() - B.real());
      }
      J(i, i) += D;
      J(n + i, n + i) += D;
      rhs(i) = -R[i].real();
      rhs(n + i) = -R[i].imag();
    }
    Eigen::VectorXd zu(dim), ziu(dim), zdu(dim);
    for (int i = 0; i < n; ++i) {
      const double kk = M_PI * u.wavenumber(i) / T;
      zu(i) = u[i].real();
      zu(n + i) = u[i].imag();
      ziu(i) = -u[i].imag();
      ziu(n + i) = u[i].real();
      zdu(i) = -kk * u[i].imag();
      zdu(n + i) = kk * u[i].real();
    }
    const double nu = zu.norm();
    int col = dim;
    if (fix_charge) {
      J.block(0, col, dim, 1) = zu / nu;
      J.block(col, 0, 1, dim) = (zu / nu).transpose();
      rhs(col) = (mu - charge(u)) / (T * nu);
      ++col;
    }
    J.block(0, col, dim, 1) = ziu / ziu.norm();
    J.block(col, 0, 1, dim) = (ziu / ziu.norm()).transpose();
    ++col;
    J.block(0, col, dim, 1) = zdu / zdu.norm();
    J.block(col, 0, 1, dim) = (zdu / zdu.norm()).transpose();

    const Eigen::VectorXd step = J.partialPivLu().solve(rhs);
    AntiperiodicField du(T, u.mode_count());
    for (int i = 0; i < n; ++i) du[i] = cplx(step(i), step(n + i));
    const double domega = fix_charge ? step(dim) / nu : 0.0;

    // Damped update: halve the step while the residual grows by more than a factor 2.
    double lambda = 1.0;
    AntiperiodicField trial;
    double trial_omega = omega, trial_res = 0.0;
    for (int bt = 0; bt < 8; ++bt) {
      trial = u + lambda * du;
      if (real_mode) trial = trial.real_part();
      trial_omega = omega + lambda * domega;
      trial_res = sup(gradient(trial, c, trial_omega, p, N), N);
      if (trial_res <= 2.0 * res || trial_res < 1e-12) break;
      lambda *= 0.5;
    }
    const double e = energy(trial, trial_omega);
    const double de = std::abs(e - prev_energy) / std::max(std::abs(e), 1e-300);
    u = trial;
    omega = trial_omega;
    prev_energy = e;
    const double old = res;
    res = trial_res;
    if (res < best.residual) {
      best.u = u;
      best.omega = omega;
      best.residual = res;
      best.energy_change = de;
    }
    best.iterations = it + 1;
    if (res > 0.5 * old) {
      if (++stalls >= 2) break;
    } else {
      stalls = 0;
    }
    if (res < 1e-15) break;
  }
  return best;
}

double omega_from(const AntiperiodicField& u, double c, const ProblemParams& p, int N) {
  // omega = -<Lambda^a u + i c u' + |u|^{2s} u, u> / (2 Q)
  const AntiperiodicField g = gradient(u, c, 0.0, p, N);
  return -inner(g, u) / (2.0 * charge(u));
}

void finalize(StandingProfile& out) {
  out.residual = profile_residual(out);
  if (out.c == 0.0) {
    StandingProfile fixed = gauge_fix(out);
    out = fixed;
  }
}

}  // namespace

AntiperiodicField profile_residual_field(const StandingProfile& p) {
  return gradient(p.field, p.c, p.omega, p.params, p.grid);
}

double profile_residual(const StandingProfile& p) { return sup(profile_residual_field(p), p.grid); }

StandingProfile solve_defocusing(const ProblemParams& params, double c, double mu, const SolverSettings& s,
                                 const std::optional<AntiperiodicField>& init) {
  params.validate();
  if (params.gamma != -1) throw ValidationError("solve_defocusing requires gamma = -1");
  if (std::abs(c) >= params.c_star())
    throw SpeedOutOfRange("|c| = " + std::to_string(std::abs(c)) + " must be below c_* = " +
                          std::to_string(params.c_star()));
  if (!(mu > 0.0)) throw ValidationError("mu must be positive");

  const double T = params.T;
  const int M = s.modes;
  const int N = s.grid_size();
  AntiperiodicField u = init ? init->resized(M) : fundamental(T, M, std::sqrt(4.0 * mu / T));
  const double q0 = charge(u);
  if (!(q0 > 0.0)) throw ValidationError("initial field must be nonzero");
  u *= cplx(std::sqrt(mu / q0), 0.0);
  const bool real_mode = c == 0.0 && u.is_real(1e-8);
  if (real_mode) u = u.real_part();
  const bool warm = init.has_value() && c != 0.0;

  StandingProfile out;
  out.params = params;
  out.c = c;
  out.mu = mu;
  out.grid = N;

  const double shift = params.omega_bound();
  const double F_init = F_c(u, c, params, N);
  int it = 0;
  if (!warm) {
    AntiperiodicField u_prev, r_prev;
    bool have_prev = false;
    std::deque<double> recent{F_init};
    for (; it < s.max_iter; ++it) {
      const AntiperiodicField g = gradient(u, c, 0.0, params, N);
      const double om = -inner(g, u) / (2.0 * mu);
      const AntiperiodicField r = g + om * u;
      if (sup(r, N) < s.newton_switch) break;
      double tau = have_prev ? bb_step(u - u_prev, r - r_prev, params.alpha, shift) : 1.0;
      AntiperiodicField d = precondition(r, params.alpha, shift);
      d -= (inner(d, u) / inner(u, u)) * u;
      const double Fmax = *std::max_element(recent.begin(), recent.end());
      AntiperiodicField v;
      double Fv = 0.0;
      for (int bt = 0; bt < 60; ++bt) {
        v = u - tau * d;
        v *= cplx(std::sqrt(mu / charge(v)), 0.0);
        if (real_mode) v = v.real_part();
        Fv = F_c(v, c, params, N);
        if (Fv <= Fmax) break;
        tau *= 0.5;
      }
      u_prev = u;
      r_prev = r;
      have_prev = true;
      u = v;
      recent.push_back(Fv);
      if (recent.size() > 10) recent.pop_front();
    }
    if (it >= s.max_iter) throw NonConvergence("gradient stage exhausted max_iter at mu = " + std::to_string(mu));
  }

  const double omega0 = omega_from(u, c, params, N);
  NewtonOutcome nw = newton_polish(u, omega0, params, c, true, mu, N, real_mode, s.max_newton);
  nw.u *= cplx(std::sqrt(mu / charge(nw.u)), 0.0);
  out.field = nw.u;
  out.omega = nw.omega;
  out.iterations = it;
  out.newton_iterations = nw.iterations;
  out.energy = F_c(out.field, c, params, N);
  out.energy_change = nw.energy_change;
  out.p0 = potential(out.field, params.sigma, N);
  finalize(out);
  if (!(out.residual <= s.tol))
    throw NonConvergence("residual " + std::to_string(out.residual) + " above tolerance at c = " +
                         std::to_string(c) + ", mu = " + std::to_string(mu));
  if (!warm && out.energy > F_init + 1e-12 * std::abs(F_init))
    throw NonConvergence("final energy exceeds the initial energy");
  return out;
}

StandingProfile solve_focusing(const ProblemParams& params, double omega, double p0, const SolverSettings& s,
                               const std::optional<AntiperiodicField>& init) {
  params.validate();
  if (params.gamma != 1) throw ValidationError("solve_focusing requires gamma = +1");
  if (std::abs(omega) >= params.omega_bound())
    throw OmegaOutOfRange("|omega| = " + std::to_string(std::abs(omega)) + " must be below (pi/T)^alpha = " +
                          std::to_string(params.omega_bound()));
  if (!init && !(p0 > 0.0)) throw ValidationError("p0 must be positive");

  const double T = params.T;
  const int M = s.modes;
  const int N = s.grid_size();
  const double q = 2.0 * params.sigma + 2.0;
  StandingProfile out;
  out.params = params;
  out.omega = omega;
  out.grid = N;

  AntiperiodicField u;
  int it = 0;
  bool real_mode = true;
  if (init) {
    u = init->resized(M);
    real_mode = u.is_real(1e-8);
    if (real_mode) u = u.real_part();
  } else {
    u = fundamental(T, M, 1.0);
    u *= cplx(std::pow(p0 / potential(u, params.sigma, N), 1.0 / q), 0.0);
    auto R = [&](const AntiperiodicField& v) { return kinetic(v, params.alpha) + omega * charge(v); };
    const double shift = params.omega_bound();
    AntiperiodicField u_prev, r_prev;
    bool have_prev = false;
    std::deque<double> recent{R(u)};
    for (; it < s.max_iter; ++it) {
      AntiperiodicField gR = grad_kinetic(u, params.alpha) + omega * u;
      const AntiperiodicField gP = nonlinearity(u, params.sigma, N);
      const double eta = -inner(gR, u) / inner(gP, u);
      const AntiperiodicField r = gR + eta * gP;
      if (sup(r, N) < s.newton_switch * std::max(1.0, sup(gR, N))) break;
      double tau = have_prev ? bb_step(u - u_prev, r - r_prev, params.alpha, shift) : 1.0;
      AntiperiodicField d = precondition(r, params.alpha, shift);
      d -= (inner(d, gP) / inner(gP, gP)) * gP;
      const double Rmax = *std::max_element(recent.begin(), recent.end());
      AntiperiodicField v;
      double Rv = 0.0;
      for (int bt = 0; bt < 60; ++bt) {
        v = u - tau * d;
        v *= cplx(std::pow(p0 / potential(v, params.sigma, N), 1.0 / q), 0.0);
        v = v.real_part();
        Rv = R(v);
        if (Rv <= Rmax) break;
        tau *= 0.5;
      }
      u_prev = u;
      r_prev = r;
      have_prev = true;
      u = v;
      recent.push_back(Rv);
      if (recent.size() > 10) recent.pop_front();
    }
    if (it >= s.max_iter) throw NonConvergence("gradient stage exhausted max_iter at omega = " + std::to_string(omega));
    const double Rfin = R(u);
    const double eta = -Rfin / ((params.sigma + 1.0) * potential(u, params.sigma, N));
    out.eta = eta;
    out.energy = Rfin;
    if (!(eta < 0.0)) throw PositiveEta("multiplier eta = " + std::to_string(eta));
    // psi = |eta|^{1/(2 sigma)} u solves Lambda psi + omega psi - |psi|^{2 sigma} psi = 0.
    u *= cplx(std::pow(-eta, 1.0 / (2.0 * params.sigma)), 0.0);
  }

  NewtonOutcome nw = newton_polish(u, omega, params, 0.0, false, 0.0, N, real_mode, s.max_newton);
  out.field = nw.u;
  out.iterations = it;
  out.newton_iterations = nw.iterations;
  out.energy_change = nw.energy_change;
  out.mu = charge(out.field);
  out.p0 = potential(out.field, params.sigma, N);
  if (init) out.energy = kinetic(out.field, params.alpha) + omega * out.mu;
  finalize(out);
  if (!(out.residual <= s.tol))
    throw NonConvergence("residual " + std::to_string(out.residual) + " above tolerance at omega = " +
                         std::to_string(omega));
  return out;
}

void evaluate_at(const AntiperiodicField& f, double x, cplx* v, cplx* d1, cplx* d2) {
  const double T = f.half_period();
  cplx s0{}, s1{}, s2{};
  for (int i = 0; i < f.size(); ++i) {
    const double kk = M_PI * f.wavenumber(i) / T;
    const cplx e = f[i] * cplx(std::cos(kk * x), std::sin(kk * x));
    s0 += e;
    s1 += cplx(0.0, kk) * e;
    s2 += -kk * kk * e;
  }
  if (v) *v = s0;
  if (d1) *d1 = s1;
  if (d2) *d2 = s2;
}

StandingProfile gauge_fix(const StandingProfile& p) {
  const AntiperiodicField& u = p.field;
  const double T = u.half_period();
  const int Ng = std::max(p.grid, 8 * u.mode_count());
  const GridSamples g = to_grid(u, Ng);
  int jmax = 0;
  for (int j = 1; j < Ng; ++j)
    if (std::abs(g.values[j]) > std::abs(g.values[jmax])) jmax = j;
  double x = g.x(jmax);
  // Newton on h(x) = Re(conj(u) u') = (|u|^2)'/2.
  double curvature = 0.0;
  for (int it = 0; it < 60; ++it) {
    cplx v, d1, d2;
    evaluate_at(u, x, &v, &d1, &d2);
    const double h = (std::conj(v) * d1).real();
    curvature = std::norm(d1) + (std::conj(v) * d2).real();
    if (!(curvature < 0.0)) break;
    const double dx = -h / curvature;
    x += std::clamp(dx, -g.spacing(), g.spacing());
    if (std::abs(dx) < 1e-15 * T) break;
  }
  {
    cplx v, d1, d2;
    evaluate_at(u, x, &v, &d1, &d2);
    curvature = std::norm(d1) + (std::conj(v) * d2).real();
    const double scale = std::norm(v) * std::pow(M_PI / T, 2.0);
    if (!(curvature < -1e-8 * scale))
      throw GaugeAmbiguity("flat maximum of |u|^2 near x = " + std::to_string(x));
  }
  AntiperiodicField f = u.translated(-x);
  cplx v0{};
  for (const auto& z : f.coeffs()) v0 += z;
  f *= std::conj(v0) / std::abs(v0);

  StandingProfile out(p);
  const GridSamples fg = to_grid(f, Ng);
  double imag = 0.0, even = 0.0;
  for (int j = 0; j < Ng; ++j) {
    imag = std::max(imag, std::abs(fg.values[j].imag()));
    even = std::max(even, std::abs(fg.values[j] - fg.values[(Ng - j) % Ng]));
  }
  const double scale = std::max(fg.max_abs(), 1e-300);
  out.imag_defect = imag / scale;
  out.evenness_defect = even;
  if (p.c == 0.0 && out.imag_defect <= kEpsReal) f = f.real_part();
  out.field = f;
  return out;
}

Alignment align_to(const AntiperiodicField& u, const AntiperiodicField& ref, double weight_alpha, bool use_weight) {
  const double T = u.half_period();
  const int M = std::max(u.mode_count(), ref.mode_count());
  const AntiperiodicField a = u.resized(M), r = ref.resized(M);
  CVec w(a.size());
  for (int i = 0; i < a.size(); ++i) {
    const int k = a.wavenumber(i);
    const double wt = use_weight ? 1.0 + std::pow(std::abs(M_PI * k / T), weight_alpha) : 1.0;
    w[i] = wt * a[i] * std::conj(r[i]);
  }
  // C(x) = sum_k w_k exp(i pi k x / T); maximize |C| over x.
  auto C = [&](double x, cplx* c0, cplx* c1, cplx* c2) {
    cplx s0{}, s1{}, s2{};
    for (int i = 0; i < a.size(); ++i) {
      const double kk = M_PI * a.wavenumber(i) / T;
      const cplx e = w[i] * cplx(std::cos(kk * x), std::sin(kk * x));
      s0 += e;
      s1 += cplx(0.0, kk) * e;
      s2 += -kk * kk * e;
    }
    *c0 = s0;
    *c1 = s1;
    *c2 = s2;
  };
  const int Ns = 8 * M;
  CVec buf(Ns), vals(Ns);
  for (int i = 0; i < a.size(); ++i) buf[wrap(a.wavenumber(i), Ns)] = w[i];
  fft::dft(buf.data(), vals.data(), Ns, +1);
  int jmax = 0;
  for (int j = 1; j < Ns; ++j)
    if (std::abs(vals[j]) > std::abs(vals[jmax])) jmax = j;
  const double h = 2.0 * T / Ns;
  double x = jmax * h;
  for (int it = 0; it < 60; ++it) {
    cplx c0, c1, c2;
    C(x, &c0, &c1, &c2);
    const double gp = (std::conj(c0) * c1).real();
    const double gpp = std::norm(c1) + (std::conj(c0) * c2).real();
    if (!(gpp < 0.0)) break;
    const double dx = std::clamp(-gp / gpp, -h, h);
    x += dx;
    if (std::abs(dx) < 1e-15 * T) break;
  }
  cplx c0, c1, c2;
  C(x, &c0, &c1, &c2);
  Alignment out;
  out.shift = x;
  out.phase = std::arg(c0);
  // exp(-i phase) u(. + x)
  out.aligned = u.translated(-x);
  out.aligned *= std::polar(1.0, -out.phase);
  return out;
}

double modulus_variation(const AntiperiodicField& u, int N) {
  const GridSamples g = to_grid(u, N);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const cplx& z : g.values) {
    lo = std::min(lo, std::abs(z));
    hi = std::max(hi, std::abs(z));
  }
  return hi > 0.0 ? (hi - lo) / hi : 0.0;
}

ContinuationResult continue_in(const StandingProfile& p, ContinuationParam which, double target, int steps,
                               const SolverSettings& s) {
  ContinuationResult res;
  const double v0 = which == ContinuationParam::c ? p.c : (which == ContinuationParam::mu ? p.mu : p.omega);
  AntiperiodicField prev = p.field;
  const double start_variation = modulus_variation(p.field, std::max(p.grid, 4 * p.field.mode_count()));
  for (int i = 1; i <= steps; ++i) {
    const double v = v0 + (target - v0) * static_cast<double>(i) / steps;
    try {
      StandingProfile q;
      switch (which) {
        case ContinuationParam::c:
          q = solve_defocusing(p.params, v, p.mu, s, prev);
          break;
        case ContinuationParam::mu:
          q = solve_defocusing(p.params, p.c, v, s, prev);
          break;
        case ContinuationParam::omega:
          q = solve_focusing(p.params, v, 0.0, s, prev);
          break;
      }
      if (q.c != 0.0) q.field = align_to(q.field, prev.resized(q.field.mode_count()), 0.0, false).aligned;
      if (start_variation > 1e-3 && modulus_variation(q.field, q.grid) < 1e-6) {
        res.failed = true;
        res.failed_at = v;
        res.message = "profile collapsed onto a plane wave at " + std::to_string(v);
        break;
      }
      prev = q.field;
      res.profiles.push_back(q);
      res.values.push_back(v);
    } catch (const NonConvergence& e) {
      res.failed = true;
      res.failed_at = v;
      res.message = e.what();
      break;
    }
  }
  return res;
}

}  // namespace fnls
