#include "fnls/dynamics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "fnls/errors.hpp"
#include "fnls/functionals.hpp"
#include "fnls/parallel.hpp"

namespace fnls {

Propagator::Propagator(const ProblemParams& params, double omega, double c, double dt, int M, bool nonlinear)
    : params_(params), dt_(dt), M_(M), N_(4 * M), nonlinear_(nonlinear), u_(N_), work_(N_), linear_(N_) {
  if (!(dt > 0.0)) throw ValidationError("time step must be positive");
  const double T = params.T;
  for (int n = 0; n < N_; ++n) {
    const int k = n < N_ / 2 ? n : n - N_;
    const double kk = M_PI * k / T;
    const double symbol = std::pow(std::abs(kk), params.alpha) + omega - c * kk;
    linear_[n] = std::polar(1.0 / N_, -symbol * dt);
  }
}

void Propagator::load(const AntiperiodicField& u) {
  if (u.mode_count() > M_) throw ValidationError("field has more modes than the propagator");
  u_ = to_grid(u, N_).values;
}

AntiperiodicField Propagator::field() const {
  return project_modes(GridSamples{params_.T, u_}, M_).field;
}

double Propagator::sup_norm() const {
  double m = 0.0;
  for (const cplx& v : u_) m = std::max(m, std::abs(v));
  return m;
}

void Propagator::rotate(double tau) {
  const double g = params_.gamma * tau;
  const double s = params_.sigma;
  for (cplx& v : u_) {
    const double a2 = std::norm(v);
    const double amp = s == 1.0 ? a2 : (s == 2.0 ? a2 * a2 : std::pow(a2, s));
    v *= std::polar(1.0, g * amp);
  }
}

void Propagator::advance(long steps) {
  for (long i = 0; i < steps; ++i) {
    if (nonlinear_) rotate(0.5 * dt_);
    fft::dft(u_.data(), work_.data(), N_, -1);
    for (int n = 0; n < N_; ++n) work_[n] *= linear_[n];
    fft::dft(work_.data(), u_.data(), N_, +1);
    if (nonlinear_) rotate(0.5 * dt_);
  }
}

void step(EvolutionState& state, const ProblemParams& params, double omega, double c) {
  Propagator prop(params, omega, c, state.dt, state.field.mode_count());
  prop.load(state.field);
  prop.advance(1);
  state.field = prop.field();
  state.time += state.dt;
}

namespace {

ConservedSample sample(const AntiperiodicField& u, const ProblemParams& params, double t, int N) {
  return {t, hamiltonian(u, params, N), charge(u), momentum(u)};
}

}  // namespace

EvolutionState evolve(const AntiperiodicField& u0, const ProblemParams& params, const EvolveOptions& opt) {
  ProblemParams p = params;
  Propagator prop(p, opt.omega, opt.c, opt.dt, u0.mode_count(), opt.nonlinear);
  prop.load(u0);
  EvolutionState st;
  st.dt = opt.dt;
  st.field = u0;
  const int N = prop.grid();
  if (!opt.nonlinear) p.gamma = 0;
  st.conserved_log.push_back(sample(u0, p, 0.0, N));
  const long every = std::max(1L, opt.log_every);
  for (long done = 0; done < opt.steps;) {
    const long chunk = std::min(every, opt.steps - done);
    prop.advance(chunk);
    done += chunk;
    const double sup = prop.sup_norm();
    if (!(sup <= opt.blowup_guard)) {
      std::ostringstream os;
      os << "||u||_inf = " << sup << " exceeds guard " << opt.blowup_guard << " at t = " << done * opt.dt;
      throw BlowupDetected(os.str());
    }
    st.field = prop.field();
    st.conserved_log.push_back(sample(st.field, p, done * opt.dt, N));
  }
  st.time = opt.steps * opt.dt;
  return st;
}

DriftSummary conservation_drift(const std::vector<ConservedSample>& log) {
  DriftSummary d;
  if (log.empty()) return d;
  const ConservedSample& s0 = log.front();
  const double hs = std::max(std::abs(s0.H), 1e-300);
  const double qs = std::max(std::abs(s0.Q), 1e-300);
  const double ns = std::max({std::abs(s0.N), std::abs(s0.Q), 1e-300});
  for (const auto& s : log) {
    d.H = std::max(d.H, std::abs(s.H - s0.H) / hs);
    d.Q = std::max(d.Q, std::abs(s.Q - s0.Q) / qs);
    d.N = std::max(d.N, std::abs(s.N - s0.N) / ns);
  }
  return d;
}

double orbital_distance(const AntiperiodicField& u, const StandingProfile& phi) {
  const int M = std::max(u.mode_count(), phi.field.mode_count());
  const AntiperiodicField ref = phi.field.resized(M);
  const Alignment al = align_to(u.resized(M), ref, phi.params.alpha, true);
  return x_norm(al.aligned - ref, phi.params.alpha);
}

AntiperiodicField make_perturbation(const StandingProfile& phi, double eps, std::mt19937_64& rng,
                                    bool preserve_momentum, int active_modes) {
  const double T = phi.params.T, alpha = phi.params.alpha;
  const int M = phi.field.mode_count();
  AntiperiodicField v = random_field(T, M, active_modes, rng, true);
  AntiperiodicField tangent = apply_multiplier(phi.field, derivative(T));
  tangent *= cplx(0.0, 1.0);  // i phi'
  if (preserve_momentum) v -= (inner(v, tangent) / inner(tangent, tangent)) * tangent;
  v *= eps / x_norm(v, alpha);
  if (preserve_momentum) {
    // N is quadratic and N(i phi') = 0 for real phi, so N(w + s i phi') is affine in s.
    const AntiperiodicField w = phi.field + v;
    const double n0 = momentum(w);
    const double slope = momentum(w + tangent) - n0;
    v += (-n0 / slope) * tangent;
  }
  return v;
}

CoercivityReport coercivity_check(const StandingProfile& phi, int size) {
  CoercivityReport r;
  const double T = phi.params.T, alpha = phi.params.alpha;
  const int Nq = quadrature_grid(size, phi);
  const AntiperiodicField dphi = apply_multiplier(phi.field, derivative(T)).real_part();
  auto constrained_min = [&](Which which, Sector sector) {
    const SectorOperator op = assemble(phi, which, sector, size, Nq);
    const Eigen::VectorXd c = sector_coefficients(sector == Sector::even ? phi.field : dphi, sector, size);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
    const Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd Z = Q.rightCols(size - 1);
    Eigen::VectorXd w(size);
    for (int j = 0; j < size; ++j) w(j) = 1.0 + std::pow(M_PI * (2 * j + 1) / T, alpha);
    const Eigen::MatrixXd A = Z.transpose() * op.matrix * Z;
    const Eigen::MatrixXd B = Z.transpose() * w.asDiagonal() * Z;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceFailure("constrained eigensolve failed");
    return es.eigenvalues()(0);
  };
  r.plus_even = constrained_min(Which::L_plus, Sector::even);
  r.plus_odd = constrained_min(Which::L_plus, Sector::odd);
  r.minus_even = constrained_min(Which::L_minus, Sector::even);
  r.minus_odd = constrained_min(Which::L_minus, Sector::odd);
  r.minimum = std::min({r.plus_even, r.plus_odd, r.minus_even, r.minus_odd});
  r.positive = r.minimum > 0.0;
  return r;
}

StabilityIndices stability_indices(const StandingProfile& phi, const SolverSettings& s, int size, double delta) {
  StabilityIndices out;
  out.delta = delta;
  auto richardson = [&](double a, double b) {
    out.richardson = std::abs(a - b) / std::max(std::abs(b), 1e-300);
    if (out.richardson > 1e-4) {
      std::ostringstream os;
      os << "central differences at " << delta << " and " << delta / 2 << " disagree by " << out.richardson;
      throw StepTooLarge(os.str());
    }
  };
  if (!phi.params.focusing()) {
    const JordanReport a = jordan_structure(phi, s, size, delta);
    const JordanReport b = jordan_structure(phi, s, size, delta / 2);
    out.dNdc = a.dNdc;
    out.dNdc_half = b.dNdc;
    out.dQdmu = b.dQdmu;
    richardson(a.dNdc, b.dNdc);
    return out;
  }
  auto dQ = [&](double h) {
    const StandingProfile up = solve_focusing(phi.params, phi.omega + h, phi.p0, s, phi.field);
    const StandingProfile dn = solve_focusing(phi.params, phi.omega - h, phi.p0, s, phi.field);
    return (charge(up.field) - charge(dn.field)) / (2.0 * h);
  };
  out.dQdomega = dQ(delta);
  out.dQdomega_half = dQ(delta / 2);
  richardson(out.dQdomega, out.dQdomega_half);
  const SectorSpectrum sp = eigensolve(assemble(phi, Which::L_plus, Sector::even, size));
  const Eigen::VectorXd p = sector_coefficients(phi.field, Sector::even, size);
  // the even block of L_plus has no kernel; the tolerance only guards a degenerate solve
  const Eigen::VectorXd y = deflated_solve(sp, p, 1e-12);
  out.lplus_inverse_pairing = 0.5 * p.dot(y);
  return out;
}

StabilityReport stability_experiment(const StandingProfile& phi, const StabilityOptions& opt) {
  const double T = phi.params.T;
  StabilityReport rep;
  rep.horizon = opt.horizon > 0.0 ? opt.horizon : 100.0 * T;
  rep.dt = opt.dt;
  const double log_dt = opt.log_interval > 0.0 ? opt.log_interval : T / 20.0;
  const long every = std::max(1L, std::lround(log_dt / opt.dt));
  const long steps = std::lround(rep.horizon / opt.dt);
  const int Me = std::max(2 * phi.field.mode_count(), phi.grid / 4);
  const double guard = opt.guard_factor * sup_norm(phi.field, 4 * Me);

  std::mt19937_64 rng(opt.seed);
  std::vector<AntiperiodicField> perts;
  std::vector<double> eps_of;
  for (double e : opt.eps)
    for (int i = 0; i < opt.perturbations; ++i) {
      perts.push_back(make_perturbation(phi, e, rng, opt.preserve_momentum));
      eps_of.push_back(e);
    }

  rep.runs.resize(perts.size());
  auto run_one = [&](std::size_t i) {
    StabilityRun& run = rep.runs[i];
    run.eps = eps_of[i];
    run.v_norm = x_norm(perts[i], phi.params.alpha);
    const AntiperiodicField u0 = (phi.field + perts[i]).resized(Me);
    run.N_initial = momentum(u0);
    Propagator prop(phi.params, phi.omega, phi.c, opt.dt, Me);
    prop.load(u0);
    std::vector<ConservedSample> log;
    const int N = prop.grid();
    log.push_back(sample(u0, phi.params, 0.0, N));
    run.times.push_back(0.0);
    run.rho.push_back(orbital_distance(u0, phi));
    for (long done = 0; done < steps;) {
      const long chunk = std::min(every, steps - done);
      prop.advance(chunk);
      done += chunk;
      const double t = done * opt.dt;
      if (!(prop.sup_norm() <= guard)) {
        std::ostringstream os;
        os << "perturbed run (eps " << run.eps << ") exceeded the guard at t = " << t;
        throw BlowupDetected(os.str());
      }
      const AntiperiodicField u = prop.field();
      log.push_back(sample(u, phi.params, t, N));
      run.times.push_back(t);
      run.rho.push_back(orbital_distance(u, phi));
    }
    run.drift = conservation_drift(log);
    run.rho_max = *std::max_element(run.rho.begin(), run.rho.end());
    run.C_emp = run.rho_max / run.v_norm;
    const std::size_t n = run.rho.size(), third = std::max<std::size_t>(1, n / 3);
    const double first = *std::max_element(run.rho.begin(), run.rho.begin() + third);
    const double last = *std::max_element(run.rho.end() - third, run.rho.end());
    run.trend_ratio = last / first;
  };

  parallel_for(perts.size(), opt.workers, run_one);

  for (const auto& run : rep.runs) {
    rep.C_emp = std::max(rep.C_emp, run.C_emp);
    if (run.drift.max() > opt.tol_cons) {
      std::ostringstream os;
      os << "relative drift (H " << run.drift.H << ", Q " << run.drift.Q << ", N " << run.drift.N
         << ") exceeds " << opt.tol_cons << " for eps " << run.eps;
      throw ConservationDriftExceeded(os.str());
    }
  }
  return rep;
}

}  // namespace fnls
