#include "fnls/linearized.hpp"

#include <algorithm>
#include <cmath>

#include "fnls/errors.hpp"

namespace fnls {

namespace {

inline int wrap(int k, int N) { return ((k % N) + N) % N; }

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

double potential_coefficient(const ProblemParams& pp, Which which) {
  return which == Which::L_plus ? -pp.gamma * (2.0 * pp.sigma + 1.0) : -static_cast<double>(pp.gamma);
}

void require_real(const StandingProfile& p) {
  if (p.c != 0.0) throw ProfileNotReal("sector assembly needs c = 0");
  if (!p.field.is_real(kEpsReal)) throw ProfileNotReal("profile has an imaginary part above tolerance");
}

// Smallest potential-independent scale of the operator pair: fundamental symbol + |omega| + sup |V|.
double spectral_scale(const StandingProfile& p) {
  const int N = p.grid;
  const auto Vp = potential_samples(p, Which::L_plus, N);
  const auto Vm = potential_samples(p, Which::L_minus, N);
  double vmax = 0.0;
  for (int j = 0; j < N; ++j) vmax = std::max({vmax, std::abs(Vp[j]), std::abs(Vm[j])});
  return p.params.omega_bound() + std::abs(p.omega) + vmax;
}

std::string monotonicity(const std::vector<double>& V) {
  // Samples over [0, 2T); inspect [0, T/2].
  const int N = static_cast<int>(V.size());
  const int q = N / 4;
  double vmax = 0.0;
  for (double v : V) vmax = std::max(vmax, std::abs(v));
  const double tol = 1e-12 * std::max(vmax, 1.0);
  bool nonincreasing = true, nondecreasing = true;
  for (int j = 0; j < q; ++j) {
    if (V[j + 1] > V[j] + tol) nonincreasing = false;
    if (V[j + 1] < V[j] - tol) nondecreasing = false;
  }
  if (nonincreasing && nondecreasing) return "constant";
  if (nonincreasing) return "nonincreasing";
  if (nondecreasing) return "nondecreasing";
  return "none";
}

}  // namespace

std::string to_string(Sector s) { return s == Sector::even ? "even" : "odd"; }
std::string to_string(Which w) { return w == Which::L_plus ? "L_plus" : "L_minus"; }

int quadrature_grid(int size, const StandingProfile& p) {
  return next_pow2(std::max({8 * size, p.grid, 4 * p.field.mode_count()}));
}

std::vector<double> potential_samples(const StandingProfile& p, Which which, int N) {
  const GridSamples g = to_grid(p.field, N);
  const double coef = potential_coefficient(p.params, which);
  std::vector<double> V(N);
  for (int j = 0; j < N; ++j) V[j] = coef * std::pow(std::abs(g.values[j]), 2.0 * p.params.sigma);
  return V;
}

SectorOperator assemble_from_potential(const std::vector<double>& V, double T, double alpha, double omega,
                                       Sector sector, int size) {
  const int N = static_cast<int>(V.size());
  if (N < 8 * size) throw SamplingError("quadrature grid must hold 8 * size points");
  CVec in(V.begin(), V.end()), hat(N);
  fft::dft(in.data(), hat.data(), N, -1);
  std::vector<double> vr(N);
  for (int j = 0; j < N; ++j) vr[j] = hat[j].real() / N;

  SectorOperator op;
  op.sector = sector;
  op.size = size;
  op.quad_grid = N;
  op.T = T;
  op.matrix.resize(size, size);
  const double sgn = sector == Sector::even ? 1.0 : -1.0;
  for (int j = 0; j < size; ++j) {
    const int kj = 2 * j + 1;
    for (int l = 0; l < size; ++l) {
      const int kl = 2 * l + 1;
      op.matrix(j, l) = vr[wrap(kj - kl, N)] + sgn * vr[wrap(kj + kl, N)];
    }
    op.matrix(j, j) += std::pow(M_PI * kj / T, alpha) + omega;
  }
  // Symmetrize roundoff.
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
  return op;
}

SectorOperator assemble(const StandingProfile& p, Which which, Sector sector, int size, int quad_grid) {
  require_real(p);
  if (quad_grid == 0) quad_grid = quadrature_grid(size, p);
  SectorOperator op = assemble_from_potential(potential_samples(p, which, quad_grid), p.params.T, p.params.alpha,
                                              p.omega, sector, size);
  op.which = which;
  return op;
}

SectorSpectrum eigensolve(const SectorOperator& op, bool vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      op.matrix, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("symmetric eigensolver did not converge");
  SectorSpectrum s;
  s.sector = op.sector;
  s.which = op.which;
  s.T = op.T;
  s.eigenvalues = es.eigenvalues();
  if (vectors) {
    s.eigenvectors = es.eigenvectors();
    const double anorm = op.matrix.lpNorm<Eigen::Infinity>();
    const Eigen::MatrixXd R = op.matrix * s.eigenvectors - s.eigenvectors * s.eigenvalues.asDiagonal();
    s.residual = R.colwise().norm().maxCoeff() / std::max(anorm, 1e-300);
    if (s.residual > 1e-9) throw ConvergenceFailure("eigenpair residual " + std::to_string(s.residual));
  }
  return s;
}

Eigen::VectorXd full_spectrum(const StandingProfile& p, Which which, int size, int quad_grid) {
  require_real(p);
  if (quad_grid == 0) quad_grid = quadrature_grid(size, p);
  const int N = quad_grid;
  const auto V = potential_samples(p, which, N);
  CVec in(V.begin(), V.end()), hat(N);
  fft::dft(in.data(), hat.data(), N, -1);
  const int n = 2 * size;
  Eigen::MatrixXd H(n, n);
  const double T = p.params.T;
  for (int i = 0; i < n; ++i) {
    const int k = 2 * i - (n - 1);
    for (int l = 0; l < n; ++l) {
      const int m = 2 * l - (n - 1);
      H(i, l) = hat[wrap(k - m, N)].real() / N;
    }
    H(i, i) += std::pow(std::abs(M_PI * k / T), p.params.alpha) + p.omega;
  }
  H = 0.5 * (H + H.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("symmetric eigensolver did not converge");
  return es.eigenvalues();
}

Eigen::VectorXd sector_coefficients(const AntiperiodicField& f, Sector sector, int size) {
  const double rt = std::sqrt(f.half_period());
  Eigen::VectorXd a(size);
  for (int j = 0; j < size; ++j) {
    const cplx c = f.coeff(2 * j + 1);
    a(j) = sector == Sector::even ? 2.0 * rt * c.real() : -2.0 * rt * c.imag();
  }
  return a;
}

AntiperiodicField sector_field(const Eigen::VectorXd& a, Sector sector, double T) {
  const int size = static_cast<int>(a.size());
  AntiperiodicField f(T, size);
  const double s = 0.5 / std::sqrt(T);
  for (int j = 0; j < size; ++j) {
    const int k = 2 * j + 1;
    if (sector == Sector::even) {
      f[f.index(k)] = s * a(j);
      f[f.index(-k)] = s * a(j);
    } else {
      f[f.index(k)] = cplx(0.0, -s * a(j));
      f[f.index(-k)] = cplx(0.0, s * a(j));
    }
  }
  return f;
}

int count_sign_changes(const Eigen::VectorXd& a, Sector sector, double T, int N) {
  const GridSamples g = to_grid(sector_field(a, sector, T), N);
  std::vector<double> v;
  if (sector == Sector::even) {
    for (int j = N - N / 4 + 1; j < N; ++j) v.push_back(g.values[j].real());
    for (int j = 0; j < N / 4; ++j) v.push_back(g.values[j].real());
  } else {
    for (int j = 1; j < N / 2; ++j) v.push_back(g.values[j].real());
  }
  const double vmax = g.max_abs();
  int changes = 0, last = 0;
  for (double x : v) {
    if (std::abs(x) <= 1e-7 * vmax) continue;
    const int s = x > 0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

GridSamples apply_operator_grid(const StandingProfile& p, Which which, const AntiperiodicField& v) {
  const int N = p.grid;
  AntiperiodicField lin(v);
  for (int i = 0; i < lin.size(); ++i)
    lin[i] *= std::pow(std::abs(M_PI * lin.wavenumber(i) / p.params.T), p.params.alpha) + p.omega;
  GridSamples g = to_grid(lin, N);
  const GridSamples vg = to_grid(v, N);
  const auto V = potential_samples(p, which, N);
  for (int j = 0; j < N; ++j) g.values[j] += V[j] * vg.values[j];
  return g;
}

AntiperiodicField apply_operator(const StandingProfile& p, Which which, const AntiperiodicField& v) {
  return project_modes(apply_operator_grid(p, which, v), v.mode_count()).field;
}

Eigen::VectorXd deflated_solve(const SectorSpectrum& s, const Eigen::VectorXd& rhs, double tol,
                               double* kernel_component) {
  const Eigen::VectorXd proj = s.eigenvectors.transpose() * rhs;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rhs.size());
  double kc = 0.0;
  for (int i = 0; i < proj.size(); ++i) {
    if (std::abs(s.eigenvalues(i)) <= tol) {
      kc += proj(i) * proj(i);
      continue;
    }
    y += (proj(i) / s.eigenvalues(i)) * s.eigenvectors.col(i);
  }
  if (kernel_component) *kernel_component = std::sqrt(kc) / std::max(rhs.norm(), 1e-300);
  return y;
}

NondegeneracyReport nondegeneracy_check(const StandingProfile& p, int size, bool doubling) {
  require_real(p);
  NondegeneracyReport rep;
  rep.size = size;
  rep.scale = spectral_scale(p);
  rep.tol_kernel = 1e-6 * rep.scale;
  const int Nq = quadrature_grid(doubling ? 2 * size : size, p);
  const double T = p.params.T;
  const bool foc = p.params.focusing();

  const AntiperiodicField dphi = apply_multiplier(p.field, derivative(T));

  for (Which which : {Which::L_plus, Which::L_minus}) {
    OperatorSummary& o = which == Which::L_plus ? rep.plus : rep.minus;
    o.which = which;
    const SectorSpectrum se = eigensolve(assemble(p, which, Sector::even, size, Nq));
    const SectorSpectrum so = eigensolve(assemble(p, which, Sector::odd, size, Nq));
    for (const SectorSpectrum* s : {&se, &so}) {
      for (int i = 0; i < s->eigenvalues.size(); ++i) {
        if (s->eigenvalues(i) < -rep.tol_kernel) ++o.morse;
        if (std::abs(s->eigenvalues(i)) <= rep.tol_kernel) ++o.near_zero;
      }
    }
    // Kernel lives in the odd sector for L_plus (phi') and in the even sector for L_minus (phi).
    const SectorSpectrum& ks = which == Which::L_plus ? so : se;
    const Sector ksec = which == Which::L_plus ? Sector::odd : Sector::even;
    int i0 = 0;
    for (int i = 1; i < ks.eigenvalues.size(); ++i)
      if (std::abs(ks.eigenvalues(i)) < std::abs(ks.eigenvalues(i0))) i0 = i;
    o.lambda0 = ks.eigenvalues(i0);
    o.gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ks.eigenvalues.size(); ++i)
      if (i != i0) o.gap = std::min(o.gap, std::abs(ks.eigenvalues(i) - o.lambda0));
    if (o.gap < 10.0 * rep.tol_kernel)
      throw SpectralGapTooSmall(to_string(which) + " gap " + std::to_string(o.gap) + " below 10 tol_kernel");
    const Eigen::VectorXd target =
        sector_coefficients(which == Which::L_plus ? dphi : p.field, ksec, size);
    o.alignment = std::abs(ks.eigenvectors.col(i0).dot(target)) / target.norm();
    o.kernel_residual = apply_operator_grid(p, which, which == Which::L_plus ? dphi : p.field).max_abs();

    o.even_ground = se.eigenvalues(0);
    o.odd_ground = so.eigenvalues(0);
    o.ground_sign_changes_even = count_sign_changes(se.eigenvectors.col(0), Sector::even, T, Nq);
    o.ground_sign_changes_odd = count_sign_changes(so.eigenvectors.col(0), Sector::odd, T, Nq);
    o.second_sign_changes_even = count_sign_changes(se.eigenvectors.col(1), Sector::even, T, Nq);
    o.second_sign_changes_odd = count_sign_changes(so.eigenvectors.col(1), Sector::odd, T, Nq);

    o.potential_monotonicity = monotonicity(potential_samples(p, which, Nq));
    if (o.potential_monotonicity == "nonincreasing")
      o.ordering_consistent = o.odd_ground <= o.even_ground + rep.tol_kernel;
    else if (o.potential_monotonicity == "nondecreasing")
      o.ordering_consistent = o.even_ground <= o.odd_ground + rep.tol_kernel;
    else if (o.potential_monotonicity == "constant")
      o.ordering_consistent = true;

    const int nl = std::min(10, size);
    for (int i = 0; i < nl; ++i) {
      o.lowest_even.push_back(se.eigenvalues(i));
      o.lowest_odd.push_back(so.eigenvalues(i));
    }
    if (doubling) {
      const auto de = eigensolve(assemble(p, which, Sector::even, 2 * size, Nq), false);
      const auto dd = eigensolve(assemble(p, which, Sector::odd, 2 * size, Nq), false);
      double shift = 0.0;
      for (int i = 0; i < nl; ++i) {
        shift = std::max(shift, std::abs(de.eigenvalues(i) - se.eigenvalues(i)));
        shift = std::max(shift, std::abs(dd.eigenvalues(i) - so.eigenvalues(i)));
      }
      o.doubling_shift = shift;
    }
  }
  rep.morse_plus = rep.plus.morse;
  rep.morse_minus = rep.minus.morse;
  rep.ground_sign_definite = true;
  bool structural = true;
  for (const OperatorSummary* o : {&rep.plus, &rep.minus}) {
    if (o->ground_sign_changes_even != 0 || o->ground_sign_changes_odd != 0) rep.ground_sign_definite = false;
    structural = structural && o->near_zero == 1 && o->alignment >= 0.999 &&
                 std::abs(o->lambda0) <= rep.tol_kernel && o->second_sign_changes_even <= 2 &&
                 o->second_sign_changes_odd <= 2 && o->ordering_consistent;
  }
  const bool morse_ok = foc ? (rep.morse_plus == 1 && rep.morse_minus == 0)
                            : (rep.morse_plus == 0 && rep.morse_minus == 1);
  rep.passed = structural && morse_ok && rep.ground_sign_definite;
  return rep;
}

FredholmReport fredholm_range_checks(const StandingProfile& p, int size, const AntiperiodicField* im_dphi_dc) {
  require_real(p);
  FredholmReport rep;
  const double T = p.params.T;
  const double g = p.params.gamma, s2 = 2.0 * p.params.sigma;
  const int N = p.grid;
  const AntiperiodicField dphi = apply_multiplier(p.field, derivative(T));
  const GridSamples phig = to_grid(p.field, N), dphig = to_grid(dphi, N);
  const GridSamples Lm = apply_operator_grid(p, Which::L_minus, dphi);
  const GridSamples Lp = apply_operator_grid(p, Which::L_plus, p.field);
  for (int j = 0; j < N; ++j) {
    const double f = phig.values[j].real();
    const double w = std::pow(std::abs(f), s2);
    rep.lminus_dphi_identity =
        std::max(rep.lminus_dphi_identity, std::abs(Lm.values[j] - g * s2 * w * dphig.values[j]));
    rep.lplus_phi_identity = std::max(rep.lplus_phi_identity, std::abs(Lp.values[j] + g * s2 * w * f));
  }

  const SectorOperator op = assemble(p, Which::L_minus, Sector::odd, size);
  const SectorSpectrum sp = eigensolve(op);
  const double tol = 1e-6 * spectral_scale(p);
  const Eigen::VectorXd rhs = -sector_coefficients(dphi, Sector::odd, size);
  const Eigen::VectorXd y = deflated_solve(sp, rhs, tol, &rep.kernel_component);
  rep.solve_residual = (op.matrix * y - rhs).norm() / std::max(rhs.norm(), 1e-300);
  if (rep.kernel_component > 1e-6 || rep.solve_residual > 1e-8)
    throw InconsistentRange("deflated solve residual " + std::to_string(rep.solve_residual) +
                            ", kernel component " + std::to_string(rep.kernel_component));
  rep.y = sector_field(y, Sector::odd, T);
  rep.dNdc_pairing = inner(dphi, rep.y);
  if (im_dphi_dc) {
    const int M = std::max(rep.y.mode_count(), im_dphi_dc->mode_count());
    rep.continuation_mismatch = sup_norm(rep.y.resized(M) - im_dphi_dc->resized(M), 4 * M);
  }
  return rep;
}

JordanReport jordan_structure(const StandingProfile& p, const SolverSettings& s, int size, double delta) {
  require_real(p);
  if (p.params.focusing()) throw ValidationError("jordan_structure applies to the defocusing (c, mu) family");
  SolverSettings s2 = s;
  s2.modes = p.field.mode_count();
  s2.grid = p.grid;
  JordanReport rep;
  rep.delta = delta;

  const StandingProfile mp = solve_defocusing(p.params, 0.0, p.mu + delta, s2, p.field);
  const StandingProfile mm = solve_defocusing(p.params, 0.0, p.mu - delta, s2, p.field);
  rep.dphi_dmu = (1.0 / (2.0 * delta)) * (mp.field - mm.field);
  rep.domega_dmu = (mp.omega - mm.omega) / (2.0 * delta);
  rep.dQdmu = (charge(mp.field) - charge(mm.field)) / (2.0 * delta);
  rep.dNdmu = (momentum(mp.field) - momentum(mm.field)) / (2.0 * delta);

  const ContinuationResult cp = continue_in(p, ContinuationParam::c, delta, 1, s2);
  const ContinuationResult cm = continue_in(p, ContinuationParam::c, -delta, 1, s2);
  if (cp.failed || cm.failed) throw NonConvergence("c-continuation failed: " + cp.message + cm.message);
  const StandingProfile& a = cp.profiles.front();
  const StandingProfile& b = cm.profiles.front();
  const AntiperiodicField dphi_dc = (1.0 / (2.0 * delta)) * (a.field - b.field);
  rep.im_dphi_dc = dphi_dc.imag_part();
  rep.re_dphi_dc = sup_norm(dphi_dc.real_part(), p.grid);
  rep.domega_dc = (a.omega - b.omega) / (2.0 * delta);
  rep.omega_even_defect = std::abs(a.omega - b.omega);
  rep.dNdc = (momentum(a.field) - momentum(b.field)) / (2.0 * delta);
  const double dQdc = (charge(a.field) - charge(b.field)) / (2.0 * delta);

  const AntiperiodicField dphi = apply_multiplier(p.field, derivative(p.params.T));
  {
    GridSamples r = apply_operator_grid(p, Which::L_plus, rep.dphi_dmu);
    const GridSamples f = to_grid(p.field, p.grid);
    for (int j = 0; j < p.grid; ++j) r.values[j] += rep.domega_dmu * f.values[j];
    rep.chain_mu_residual = r.max_abs();
  }
  {
    GridSamples r = apply_operator_grid(p, Which::L_minus, rep.im_dphi_dc);
    const GridSamples f = to_grid(dphi, p.grid);
    for (int j = 0; j < p.grid; ++j) r.values[j] += f.values[j];
    rep.chain_c_residual = r.max_abs();
  }
  rep.det_c_omega = rep.domega_dmu;
  rep.det_N_Q = rep.dNdc * rep.dQdmu - rep.dNdmu * dQdc;

  const FredholmReport fr = fredholm_range_checks(p, size, &rep.im_dphi_dc);
  rep.dNdc_pairing = fr.dNdc_pairing;
  rep.fredholm_mismatch = fr.continuation_mismatch;

  if (std::abs(rep.dNdc) < 1e-8 || std::abs(rep.dQdmu) < 1e-8)
    throw ChainDoesNotTerminate("dN/dc = " + std::to_string(rep.dNdc) + ", dQ/dmu = " + std::to_string(rep.dQdmu));
  return rep;
}

}  // namespace fnls
