#include "fnls/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fnls/errors.hpp"
#include "fnls/functionals.hpp"
#include "fnls/linearized.hpp"

namespace fnls {

namespace {

std::vector<double> real_values(const GridSamples& f) {
  const double scale = std::max(f.max_abs(), 1e-300);
  if (f.max_imag() > kEpsReal * scale) throw ComplexInput("rearrangement needs real samples");
  std::vector<double> v(f.size());
  for (int j = 0; j < f.size(); ++j) v[j] = f.values[j].real();
  return v;
}

std::vector<double> star_values(const std::vector<double>& f) {
  const int N = static_cast<int>(f.size());
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return f[a] > f[b]; });
  std::vector<double> s(N);
  for (int p = 0; p < N; ++p) {
    // rank 2m-1 goes to +m, rank 2m to -m
    const int j = p == 0 ? 0 : (p % 2 ? (p + 1) / 2 : N - p / 2);
    s[j % N] = f[order[p]];
  }
  return s;
}

GridSamples as_samples(double T, const std::vector<double>& v) { return {T, CVec(v.begin(), v.end())}; }

std::vector<double> shift_quarter(const std::vector<double>& v) {
  const int N = static_cast<int>(v.size());
  if (N % 4 != 0) throw ValidationError("hash rearrangement needs N divisible by 4");
  std::vector<double> out(N);
  for (int j = 0; j < N; ++j) out[j] = v[((j - N / 4) % N + N) % N];
  return out;
}

std::string classify(const std::vector<double>& V) {
  const int N = static_cast<int>(V.size());
  double vmax = 0.0;
  for (double v : V) vmax = std::max(vmax, std::abs(v));
  const double tol = 1e-12 * std::max(vmax, 1.0);
  for (int j = 0; j < N; ++j) {
    if (std::abs(V[j] - V[(N - j) % N]) > tol) return "not even";
    if (std::abs(V[j] - V[(j + N / 2) % N]) > tol) return "not T-periodic";
  }
  bool inc = true, dec = true;
  for (int j = 0; j < N / 4; ++j) {
    if (V[j + 1] > V[j] + tol) dec = false;
    if (V[j + 1] < V[j] - tol) inc = false;
  }
  if (inc && dec) return "constant";
  if (dec) return "nonincreasing";
  if (inc) return "nondecreasing";
  return "none";
}

double weighted(const std::vector<double>& V, const std::vector<double>& f, double h) {
  double s = 0.0;
  for (std::size_t j = 0; j < V.size(); ++j) s += V[j] * f[j] * f[j];
  return h * s;
}

}  // namespace

GridSamples rearrange_star(const GridSamples& f) {
  return as_samples(f.half_period, star_values(real_values(f)));
}

GridSamples rearrange_hash(const GridSamples& f) {
  return as_samples(f.half_period, shift_quarter(star_values(real_values(f))));
}

double lp_norm(const GridSamples& f, double p) {
  if (std::isinf(p)) return f.max_abs();
  double s = 0.0;
  for (const cplx& v : f.values) s += std::pow(std::abs(v), p);
  return std::pow(f.spacing() * s, 1.0 / p);
}

RearrangedPair rearrange(const GridSamples& f) {
  RearrangedPair r;
  r.original = f;
  r.star = rearrange_star(f);
  r.hash = rearrange_hash(f);
  const double ps[3] = {1.0, 2.0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i < 3; ++i) {
    const double a = lp_norm(f, ps[i]);
    const double tol = 1e-13 * std::max(a, 1e-300);
    r.norms_match[i] = std::abs(lp_norm(r.star, ps[i]) - a) <= tol && std::abs(lp_norm(r.hash, ps[i]) - a) <= tol;
  }
  return r;
}

PolyaSzegoReport polya_szego_check(const AntiperiodicField& f, double alpha, int N) {
  if (!f.is_real()) throw ComplexInput("Polya-Szego check needs a real field");
  PolyaSzegoReport r;
  r.N = N > 0 ? N : std::max(256, 8 * f.mode_count());
  r.band = f.mode_count();
  const GridSamples g = to_grid(f, r.N);
  const GridSamples s = rearrange_star(g), h = rearrange_hash(g);
  r.K_f = kinetic(f, alpha);
  const AntiperiodicField sf = to_modes(s, r.N / 4);
  r.K_star_grid = kinetic(sf, alpha);
  r.K_star = kinetic(sf.resized(r.band), alpha);
  r.K_hash = kinetic(to_modes(h, r.N / 4).resized(r.band), alpha);
  r.eps_rearr = 10.0 * r.K_f / r.N;
  r.defect = std::max(0.0, r.K_star - r.K_f);
  r.passed = r.defect <= r.eps_rearr && std::abs(r.K_star - r.K_hash) <= 1e-12 * std::max(r.K_f, 1e-300);
  return r;
}

PotentialOrderingReport potential_ordering_check(const GridSamples& Vg, int trials, std::uint64_t seed,
                                                 int active_modes) {
  const std::vector<double> V = real_values(Vg);
  const int N = Vg.size();
  if (N % 4 != 0) throw ValidationError("potential grid needs N divisible by 4");
  PotentialOrderingReport r;
  r.monotonicity = classify(V);
  if (r.monotonicity != "constant" && r.monotonicity != "nonincreasing" && r.monotonicity != "nondecreasing")
    throw MonotonicityUnverified("potential is " + r.monotonicity + " on (0, T/2)");
  r.trials = trials;
  r.eps_rearr = 10.0 / N;
  r.min_margin = std::numeric_limits<double>::infinity();
  const double h = Vg.spacing();
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const AntiperiodicField f = random_field(Vg.half_period, std::max(active_modes, N / 8), active_modes, rng);
    const std::vector<double> fv = real_values(to_grid(f, N));
    const std::vector<double> sv = star_values(fv);
    std::vector<double> absV(N);
    for (int j = 0; j < N; ++j) absV[j] = std::abs(V[j]);
    const double scale = std::max(weighted(absV, fv, h), 1e-300);
    const double lhs = weighted(V, fv, h);
    auto judge = [&](const std::vector<double>& rv) {
      const double gap = (lhs - weighted(V, rv, h)) / scale;
      r.min_margin = std::min(r.min_margin, gap);
      r.max_defect = std::max(r.max_defect, -gap);
      if (-gap > r.eps_rearr) ++r.violations;
    };
    if (r.monotonicity != "nondecreasing") judge(shift_quarter(sv));
    if (r.monotonicity != "nonincreasing") judge(sv);
  }
  return r;
}

DefectStudy rearrangement_defect_study(double alpha, double T, const std::vector<int>& grids, int fields,
                                       std::uint64_t seed, int reference_grid) {
  DefectStudy d;
  d.alpha = alpha;
  d.grids = grids;
  d.reference_grid = reference_grid;
  d.defects.assign(grids.size(), 0.0);
  std::mt19937_64 rng(seed);
  const int M = 16;
  for (int i = 0; i < fields; ++i) {
    const AntiperiodicField f = random_field(T, M, 8, rng);
    const double Kf = kinetic(f, alpha);
    auto banded = [&](int N) {
      const GridSamples s = rearrange_star(to_grid(f, N));
      return kinetic(to_modes(s, N / 4).resized(M), alpha);
    };
    const double ref = banded(reference_grid);
    for (std::size_t g = 0; g < grids.size(); ++g)
      d.defects[g] = std::max(d.defects[g], std::abs(banded(grids[g]) - ref) / Kf);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(grids.size());
  for (std::size_t g = 0; g < grids.size(); ++g) {
    d.eps.push_back(10.0 / grids[g]);
    const double x = std::log(static_cast<double>(grids[g])), y = std::log(std::max(d.defects[g], 1e-300));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  d.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return d;
}

RayleighChainReport rayleigh_chain_check(const StandingProfile& p, int size) {
  RayleighChainReport r;
  const double T = p.params.T;
  const int Nq = quadrature_grid(size, p);
  const std::string mono = classify(potential_samples(p, Which::L_minus, Nq));
  if (mono != "nonincreasing" && mono != "nondecreasing" && mono != "constant")
    throw MonotonicityUnverified("L_minus potential is " + mono + " on (0, T/2)");
  const bool from_even = mono != "nondecreasing";
  r.source = from_even ? "even" : "odd";
  const Sector src = from_even ? Sector::even : Sector::odd, dst = from_even ? Sector::odd : Sector::even;

  const SectorOperator A_src = assemble(p, Which::L_minus, src, size, Nq);
  const SectorOperator A_dst = assemble(p, Which::L_minus, dst, size, Nq);
  const SectorSpectrum s_src = eigensolve(A_src), s_dst = eigensolve(A_dst, false);
  (from_even ? r.even_ground : r.odd_ground) = s_src.eigenvalues(0);
  (from_even ? r.odd_ground : r.even_ground) = s_dst.eigenvalues(0);

  GridSamples g = to_grid(sector_field(s_src.eigenvectors.col(0), src, T), Nq);
  // eigenvector sign is arbitrary; make it positive on the source reference interval
  if (g.values[from_even ? 0 : Nq / 4].real() < 0)
    for (auto& v : g.values) v = -v;
  const GridSamples moved = from_even ? rearrange_hash(g) : rearrange_star(g);
  const Eigen::VectorXd a = sector_coefficients(to_modes(moved, Nq / 4), dst, size);
  r.rq = a.dot(A_dst.matrix * a) / a.squaredNorm();
  const double source_ground = s_src.eigenvalues(0);
  r.eps = 10.0 / Nq * (std::abs(source_ground) + std::pow(M_PI / T, p.params.alpha));
  const double target_ground = s_dst.eigenvalues(0);
  r.passed = target_ground <= r.rq + r.eps && r.rq <= source_ground + r.eps;
  return r;
}

}  // namespace fnls
