#include "fnls/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fnls/errors.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

namespace {

constexpr double kTermFloor = 1e-16;
constexpr double kTailLimit = 1e-12;
constexpr double kImagLimit = 1e-14;

double decay(double alpha, double T, double t, int n) {
  return std::exp(-std::pow(M_PI * n / T, alpha) * t);
}

std::string where(double x, double y, double v) {
  std::ostringstream os;
  os.precision(17);
  os << "at x=" << x << ", y=" << y << " value " << v;
  return os.str();
}

}  // namespace

KernelSamples kernel_kp(double alpha, double T, double t, int N) {
  if (!(t > 0.0)) throw ValidationError("kernel time must be positive");
  if (N < 8 || N % 4 != 0) throw ValidationError("kernel grid size must be a multiple of 4 and >= 8");

  int needed = 0;
  while (decay(alpha, T, t, needed + 1) >= kTermFloor) ++needed;
  const int terms = std::min(needed, N / 2 - 1);
  double tail = 0.0;
  for (int n = terms + 1;; ++n) {
    const double w = decay(alpha, T, t, n);
    tail += w / T;
    if (w < 1e-30 || n > terms + 100000) break;
  }
  if (tail > kTailLimit) {
    std::ostringstream os;
    os << "kernel tail " << tail << " exceeds " << kTailLimit << " (t=" << t << ", N=" << N << ", needs about "
       << 2 * (needed + 1) << " points)";
    throw UnderResolved(os.str());
  }

  CVec spec(N), vals(N);
  spec[0] = 1.0 / (2.0 * T);
  for (int n = 1; n <= terms; ++n) {
    const double w = decay(alpha, T, t, n) / (2.0 * T);
    spec[n] = w;
    spec[N - n] = w;
  }
  fft::dft(spec.data(), vals.data(), N, +1);

  KernelSamples out;
  out.alpha = alpha;
  out.T = T;
  out.t = t;
  out.kind = KernelKind::Kp;
  out.tail_estimate = tail;
  out.terms = terms;
  out.values.resize(N);
  for (int j = 0; j < N; ++j) {
    if (std::abs(vals[j].imag()) > kImagLimit) throw Error("kernel samples not real", ErrorClass::Other);
    out.values[j] = vals[j].real();
  }
  return out;
}

KernelSamples kernel_ka(double alpha, double T, double t, int N) {
  KernelSamples kp = kernel_kp(alpha, T, t, N);
  KernelSamples ka = kp;
  ka.kind = KernelKind::Ka;
  const int h = N / 2;
  for (int j = 0; j < N; ++j) ka.values[j] = kp.values[j] - kp.at(j - h);
  // exact antiperiodicity on the grid
  for (int j = 0; j < h; ++j) {
    const double v = 0.5 * (ka.values[j] - ka.values[j + h]);
    ka.values[j] = v;
    ka.values[j + h] = -v;
  }
  return ka;
}

KernelSamples sector_kernel_row(const KernelSamples& ka, int i, KernelKind kind) {
  KernelSamples row = ka;
  row.kind = kind;
  const double s = kind == KernelKind::SectorEven ? 1.0 : -1.0;
  for (int j = 0; j < ka.size(); ++j) row.values[j] = ka.at(i - j) + s * ka.at(i + j);
  return row;
}

PositivityReport positivity_report(const KernelSamples& ka) {
  const int N = ka.size();
  if (N % 4 != 0) throw ValidationError("positivity check needs N divisible by 4");
  const int q = N / 4, h = N / 2;
  const double dx = 2.0 * ka.T / N;
  PositivityReport r;

  auto track = [](KernelCheck& c, bool& first, double v, double x, double y) {
    if (first || v < c.margin) c = {v, x, y};
    first = false;
  };

  bool first = true;
  for (int j = -(q - 2); j <= q - 2; ++j) track(r.interior, first, ka.at(j), j * dx, 0.0);
  if (!(r.interior.margin > 0.0))
    throw PositivityViolation("K_a not positive on (-T/2,T/2) " + where(r.interior.x, 0.0, r.interior.margin));

  first = true;
  for (int j = 1; j + 1 <= h - 1; ++j) track(r.monotone, first, ka.at(j) - ka.at(j + 1), j * dx, 0.0);
  if (!(r.monotone.margin > 0.0))
    throw PositivityViolation("K_a not decreasing on (0,T) " + where(r.monotone.x, 0.0, r.monotone.margin));

  first = true;
  for (int i = -(q - 2); i <= q - 2; ++i)
    for (int j = -(q - 2); j <= q - 2; ++j) track(r.even_pair, first, ka.at(i - j) + ka.at(i + j), i * dx, j * dx);
  if (!(r.even_pair.margin > 0.0))
    throw PositivityViolation("even sector kernel not positive " +
                              where(r.even_pair.x, r.even_pair.y, r.even_pair.margin));

  first = true;
  for (int i = 2; i <= h - 2; ++i)
    for (int j = 2; j <= h - 2; ++j) track(r.odd_pair, first, ka.at(i - j) - ka.at(i + j), i * dx, j * dx);
  if (!(r.odd_pair.margin > 0.0))
    throw PositivityViolation("odd sector kernel not positive " +
                              where(r.odd_pair.x, r.odd_pair.y, r.odd_pair.margin));

  r.passed = true;
  return r;
}

std::vector<double> even_sector_input(const std::vector<double>& g, int N) {
  const int q = N / 4;
  if (static_cast<int>(g.size()) != q + 1) throw ValidationError("quarter profile must have N/4 + 1 samples");
  std::vector<double> f(N);
  for (int j = 0; j < N; ++j) {
    const int s = j <= N / 2 ? j : N - j;  // |x| in cells
    f[j] = s <= q ? g[s] : -g[2 * q - s];
  }
  f[q] = f[N - q] = 0.0;
  return f;
}

std::vector<double> odd_sector_input(const std::vector<double>& g, int N) {
  std::vector<double> e = even_sector_input(g, N), f(N);
  const int q = N / 4;
  for (int j = 0; j < N; ++j) f[j] = e[((j - q) % N + N) % N];
  return f;
}

ProbeReport semigroup_positivity_probe(double alpha, double T, double t, int trials, std::uint64_t seed, int N) {
  if (!(t > 0.0)) throw ValidationError("kernel time must be positive");
  if (N < 16 || N % 4 != 0) throw ValidationError("probe grid size must be a multiple of 4 and >= 16");
  const int q = N / 4;
  const double dx = 2.0 * T / N;
  const Multiplier semi = heat_semigroup(alpha, T, t);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  ProbeReport rep;
  rep.trials = trials;
  rep.min_even = rep.min_odd = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> g(q + 1, 0.0);
    const int bumps = 1 + static_cast<int>(unif(rng) * 3.0);
    for (int b = 0; b < bumps; ++b) {
      const double c = (0.02 + 0.43 * unif(rng)) * T;
      const double r = std::min((0.03 + 0.2 * unif(rng)) * T, 0.5 * T - c);
      const double w = 0.2 + 0.8 * unif(rng);
      for (int i = 0; i <= q; ++i) {
        const double s = (i * dx - c) / r;
        if (std::abs(s) < 1.0) g[i] += w * (1.0 - s * s) * (1.0 - s * s);
      }
    }
    for (int sector = 0; sector < 2; ++sector) {
      const std::vector<double> f = sector == 0 ? even_sector_input(g, N) : odd_sector_input(g, N);
      GridSamples gs{T, CVec(f.begin(), f.end())};
      const GridSamples out = to_grid(apply_multiplier(to_modes(gs, q), semi), N);
      double m = std::numeric_limits<double>::infinity();
      double at = 0.0;
      // open reference interval: (-T/2, T/2) for even, (0, T) for odd
      const int lo = sector == 0 ? -(q - 1) : 1, hi = sector == 0 ? q - 1 : 2 * q - 1;
      for (int j = lo; j <= hi; ++j) {
        const double v = out.values[((j % N) + N) % N].real();
        if (v < m) m = v, at = j * dx;
      }
      if (!(m > 0.0))
        throw PositivityViolation(std::string(sector == 0 ? "even" : "odd") + " sector semigroup output not positive " +
                                  where(at, 0.0, m) + " (trial " + std::to_string(trial) + ")");
      (sector == 0 ? rep.min_even : rep.min_odd) = std::min(sector == 0 ? rep.min_even : rep.min_odd, m);
    }
  }
  return rep;
}

}  // namespace fnls
