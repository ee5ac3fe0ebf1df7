#include "fnls/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "fnls/errors.hpp"

namespace fnls {

namespace fft {
namespace {

std::mutex plan_mutex;
std::map<std::pair<int, int>, fftw_plan>& plan_cache() {
  static std::map<std::pair<int, int>, fftw_plan> cache;
  return cache;
}

fftw_plan get_plan(int N, int sign) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto& cache = plan_cache();
  auto key = std::make_pair(N, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  CVec a(N), b(N);
  fftw_plan p = fftw_plan_dft_1d(N, reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()),
                                 sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, p);
  return p;
}

}  // namespace

void dft(const cplx* in, cplx* out, int N, int sign) {
  fftw_plan p = get_plan(N, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace fft

AntiperiodicField::AntiperiodicField(double half_period, int M)
    : T_(half_period), M_(M), c_(2 * static_cast<size_t>(M)) {}

AntiperiodicField::AntiperiodicField(double half_period, int M, CVec coeffs)
    : T_(half_period), M_(M), c_(std::move(coeffs)) {
  if (static_cast<int>(c_.size()) != 2 * M) throw ValidationError("coefficient count must equal 2M");
}

double AntiperiodicField::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& z : c_) m = std::max(m, std::abs(z));
  return m;
}

bool AntiperiodicField::is_real(double tol) const {
  const double scale = std::max(max_abs_coeff(), 1e-300);
  for (int i = 0; i < size(); ++i) {
    if (std::abs(c_[i] - std::conj(c_[size() - 1 - i])) > tol * scale) return false;
  }
  return true;
}

AntiperiodicField AntiperiodicField::real_part() const {
  AntiperiodicField r(T_, M_);
  for (int i = 0; i < size(); ++i) r.c_[i] = 0.5 * (c_[i] + std::conj(c_[size() - 1 - i]));
  return r;
}

AntiperiodicField AntiperiodicField::imag_part() const {
  AntiperiodicField r(T_, M_);
  for (int i = 0; i < size(); ++i) r.c_[i] = (c_[i] - std::conj(c_[size() - 1 - i])) / cplx(0.0, 2.0);
  return r;
}

AntiperiodicField AntiperiodicField::conj() const {
  AntiperiodicField r(T_, M_);
  for (int i = 0; i < size(); ++i) r.c_[i] = std::conj(c_[size() - 1 - i]);
  return r;
}

AntiperiodicField AntiperiodicField::resized(int M2) const {
  AntiperiodicField r(T_, M2);
  for (int i = 0; i < r.size(); ++i) r.c_[i] = coeff(r.wavenumber(i));
  return r;
}

AntiperiodicField AntiperiodicField::translated(double x0) const {
  AntiperiodicField r(*this);
  for (int i = 0; i < size(); ++i) {
    const double ph = -M_PI * wavenumber(i) * x0 / T_;
    r.c_[i] *= cplx(std::cos(ph), std::sin(ph));
  }
  return r;
}

AntiperiodicField& AntiperiodicField::operator+=(const AntiperiodicField& o) {
  for (int i = 0; i < size(); ++i) c_[i] += o.coeff(wavenumber(i));
  return *this;
}
AntiperiodicField& AntiperiodicField::operator-=(const AntiperiodicField& o) {
  for (int i = 0; i < size(); ++i) c_[i] -= o.coeff(wavenumber(i));
  return *this;
}
AntiperiodicField& AntiperiodicField::operator*=(cplx s) {
  for (auto& z : c_) z *= s;
  return *this;
}

AntiperiodicField operator+(AntiperiodicField a, const AntiperiodicField& b) { return a += b; }
AntiperiodicField operator-(AntiperiodicField a, const AntiperiodicField& b) { return a -= b; }
AntiperiodicField operator*(cplx s, AntiperiodicField a) { return a *= s; }
AntiperiodicField operator*(double s, AntiperiodicField a) { return a *= cplx(s, 0.0); }

double GridSamples::antiperiodicity_defect() const {
  const int N = size(), h = N / 2;
  double d = 0.0;
  for (int j = 0; j < h; ++j) d = std::max(d, std::abs(values[j + h] + values[j]));
  return d;
}
double GridSamples::max_abs() const {
  double m = 0.0;
  for (const auto& z : values) m = std::max(m, std::abs(z));
  return m;
}
double GridSamples::max_imag() const {
  double m = 0.0;
  for (const auto& z : values) m = std::max(m, std::abs(z.imag()));
  return m;
}

namespace {
inline int wrap(int k, int N) { return ((k % N) + N) % N; }
}  // namespace

GridSamples to_grid(const AntiperiodicField& f, int N) {
  if (N % 2 != 0 || N < 2 * (f.max_wavenumber() + 1))
    throw SamplingError("grid size " + std::to_string(N) + " cannot carry wavenumbers up to " +
                        std::to_string(f.max_wavenumber()));
  CVec buf(N);
  for (int i = 0; i < f.size(); ++i) buf[wrap(f.wavenumber(i), N)] = f[i];
  GridSamples g{f.half_period(), CVec(N)};
  fft::dft(buf.data(), g.values.data(), N, +1);
  return g;
}

ModeProjection project_modes(const GridSamples& g, int M) {
  const int N = g.size();
  if (N % 2 != 0 || N < 4 * M)
    throw SamplingError("grid size " + std::to_string(N) + " too small for " + std::to_string(M) + " modes");
  CVec hat(N);
  fft::dft(g.values.data(), hat.data(), N, -1);
  double total = 0.0, even = 0.0, kept = 0.0;
  ModeProjection out{AntiperiodicField(g.half_period, M), 0.0, 0.0};
  for (int n = 0; n < N; ++n) {
    hat[n] /= static_cast<double>(N);
    const double e = std::norm(hat[n]);
    total += e;
    const int k = n <= N / 2 ? n : n - N;
    if (k % 2 == 0) even += e;
  }
  for (int i = 0; i < out.field.size(); ++i) {
    const cplx z = hat[wrap(out.field.wavenumber(i), N)];
    out.field[i] = z;
    kept += std::norm(z);
  }
  if (total > 0.0) {
    out.even_energy = std::sqrt(even / total);
    out.truncated_energy = std::sqrt(std::max(0.0, total - even - kept) / total);
  }
  return out;
}

AntiperiodicField to_modes(const GridSamples& g, int M) {
  ModeProjection p = project_modes(g, M);
  if (p.even_energy > kEpsAnti)
    throw AntiperiodicityViolation("even-mode energy " + std::to_string(p.even_energy) + " exceeds tolerance");
  return std::move(p.field);
}

Multiplier fractional_laplacian(double alpha, double T) {
  return {[alpha, T](int k) { return cplx(std::pow(std::abs(M_PI * k / T), alpha), 0.0); },
          "fractional_laplacian"};
}

Multiplier derivative(double T) {
  return {[T](int k) { return cplx(0.0, M_PI * k / T); }, "derivative"};
}

Multiplier hilbert() {
  return {[](int k) { return cplx(0.0, k > 0 ? 1.0 : (k < 0 ? -1.0 : 0.0)); }, "hilbert"};
}

Multiplier heat_semigroup(double alpha, double T, double t) {
  return {[alpha, T, t](int k) { return cplx(std::exp(-std::pow(std::abs(M_PI * k / T), alpha) * t), 0.0); },
          "heat_semigroup"};
}

Multiplier compose(const Multiplier& a, const Multiplier& b) {
  return {[a, b](int k) { return a(k) * b(k); }, a.name + "*" + b.name};
}

AntiperiodicField apply_multiplier(const AntiperiodicField& f, const Multiplier& m) {
  AntiperiodicField r(f);
  for (int i = 0; i < r.size(); ++i) r[i] *= m(r.wavenumber(i));
  return r;
}

bool is_self_adjoint(const Multiplier& m, int kmax, double tol) {
  for (int k = -kmax; k <= kmax; k += 2) {
    const cplx z = m(k);
    if (std::abs(z.imag()) > tol * std::max(1.0, std::abs(z))) return false;
  }
  return true;
}

bool is_skew(const Multiplier& m, int kmax, double tol) {
  for (int k = -kmax; k <= kmax; k += 2) {
    const cplx z = m(k);
    if (std::abs(z.real()) > tol * std::max(1.0, std::abs(z))) return false;
  }
  return true;
}

double inner(const AntiperiodicField& u, const AntiperiodicField& v) {
  double s = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    const cplx b = v.coeff(u.wavenumber(i));
    s += u[i].real() * b.real() + u[i].imag() * b.imag();
  }
  return u.half_period() * s;
}

double l2_norm(const AntiperiodicField& u) { return std::sqrt(inner(u, u)); }

double x_inner(const AntiperiodicField& u, const AntiperiodicField& v, double alpha) {
  const double T = u.half_period();
  double s = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    const int k = u.wavenumber(i);
    const cplx b = v.coeff(k);
    const double w = 1.0 + std::pow(std::abs(M_PI * k / T), alpha);
    s += w * (u[i].real() * b.real() + u[i].imag() * b.imag());
  }
  return T * s;
}

double x_norm(const AntiperiodicField& u, double alpha) { return std::sqrt(x_inner(u, u, alpha)); }

double sup_norm(const AntiperiodicField& f, int N) { return to_grid(f, N).max_abs(); }

AntiperiodicField random_field(double T, int M, int active, std::mt19937_64& rng, bool complex_valued) {
  AntiperiodicField f(T, M);
  std::normal_distribution<double> nd(0.0, 1.0);
  const int kmax = std::min(2 * active - 1, f.max_wavenumber());
  for (int k = 1; k <= kmax; k += 2) {
    const double damp = 1.0 / ((1.0 + k) * (1.0 + k));
    const double a = nd(rng), b = nd(rng);
    f[f.index(k)] = damp * cplx(a, b);
    if (complex_valued) {
      const double c = nd(rng), d = nd(rng);
      f[f.index(-k)] = damp * cplx(c, d);
    } else {
      f[f.index(-k)] = damp * cplx(a, -b);
    }
  }
  return f;
}

}  // namespace fnls
