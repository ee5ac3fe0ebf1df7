#pragma once
#include <complex>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace fnls {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kEpsFft = 1e-12;
inline constexpr double kEpsReal = 1e-10;
inline constexpr double kEpsAnti = 1e-10;

// T-antiperiodic field stored by its odd Fourier modes
//   f(x) = sum_k c_k exp(i pi k x / T),  k = -(2M-1), ..., -1, 1, ..., 2M-1.
// Storage index i maps to wavenumber 2i - (2M-1).
class AntiperiodicField {
 public:
  AntiperiodicField() = default;
  AntiperiodicField(double half_period, int M);
  AntiperiodicField(double half_period, int M, CVec coeffs);

  double half_period() const { return T_; }
  int mode_count() const { return M_; }
  int size() const { return 2 * M_; }
  int max_wavenumber() const { return 2 * M_ - 1; }

  int wavenumber(int i) const { return 2 * i - (2 * M_ - 1); }
  int index(int k) const { return (k + 2 * M_ - 1) / 2; }
  bool in_band(int k) const { return (k & 1) && k >= -(2 * M_ - 1) && k <= 2 * M_ - 1; }

  cplx& operator[](int i) { return c_[i]; }
  const cplx& operator[](int i) const { return c_[i]; }
  cplx coeff(int k) const { return in_band(k) ? c_[index(k)] : cplx{}; }

  const CVec& coeffs() const { return c_; }
  CVec& coeffs() { return c_; }

  // c_{-k} = conj(c_k) to within tol relative to the largest coefficient.
  bool is_real(double tol = kEpsReal) const;
  // Replace by the real part (c_k <- (c_k + conj c_{-k}) / 2).
  AntiperiodicField real_part() const;
  // Field of the real-valued function Im f(x).
  AntiperiodicField imag_part() const;
  AntiperiodicField conj() const;
  // Zero-pad or truncate to M2 modes.
  AntiperiodicField resized(int M2) const;
  // f(x - x0)
  AntiperiodicField translated(double x0) const;
  double max_abs_coeff() const;

  AntiperiodicField& operator+=(const AntiperiodicField& o);
  AntiperiodicField& operator-=(const AntiperiodicField& o);
  AntiperiodicField& operator*=(cplx s);

 private:
  double T_ = 1.0;
  int M_ = 0;
  CVec c_;
};

AntiperiodicField operator+(AntiperiodicField a, const AntiperiodicField& b);
AntiperiodicField operator-(AntiperiodicField a, const AntiperiodicField& b);
AntiperiodicField operator*(cplx s, AntiperiodicField a);
AntiperiodicField operator*(double s, AntiperiodicField a);

// Samples at x_j = 2 T j / N over one full 2T period.
struct GridSamples {
  double half_period = 1.0;
  CVec values;

  int size() const { return static_cast<int>(values.size()); }
  double x(int j) const { return 2.0 * half_period * j / size(); }
  double spacing() const { return 2.0 * half_period / size(); }
  // max_j |values[j + N/2] + values[j]|
  double antiperiodicity_defect() const;
  double max_abs() const;
  double max_imag() const;
};

GridSamples to_grid(const AntiperiodicField& f, int N);

struct ModeProjection {
  AntiperiodicField field;
  double even_energy = 0.0;       // relative to total energy of the samples
  double truncated_energy = 0.0;  // odd modes beyond the requested band, relative
};

ModeProjection project_modes(const GridSamples& g, int M);
// Throws AntiperiodicityViolation when the even-mode energy exceeds kEpsAnti.
AntiperiodicField to_modes(const GridSamples& g, int M);

struct Multiplier {
  std::function<cplx(int)> symbol;
  std::string name;
  cplx operator()(int k) const { return symbol(k); }
};

Multiplier fractional_laplacian(double alpha, double T);  // |pi k / T|^alpha
Multiplier derivative(double T);                          // i pi k / T
Multiplier hilbert();                                     // i sign(k)
Multiplier heat_semigroup(double alpha, double T, double t);
Multiplier compose(const Multiplier& a, const Multiplier& b);

AntiperiodicField apply_multiplier(const AntiperiodicField& f, const Multiplier& m);
// Symbol real (self-adjoint) or purely imaginary (skew) on every odd |k| <= kmax.
bool is_self_adjoint(const Multiplier& m, int kmax, double tol = 1e-14);
bool is_skew(const Multiplier& m, int kmax, double tol = 1e-14);

// <u, v> = Re int_0^T u conj(v) dx, evaluated by Parseval.
double inner(const AntiperiodicField& u, const AntiperiodicField& v);
double l2_norm(const AntiperiodicField& u);
// ||u||_X^2 = Re int_0^T |u|^2 + |Lambda^{alpha/2} u|^2.
double x_norm(const AntiperiodicField& u, double alpha);
double x_inner(const AntiperiodicField& u, const AntiperiodicField& v, double alpha);

// Max over a grid of size N of |f(x_j)|.
double sup_norm(const AntiperiodicField& f, int N);

// Smooth random field with Gaussian coefficients on |k| <= 2 active - 1 damped by (1 + |k|)^-2.
// Real-valued (c_{-k} = conj c_k) unless complex_valued.
AntiperiodicField random_field(double T, int M, int active, std::mt19937_64& rng, bool complex_valued = false);

namespace fft {
// Unnormalized DFT, out[k] = sum_j in[j] exp(sign 2 pi i j k / N). in and out may not alias.
void dft(const cplx* in, cplx* out, int N, int sign);
}  // namespace fft

}  // namespace fnls
