#pragma once
// Independent reference computations for the tests. Nothing here calls the library's solvers.
#include <array>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

// alpha = 2, sigma = 1 closed forms with half-period T:
//   defocusing  phi = A cd(Bx | m), A^2 = 2 m B^2, omega = -(1 + m) B^2
//   focusing    phi = A cn(Bx | m), A^2 = 2 m B^2, omega = (2m - 1) B^2
// with B = 2 K(m) / T.
struct Elliptic {
  bool focusing = false;
  double m = 0.5, T = M_PI;
  double k() const { return std::sqrt(m); }
  double B() const { return 2.0 * boost::math::ellint_1(k()) / T; }
  double A() const { return std::sqrt(2.0 * m) * B(); }
  double omega() const { return focusing ? (2.0 * m - 1.0) * B() * B() : -(1.0 + m) * B() * B(); }
  double value(double x) const {
    return focusing ? A() * boost::math::jacobi_cn(k(), B() * x) : A() * boost::math::jacobi_cd(k(), B() * x);
  }
  double derivative(double x) const {
    double cn, dn;
    const double sn = boost::math::jacobi_elliptic(k(), B() * x, &cn, &dn);
    return focusing ? -A() * B() * sn * dn : -A() * B() * (1.0 - m) * sn / (dn * dn);
  }
  // Q = (1/2) int_0^T phi^2 by the trapezoid rule (spectrally accurate for smooth periodic data)
  double charge(int n = 8192) const {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::pow(value(T * j / n), 2);
    return 0.5 * T * s / n;
  }
  // P = (1/4) int_0^T phi^4
  double potential(int n = 8192) const {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::pow(value(T * j / n), 4);
    return 0.25 * T * s / n;
  }
};

// out[k] = sum_j in[j] exp(sign 2 pi i j k / N), O(N^2)
inline std::vector<std::complex<double>> direct_dft(const std::vector<std::complex<double>>& in, int sign) {
  const int N = static_cast<int>(in.size());
  std::vector<std::complex<double>> out(N);
  for (int k = 0; k < N; ++k) {
    std::complex<double> s{};
    for (int j = 0; j < N; ++j) s += in[j] * std::polar(1.0, sign * 2.0 * M_PI * (static_cast<long>(j) * k % N) / N);
    out[k] = s;
  }
  return out;
}

// Periodized Gauss-Weierstrass kernel sum_n (4 pi t)^{-1/2} exp(-(x + 2nT)^2 / 4t).
inline double gauss_lattice(double x, double t, double T, int terms = 60) {
  double s = 0.0;
  for (int n = -terms; n <= terms; ++n) {
    const double y = x + 2.0 * n * T;
    s += std::exp(-y * y / (4.0 * t)) / std::sqrt(4.0 * M_PI * t);
  }
  return s;
}

// Periodized Poisson kernel sum_n (1/pi) t / (t^2 + (x + 2nT)^2), |n| <= terms plus the
// midpoint-rule integral of the two tails.
inline double poisson_lattice(double x, double t, double T, int terms = 20000) {
  double s = 0.0;
  for (int n = -terms; n <= terms; ++n) {
    const double y = x + 2.0 * n * T;
    s += t / (t * t + y * y) / M_PI;
  }
  const double edge = 2.0 * (terms + 0.5) * T;
  s += (0.5 * M_PI - std::atan((edge + x) / t)) / (2.0 * M_PI * T);
  s += (0.5 * M_PI - std::atan((edge - x) / t)) / (2.0 * M_PI * T);
  return s;
}

// Number of eigenvalues below lambda of the symmetric tridiagonal matrix (d, e) (Sturm count).
inline int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double lambda) {
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    q = d[i] - lambda - (i ? e[i - 1] * e[i - 1] / q : 0.0);
    if (q == 0.0) q = 1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

inline double tridiagonal_eigenvalue(const std::vector<double>& d, const std::vector<double>& e, int index) {
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double r = (i ? std::abs(e[i - 1]) : 0.0) + (i + 1 < d.size() ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(d, e, mid) > index) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Eigenvalue `index` of -u'' + (omega + V) u on [0, T/2] with the sector boundary conditions
// (even: u'(0) = 0, u(T/2) = 0; odd: u(0) = 0, u'(T/2) = 0) by second-order finite differences on
// a cell-centred grid of n and 2n cells followed by Richardson extrapolation.
inline double fd_sector_eigenvalue(const std::function<double(double)>& V, double omega, double T, bool even,
                                   int index, int n = 4000) {
  auto solve = [&](int cells) {
    const double h = 0.5 * T / cells;
    std::vector<double> d(cells), e(cells - 1, -1.0 / (h * h));
    for (int i = 0; i < cells; ++i) d[i] = 2.0 / (h * h) + omega + V((i + 0.5) * h);
    d.front() += (even ? -1.0 : 1.0) / (h * h);
    d.back() += (even ? 1.0 : -1.0) / (h * h);
    return tridiagonal_eigenvalue(d, e, index);
  };
  const double coarse = solve(n), fine = solve(2 * n);
  return (4.0 * fine - coarse) / 3.0;
}

// dN/dc for the alpha = 2 defocusing cd profile through the Galilean boost and the second
// (Floquet) solution of L_- y = 0 with y(0) = 0, y'(0) = 1.
inline double galilean_dNdc(const Elliptic& e) {
  using State = std::array<double, 3>;
  const double T = e.T, om = e.omega();
  State y{0.0, 1.0, 0.0};
  auto rhs = [&](const State& s, State& d, double x) {
    const double p = e.value(x);
    d[0] = s[1];
    d[1] = (om + p * p) * s[0];
    d[2] = e.derivative(x) * s[0];
  };
  namespace ode = boost::numeric::odeint;
  ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_fehlberg78<State>>(1e-14, 1e-14), rhs, y, 0.0, T,
                          1e-3);
  const double p0 = e.value(0.0);
  const double kappa = T / (2.0 * y[0] / p0);
  return T * p0 * p0 / 4.0 - e.charge() / 2.0 + kappa * y[2];
}

}  // namespace oracle
