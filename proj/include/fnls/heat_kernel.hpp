#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace fnls {

enum class KernelKind { Kp, Ka, SectorEven, SectorOdd };

struct KernelSamples {
  double alpha = 1.0, T = 1.0, t = 1.0;
  KernelKind kind = KernelKind::Kp;
  std::vector<double> values;  // at x_j = 2 T j / N, j = 0..N-1
  double tail_estimate = 0.0;
  int terms = 0;  // highest wavenumber kept

  int size() const { return static_cast<int>(values.size()); }
  double x(int j) const { return 2.0 * T * j / size(); }
  // Value at grid index j, taken modulo N.
  double at(int j) const {
    const int N = size();
    return values[((j % N) + N) % N];
  }
};

// K_p(x, t) = (1/2T) sum_n exp(-|pi n/T|^alpha t) exp(i pi n x/T); integrates to 1 over [-T, T].
KernelSamples kernel_kp(double alpha, double T, double t, int N);
// K_a(x, t) = K_p(x, t) - K_p(x - T, t)
KernelSamples kernel_ka(double alpha, double T, double t, int N);

// y -> K_a(x_i - y) + K_a(x_i + y) (SectorEven) or K_a(x_i - y) - K_a(x_i + y) (SectorOdd).
KernelSamples sector_kernel_row(const KernelSamples& ka, int i, KernelKind kind);

struct KernelCheck {
  double margin = 0.0;  // minimum of the checked quantity (value or difference)
  double x = 0.0, y = 0.0;  // location of the minimum
};

struct PositivityReport {
  KernelCheck interior;   // K_a > 0 on (-T/2, T/2)
  KernelCheck monotone;   // K_a(x_j) - K_a(x_{j+1}) > 0 on (0, T)
  KernelCheck even_pair;  // K_a(x - y) + K_a(x + y) > 0 on (-T/2, T/2)^2
  KernelCheck odd_pair;   // K_a(x - y) - K_a(x + y) > 0 on (0, T)^2
  bool passed = false;
};

// Throws PositivityViolation at the first failing check.
PositivityReport positivity_report(const KernelSamples& ka);

struct ProbeReport {
  int trials = 0;
  double min_even = 0.0;  // smallest output value on the even reference interior over all trials
  double min_odd = 0.0;
};

ProbeReport semigroup_positivity_probe(double alpha, double T, double t, int trials, std::uint64_t seed,
                                       int N = 256);

// Nonnegative even-sector / odd-sector test inputs on a grid of size N built from a profile
// g >= 0 sampled on [0, T/2].
std::vector<double> even_sector_input(const std::vector<double>& g_quarter, int N);
std::vector<double> odd_sector_input(const std::vector<double>& g_quarter, int N);

}  // namespace fnls
