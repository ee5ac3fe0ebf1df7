#include <doctest.h>

#include <random>

#include "fnls/errors.hpp"
#include "fnls/functionals.hpp"

using namespace fnls;

namespace {

AntiperiodicField plane_wave(double T, int M, int k, cplx a) {
  AntiperiodicField f(T, M);
  f[f.index(k)] = a;
  return f;
}

}  // namespace

TEST_CASE("single-mode values") {
  const double T = 2.5, alpha = 1.4;
  const cplx a{0.3, -0.4};
  for (int k : {-3, 1, 5}) {
    const AntiperiodicField f = plane_wave(T, 4, k, a);
    CHECK(charge(f) == doctest::Approx(0.5 * T * std::norm(a)));
    CHECK(momentum(f) == doctest::Approx(-0.5 * M_PI * k * std::norm(a)));
    CHECK(kinetic(f, alpha) == doctest::Approx(0.5 * T * std::pow(std::abs(M_PI * k / T), alpha) * std::norm(a)));
    // |f| is constant, so P = T |a|^(2 sigma + 2) / (2 sigma + 2)
    CHECK(potential(f, 1.5, 64) == doctest::Approx(T * std::pow(std::abs(a), 5.0) / 5.0).epsilon(1e-13));
  }
}

TEST_CASE("real fields carry no momentum") {
  std::mt19937_64 rng(4);
  const AntiperiodicField f = random_field(M_PI, 16, 8, rng);
  CHECK(std::abs(momentum(f)) < 1e-15 * charge(f));
}

TEST_CASE("conjugation reverses momentum") {
  std::mt19937_64 rng(8);
  const AntiperiodicField f = random_field(M_PI, 16, 8, rng, true);
  CHECK(momentum(f.conj()) == doctest::Approx(-momentum(f)).epsilon(1e-13));
  CHECK(charge(f.conj()) == doctest::Approx(charge(f)));
}

TEST_CASE("potential matches a fine direct quadrature") {
  std::mt19937_64 rng(2);
  const AntiperiodicField f = random_field(M_PI, 8, 8, rng, true);
  const double sigma = 1.0;
  const int n = 4096;
  const GridSamples g = to_grid(f, n);
  double s = 0.0;
  for (int j = 0; j < n / 2; ++j) s += std::pow(std::abs(g.values[j]), 4);
  const double direct = 0.25 * g.spacing() * s;
  CHECK(potential(f, sigma) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("gradient matches finite differences of the Lagrangian") {
  const ProblemParams p{1.6, 1.0, +1, 2.0};
  std::mt19937_64 rng(21);
  const AntiperiodicField u = random_field(p.T, 16, 6, rng, true);
  const double c = 0.3, omega = -0.2;
  const int N = 256;
  const AntiperiodicField g = gradient(u, c, omega, p, N);
  for (int trial = 0; trial < 4; ++trial) {
    const AntiperiodicField v = random_field(p.T, 16, 6, rng, true);
    const double h = 1e-5;
    const double fd =
        (lagrangian(u + h * v, c, omega, p, N) - lagrangian(u - h * v, c, omega, p, N)) / (2.0 * h);
    CHECK(fd == doctest::Approx(inner(g, v)).epsilon(1e-7));
  }
}

TEST_CASE("individual variational derivatives") {
  std::mt19937_64 rng(5);
  const AntiperiodicField u = random_field(M_PI, 12, 6, rng, true), v = random_field(M_PI, 12, 6, rng, true);
  const double h = 1e-5;
  const double dK = (kinetic(u + h * v, 1.3) - kinetic(u - h * v, 1.3)) / (2 * h);
  const double dN = (momentum(u + h * v) - momentum(u - h * v)) / (2 * h);
  CHECK(dK == doctest::Approx(inner(grad_kinetic(u, 1.3), v)).epsilon(1e-8));
  CHECK(dN == doctest::Approx(inner(grad_momentum(u), v)).epsilon(1e-8));
  // grad N = i u'
  const AntiperiodicField iu = cplx(0, 1) * apply_multiplier(u, derivative(M_PI));
  for (int i = 0; i < u.size(); ++i) CHECK(std::abs(iu[i] - grad_momentum(u)[i]) < 1e-14);
}

TEST_CASE("evaluate bundles consistent values") {
  const ProblemParams p{1.5, 2.0, -1, M_PI};
  std::mt19937_64 rng(3);
  const AntiperiodicField u = random_field(p.T, 16, 8, rng, true);
  const FunctionalValues v = evaluate(u, p, 0.2, 0.4);
  CHECK(v.H == doctest::Approx(hamiltonian(u, p)));
  CHECK(v.H == doctest::Approx(v.K + v.P));
  CHECK(v.F_c == doctest::Approx(F_c(u, 0.2, p)));
  CHECK(v.E == doctest::Approx(lagrangian(u, 0.2, 0.4, p)));
}

TEST_CASE("zero field has zero gradient") {
  const ProblemParams p;
  const AntiperiodicField z(p.T, 8);
  const AntiperiodicField g = gradient(z, 0.1, 0.2, p);
  CHECK(g.max_abs_coeff() == 0.0);
}

TEST_CASE("problem windows") {
  auto check = [](double alpha, double sigma, int gamma, double T) { ProblemParams{alpha, sigma, gamma, T}.validate(); };
  CHECK_NOTHROW(check(2.0, 1.0, 1, 1.0));
  CHECK_THROWS_AS(check(1.0, 1.0, 1, 1.0), ValidationError);
  CHECK_THROWS_AS(check(1.5, 0.0, 1, 1.0), ValidationError);
  CHECK_THROWS_AS(check(1.5, 1.0, 0, 1.0), ValidationError);
  CHECK_THROWS_AS(check(1.5, 1.0, 1, -1.0), ValidationError);
  try {
    ProblemParams{2.5, 1.0, 1, 1.0}.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("alpha must lie in (1,2]") != std::string::npos);
  }
  const ProblemParams p{1.5, 1.0, -1, 2.0};
  CHECK(p.c_star() == doctest::Approx(std::pow(M_PI / 2.0, 0.5)));
  CHECK(p.omega_bound() == doctest::Approx(std::pow(M_PI / 2.0, 1.5)));
}
