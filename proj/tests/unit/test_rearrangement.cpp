#include <doctest.h>

#include <algorithm>
#include <random>

#include "fnls/errors.hpp"
#include "fnls/rearrangement.hpp"

using namespace fnls;

namespace {

GridSamples sampled(double T, int N, double (*fn)(double)) {
  GridSamples g{T, CVec(N)};
  for (int j = 0; j < N; ++j) g.values[j] = fn(g.x(j));
  return g;
}

std::vector<double> sorted_real(const GridSamples& g) {
  std::vector<double> v;
  for (const auto& z : g.values) v.push_back(z.real());
  std::sort(v.begin(), v.end());
  return v;
}

GridSamples random_samples(int N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return to_grid(random_field(M_PI, 32, 10, rng), N);
}

}  // namespace

TEST_CASE("rearrangements are equimeasurable") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const GridSamples f = random_samples(256, seed);
    const RearrangedPair r = rearrange(f);
    CHECK(sorted_real(r.star) == sorted_real(f));
    CHECK(sorted_real(r.hash) == sorted_real(f));
    for (bool ok : r.norms_match) CHECK(ok);
    for (double p : {1.0, 2.0, 4.0}) CHECK(lp_norm(r.star, p) == doctest::Approx(lp_norm(f, p)).epsilon(1e-13));
  }
}

TEST_CASE("star is symmetric decreasing and hash is its quarter shift") {
  const int N = 256;
  const GridSamples f = random_samples(N, 9);
  const GridSamples s = rearrange_star(f), h = rearrange_hash(f);
  for (int m = 1; m < N / 2; ++m) {
    CHECK(s.values[m].real() <= s.values[m - 1].real());
    CHECK(s.values[N - m].real() <= s.values[(N - m + 1) % N].real());
    // interleaving: +m is ranked before -m
    CHECK(s.values[m].real() >= s.values[N - m].real());
  }
  for (int j = 0; j < N; ++j) CHECK(h.values[(j + N / 4) % N] == s.values[j]);
  // antiperiodic input keeps antiperiodicity
  CHECK(s.antiperiodicity_defect() == 0.0);
  CHECK(h.antiperiodicity_defect() == 0.0);
}

TEST_CASE("symmetric decreasing data is a fixed point") {
  const GridSamples c = sampled(M_PI, 128, [](double x) { return std::cos(x); });
  const GridSamples s = rearrange_star(c);
  for (int j = 0; j < 128; ++j) CHECK(std::abs(s.values[j] - c.values[j]) < 1e-15);
  // cos shifted by a whole number of cells comes back to cos; the hash of cos is sin
  const GridSamples shifted = sampled(M_PI, 128, [](double x) { return std::cos(x - 2.0 * M_PI * 7 / 128); });
  const GridSamples s2 = rearrange_star(shifted), h2 = rearrange_hash(shifted);
  for (int j = 0; j < 128; ++j) {
    CHECK(std::abs(s2.values[j] - c.values[j]) < 1e-15);
    CHECK(std::abs(h2.values[j].real() - std::sin(c.x(j))) < 1e-14);
  }
}

TEST_CASE("complex samples are rejected") {
  GridSamples g = random_samples(128, 4);
  g.values[3] += cplx(0.0, 0.1);
  CHECK_THROWS_AS(rearrange_star(g), ComplexInput);
  CHECK_THROWS_AS(rearrange_hash(g), ComplexInput);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(polya_szego_check(random_field(M_PI, 16, 8, rng, true), 1.5), ComplexInput);
}

TEST_CASE("Polya-Szego inequality on random fields") {
  std::mt19937_64 rng(11);
  for (double alpha : {1.2, 1.6, 2.0}) {
    for (int trial = 0; trial < 15; ++trial) {
      const AntiperiodicField f = random_field(M_PI, 32, 8, rng);
      const PolyaSzegoReport r = polya_szego_check(f, alpha, 512);
      CAPTURE(alpha);
      CHECK(r.passed);
      CHECK(r.K_star <= r.K_f + r.eps_rearr);
      CHECK(r.K_hash == doctest::Approx(r.K_star).epsilon(1e-12));
      CHECK(r.eps_rearr == doctest::Approx(10.0 * r.K_f / 512));
    }
  }
}

TEST_CASE("Polya-Szego equality for the fundamental cosine and strict gap for higher modes") {
  AntiperiodicField f(M_PI, 16);
  f[f.index(1)] = 0.5;
  f[f.index(-1)] = 0.5;
  const PolyaSzegoReport eq = polya_szego_check(f, 1.5, 512);
  CHECK(eq.K_star == doctest::Approx(eq.K_f).epsilon(1e-12));
  AntiperiodicField g(M_PI, 16);
  g[g.index(3)] = 0.5;
  g[g.index(-3)] = 0.5;
  const PolyaSzegoReport gap = polya_szego_check(g, 1.5, 512);
  CHECK(gap.K_star < 0.5 * gap.K_f);
}

TEST_CASE("potential ordering for monotone potentials") {
  const int N = 256;
  const GridSamples down = sampled(M_PI, N, [](double x) { return std::cos(2.0 * x); });
  const GridSamples up = sampled(M_PI, N, [](double x) { return -std::cos(2.0 * x); });
  const GridSamples flat = sampled(M_PI, N, [](double) { return 0.7; });
  const PotentialOrderingReport a = potential_ordering_check(down, 30, 5);
  const PotentialOrderingReport b = potential_ordering_check(up, 30, 5);
  const PotentialOrderingReport c = potential_ordering_check(flat, 10, 5);
  CHECK(a.monotonicity == "nonincreasing");
  CHECK(b.monotonicity == "nondecreasing");
  CHECK(c.monotonicity == "constant");
  CHECK(a.violations == 0);
  CHECK(b.violations == 0);
  CHECK(c.violations == 0);
  CHECK(a.min_margin > -1e-14);
  CHECK(b.min_margin > -1e-14);
  CHECK(std::abs(c.min_margin) < 1e-13);
}

TEST_CASE("potential ordering refuses unverifiable potentials") {
  const int N = 256;
  CHECK_THROWS_AS(potential_ordering_check(sampled(M_PI, N, [](double x) { return std::cos(4.0 * x); }), 5, 1),
                  MonotonicityUnverified);
  CHECK_THROWS_AS(potential_ordering_check(sampled(M_PI, N, [](double x) { return std::cos(x); }), 5, 1),
                  MonotonicityUnverified);
  CHECK_THROWS_AS(potential_ordering_check(sampled(M_PI, N, [](double x) { return std::sin(2.0 * x); }), 5, 1),
                  MonotonicityUnverified);
}

TEST_CASE("discretization defect shrinks with the grid") {
  const DefectStudy d = rearrangement_defect_study(1.5, M_PI, {256, 512, 1024}, 4, 3, 16384);
  REQUIRE(d.defects.size() == 3);
  CHECK(d.defects[2] < d.defects[0]);
  CHECK(d.slope <= -1.0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(d.eps[i] == doctest::Approx(10.0 / d.grids[i]));
}

TEST_CASE("Rayleigh-quotient chain between sectors") {
  SolverSettings s;
  s.modes = 64;
  const StandingProfile d = solve_defocusing({1.5, 1.0, -1, M_PI}, 0.0, 1.0, s);
  const StandingProfile f = solve_focusing({1.5, 1.0, +1, M_PI}, 0.0, 1.0, s);
  const RayleighChainReport rd = rayleigh_chain_check(d, 128), rf = rayleigh_chain_check(f, 128);
  CHECK(rd.source == "even");
  CHECK(rf.source == "odd");
  CHECK(rd.passed);
  CHECK(rf.passed);
  CHECK(rd.odd_ground <= rd.rq + rd.eps);
  CHECK(rd.rq <= rd.even_ground + rd.eps);
  CHECK(rf.even_ground <= rf.rq + rf.eps);
  CHECK(rf.rq <= rf.odd_ground + rf.eps);
}
