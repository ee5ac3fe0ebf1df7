#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "fnls/profile.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

// Discrete 2T-periodic symmetric decreasing rearrangement on N equal cells: samples sorted
// descending (stable) and placed at indices 0, +1, -1, +2, -2, ..., N/2.
GridSamples rearrange_star(const GridSamples& f);
// star shifted by T/2 (N/4 cells); requires N divisible by 4.
GridSamples rearrange_hash(const GridSamples& f);

// (h sum |f|^p)^{1/p}; p = infinity gives the max.
double lp_norm(const GridSamples& f, double p);

struct RearrangedPair {
  GridSamples original, star, hash;
  bool norms_match[3] = {false, false, false};  // p = 1, 2, infinity
};

RearrangedPair rearrange(const GridSamples& f);

struct PolyaSzegoReport {
  int N = 0, band = 0;
  double K_f = 0.0;
  double K_star = 0.0;       // star projected on the resolved band of f
  double K_hash = 0.0;
  double K_star_grid = 0.0;  // all grid modes (informational; not convergent for alpha near 2)
  double eps_rearr = 0.0;
  double defect = 0.0;  // max(0, K_star - K_f)
  bool passed = false;
};

// eps_rearr = 10 K(f) / N. Grid defaults to max(256, 8 M).
PolyaSzegoReport polya_szego_check(const AntiperiodicField& f, double alpha, int N = 0);

struct PotentialOrderingReport {
  std::string monotonicity;  // of V on (0, T/2)
  int trials = 0, violations = 0;
  double max_defect = 0.0;   // largest relative excess of the rearranged side
  double min_margin = 0.0;   // smallest relative gap lhs - rhs
  double eps_rearr = 0.0;
};

// V real, even, T-periodic samples over [0, 2T) that are monotone on (0, T/2); throws
// MonotonicityUnverified otherwise. Nonincreasing V is checked against f#, nondecreasing against f*.
PotentialOrderingReport potential_ordering_check(const GridSamples& V, int trials, std::uint64_t seed,
                                                 int active_modes = 12);

struct DefectStudy {
  double alpha = 0.0;
  std::vector<int> grids;
  std::vector<double> defects;  // max over fields of |K_band(star_N) - K_band(star_ref)| / K(f)
  std::vector<double> eps;      // 10 / N
  double slope = 0.0;           // least-squares slope of log defect against log N
  int reference_grid = 0;
};

DefectStudy rearrangement_defect_study(double alpha, double T, const std::vector<int>& grids, int fields,
                                       std::uint64_t seed, int reference_grid = 65536);

struct RayleighChainReport {
  double even_ground = 0.0;  // lowest L_minus eigenvalue, even sector
  double odd_ground = 0.0;
  double rq = 0.0;           // Rayleigh quotient of the rearranged source ground state in the target sector
  std::string source;        // "even" (hash into odd) for nonincreasing V, "odd" (star into even) otherwise
  double eps = 0.0;
  bool passed = false;       // target ground <= rq <= source ground + eps
};

RayleighChainReport rayleigh_chain_check(const StandingProfile& p, int size);

}  // namespace fnls
