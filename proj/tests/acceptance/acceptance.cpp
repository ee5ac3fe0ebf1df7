// Acceptance suite: one PASS/FAIL line per criterion, detail lines indented below it.
#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fnls/dynamics.hpp"
#include "fnls/errors.hpp"
#include "fnls/heat_kernel.hpp"
#include "fnls/rearrangement.hpp"
#include "fnls/run.hpp"
#include "oracles/oracles.hpp"

using namespace fnls;
namespace fs = std::filesystem;

namespace {

// criterion 1
constexpr double kOracleTol = 1e-6;
constexpr double kOracleSeconds = 10.0;
// criterion 2
constexpr int kSectorSize = 512;
constexpr double kAlignment = 0.999;
constexpr double kDoublingShift = 1e-8;
constexpr double kSpectrumSeconds = 60.0;
// criterion 3
constexpr double kLatticeTol = 1e-10;
constexpr int kKernelGrid = 1024;
// criterion 4
constexpr int kRearrangeTrials = 100;
constexpr int kRearrangeGrid = 512;
constexpr double kDefectSlope = -1.0;
// criterion 5
constexpr double kIdentityTol = 1e-8;
constexpr double kChainTol = 1e-5;
constexpr double kDQdmuTol = 1e-8;
constexpr double kNonzeroDNdc = 1e-3;
// criterion 6
constexpr double kEquilibriumDt = 5e-5;
constexpr long kEquilibriumSteps = 100000;
constexpr double kEquilibriumRho = 1e-8;
constexpr double kEquilibriumDrift = 1e-8;
// criterion 7
constexpr double kStabilityDt = 2e-3;
constexpr double kCEmpMax = 50.0;
constexpr double kCEmpRatio = 3.0;
constexpr double kTrendRatio = 2.0;

int failures = 0;

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void detail(const std::string& s) { std::printf("    %s\n", s.c_str()); }

void verdict(int id, bool ok, const std::string& what) {
  std::printf("criterion %d %s  %s\n", id, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs body; a library exception counts as a failure of the criterion with its message recorded.
bool guarded(const std::function<bool()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    detail(std::string("exception: ") + e.what());
    return false;
  }
}

SolverSettings settings(int modes, double tol) {
  SolverSettings s;
  s.modes = modes;
  s.tol = tol;
  return s;
}

StandingProfile profile(int gamma, double alpha, double sigma, const SolverSettings& s) {
  const ProblemParams p{alpha, sigma, gamma, M_PI};
  return gamma < 0 ? solve_defocusing(p, 0.0, 1.0, s) : solve_focusing(p, 0.0, 1.0, s);
}

const char* branch(int gamma) { return gamma < 0 ? "defocusing" : "focusing"; }

void criterion1() {
  bool ok = true;
  for (bool focusing : {false, true}) {
    for (double m : focusing ? std::vector<double>{0.3, 0.6, 0.7} : std::vector<double>{0.3, 0.6, 0.9}) {
      ok &= guarded([&] {
        const oracle::Elliptic e{focusing, m, M_PI};
        const auto t0 = std::chrono::steady_clock::now();
        const ProblemParams p{2.0, 1.0, focusing ? +1 : -1, M_PI};
        const StandingProfile s = focusing ? solve_focusing(p, e.omega(), 1.0, settings(64, 1e-11))
                                           : solve_defocusing(p, 0.0, e.charge(), settings(64, 1e-11));
        const double secs = seconds_since(t0);
        const GridSamples g = to_grid(s.field, 1024);
        double err = 0.0;
        for (int j = 0; j < g.size(); ++j) err = std::max(err, std::abs(g.values[j] - e.value(g.x(j))));
        const double omega_err = std::abs(s.omega - e.omega());
        detail(fmt("%s m=%.1f  sup error %.2e  omega error %.2e  %.3f s", focusing ? "cn" : "cd", m, err, omega_err,
                   secs));
        return err <= kOracleTol && omega_err <= kOracleTol && secs <= kOracleSeconds;
      });
    }
  }
  verdict(1, ok, fmt("alpha = 2 elliptic oracles (sup error <= %.0e, <= %.0f s per point)", kOracleTol, kOracleSeconds));
}

void criterion2() {
  bool ok = true;
  int points = 0;
  for (int gamma : {-1, +1})
    for (double alpha : {1.25, 1.5, 1.9})
      for (double sigma : {0.5, 1.0, 2.0}) {
        ok &= guarded([&] {
          const auto t0 = std::chrono::steady_clock::now();
          const StandingProfile p = profile(gamma, alpha, sigma, settings(256, 1e-10));
          const NondegeneracyReport r = nondegeneracy_check(p, kSectorSize, true);
          const double secs = seconds_since(t0);
          const int want_plus = gamma < 0 ? 0 : 1, want_minus = gamma < 0 ? 1 : 0;
          const double shift = std::max(r.plus.doubling_shift, r.minus.doubling_shift);
          const double lambda0 = std::max(std::abs(r.plus.lambda0), std::abs(r.minus.lambda0));
          const bool pass = r.plus.near_zero == 1 && r.minus.near_zero == 1 && lambda0 <= r.tol_kernel &&
                            r.plus.alignment >= kAlignment && r.minus.alignment >= kAlignment &&
                            r.morse_plus == want_plus && r.morse_minus == want_minus && r.ground_sign_definite &&
                            shift <= kDoublingShift && secs <= kSpectrumSeconds;
          detail(fmt("%-10s alpha=%.2f sigma=%.1f  morse (%d,%d)  |lambda0| %.1e / tol %.1e  align %.9f  "
                     "doubling %.1e  %.1f s  %s",
                     branch(gamma), alpha, sigma, r.morse_plus, r.morse_minus, lambda0, r.tol_kernel,
                     std::min(r.plus.alignment, r.minus.alignment), shift, secs, pass ? "ok" : "FAIL"));
          ++points;
          return pass;
        });
      }
  verdict(2, ok && points >= 9,
          fmt("nondegeneracy at %d points, sector size %d with doubling (shift <= %.0e, <= %.0f s per point)", points,
              kSectorSize, kDoublingShift, kSpectrumSeconds));
}

void criterion3() {
  bool ok = true;
  for (double T : {M_PI, 2.0}) {
    for (double alpha : {1.1, 1.5, 2.0})
      for (double t : {0.1, 1.0, 10.0}) {
        ok &= guarded([&] {
          const double ts = t * std::pow(T / M_PI, alpha);
          const PositivityReport r = positivity_report(kernel_ka(alpha, T, ts, kKernelGrid));
          const double margin =
              std::min({r.interior.margin, r.monotone.margin, r.even_pair.margin, r.odd_pair.margin});
          detail(fmt("T=%.4f alpha=%.1f t=%.4g  smallest margin %.3e  %s", T, alpha, ts, margin,
                     r.passed && margin > 0.0 ? "ok" : "FAIL"));
          return r.passed && margin > 0.0;
        });
      }
    for (double alpha : {1.0, 2.0})
      for (double t : {0.1, 1.0, 10.0}) {
        ok &= guarded([&] {
          const double ts = t * std::pow(T / M_PI, alpha);
          const KernelSamples k = kernel_kp(alpha, T, ts, kKernelGrid);
          double err = 0.0;
          for (int j = 0; j < k.size(); ++j) {
            const double ref =
                alpha == 2.0 ? oracle::gauss_lattice(k.x(j), ts, T) : oracle::poisson_lattice(k.x(j), ts, T);
            err = std::max(err, std::abs(k.values[j] - ref));
          }
          detail(fmt("T=%.4f alpha=%.0f t=%.4g  lattice-sum error %.2e", T, alpha, ts, err));
          return err <= kLatticeTol;
        });
      }
  }
  verdict(3, ok, fmt("kernel positivity margins > 0 and lattice oracles <= %.0e", kLatticeTol));
}

void criterion4() {
  bool ok = true;
  std::mt19937_64 rng(2024);
  for (double alpha : {1.25, 1.5, 2.0}) {
    ok &= guarded([&] {
      int ps_violations = 0;
      double worst = 0.0;
      for (int i = 0; i < kRearrangeTrials; ++i) {
        const PolyaSzegoReport r = polya_szego_check(random_field(M_PI, 16, 8, rng), alpha, kRearrangeGrid);
        ps_violations += r.passed ? 0 : 1;
        worst = std::max(worst, r.defect / r.K_f);
      }
      detail(fmt("alpha=%.2f  Polya-Szego: %d fields, %d violations, largest relative excess %.1e", alpha,
                 kRearrangeTrials, ps_violations, worst));

      // potentials: +-cos(2 pi x / T) and |phi|^2 of both profiles at this alpha
      std::vector<std::pair<std::string, GridSamples>> potentials;
      for (int sign : {1, -1}) {
        GridSamples V{M_PI, CVec(kRearrangeGrid)};
        for (int j = 0; j < kRearrangeGrid; ++j) V.values[j] = sign * std::cos(2.0 * V.x(j));
        potentials.emplace_back(sign > 0 ? "cos 2x" : "-cos 2x", V);
      }
      for (int gamma : {-1, +1}) {
        GridSamples V = to_grid(profile(gamma, alpha, 1.0, settings(64, 1e-10)).field, kRearrangeGrid);
        for (auto& v : V.values) v = std::norm(v);
        potentials.emplace_back(std::string("|phi|^2 ") + branch(gamma), V);
      }
      int po_violations = 0;
      for (std::size_t i = 0; i < potentials.size(); ++i) {
        const PotentialOrderingReport r = potential_ordering_check(potentials[i].second, kRearrangeTrials, 77 + i);
        po_violations += r.violations;
        detail(fmt("alpha=%.2f  potential ordering, %-20s %s: %d violations, min margin %.2e",
                   alpha, potentials[i].first.c_str(), r.monotonicity.c_str(), r.violations, r.min_margin));
      }

      const DefectStudy d = rearrangement_defect_study(alpha, M_PI, {256, 512, 1024}, 10, 99, 65536);
      detail(fmt("alpha=%.2f  defect %.2e / %.2e / %.2e at N = 256 / 512 / 1024, slope %.2f", alpha, d.defects[0],
                 d.defects[1], d.defects[2], d.slope));
      return ps_violations == 0 && po_violations == 0 && d.slope <= kDefectSlope;
    });
  }
  verdict(4, ok, fmt("rearrangement inequalities on %d fields per check, defect slope <= %.0f", kRearrangeTrials,
                     kDefectSlope));
}

void criterion5() {
  bool ok = true;
  const SolverSettings st = settings(128, 1e-12);
  for (int gamma : {-1, +1})
    for (double alpha : {1.25, 1.5, 1.9})
      for (double sigma : {1.0, 2.0}) {
        ok &= guarded([&] {
          const StandingProfile p = profile(gamma, alpha, sigma, st);
          const FredholmReport f = fredholm_range_checks(p, 128);
          bool pass = f.lminus_dphi_identity <= kIdentityTol && f.lplus_phi_identity <= kIdentityTol;
          std::string line = fmt("%-10s alpha=%.2f sigma=%.0f  L-phi' %.1e  L+phi %.1e", branch(gamma), alpha, sigma,
                                 f.lminus_dphi_identity, f.lplus_phi_identity);
          if (gamma < 0) {
            const JordanReport j = jordan_structure(p, st, 128);
            pass = pass && j.chain_mu_residual <= kChainTol && j.chain_c_residual <= kChainTol &&
                   std::abs(j.dQdmu - 1.0) <= kDQdmuTol && std::abs(j.dNdc) >= kNonzeroDNdc;
            line += fmt("  chain mu %.1e  chain c %.1e  dQ/dmu-1 %.1e  dN/dc %.4f", j.chain_mu_residual,
                        j.chain_c_residual, j.dQdmu - 1.0, j.dNdc);
          }
          detail(line + (pass ? "  ok" : "  FAIL"));
          return pass;
        });
      }
  verdict(5, ok, fmt("identities <= %.0e, chain residuals <= %.0e, dQ/dmu = 1, dN/dc != 0", kIdentityTol, kChainTol));
}

struct EquilibriumResult {
  double rho = 0.0;
  DriftSummary drift;
};

EquilibriumResult equilibrium(const StandingProfile& phi, double dt, long steps) {
  const int Me = std::max(2 * phi.field.mode_count(), phi.grid / 4);
  Propagator prop(phi.params, phi.omega, phi.c, dt, Me);
  const AntiperiodicField u0 = phi.field.resized(Me);
  prop.load(u0);
  std::vector<ConservedSample> log{{0.0, hamiltonian(u0, phi.params, prop.grid()), charge(u0), momentum(u0)}};
  EquilibriumResult r;
  const long chunk = steps / 100;
  for (long done = 0; done < steps; done += chunk) {
    prop.advance(chunk);
    const AntiperiodicField u = prop.field();
    r.rho = std::max(r.rho, orbital_distance(u, phi));
    log.push_back({(done + chunk) * dt, hamiltonian(u, phi.params, prop.grid()), charge(u), momentum(u)});
  }
  r.drift = conservation_drift(log);
  return r;
}

void criterion6() {
  bool ok = true;
  for (int gamma : {-1, +1}) {
    ok &= guarded([&] {
      const StandingProfile phi = profile(gamma, 1.5, 1.0, settings(64, 1e-12));
      const EquilibriumResult r = equilibrium(phi, kEquilibriumDt, kEquilibriumSteps);
      detail(fmt("%-10s dt=%.0e steps=%ld  rho %.2e  drift H %.1e Q %.1e N %.1e", branch(gamma), kEquilibriumDt,
                 kEquilibriumSteps, r.rho, r.drift.H, r.drift.Q, r.drift.N));
      for (double dt : {1e-3, 1e-4}) {
        const EquilibriumResult info = equilibrium(phi, dt, kEquilibriumSteps);
        detail(fmt("%-10s dt=%.0e steps=%ld  rho %.2e  drift %.1e  (informational)", branch(gamma), dt,
                   kEquilibriumSteps, info.rho, info.drift.max()));
      }
      return r.rho <= kEquilibriumRho && r.drift.max() <= kEquilibriumDrift;
    });
  }
  verdict(6, ok, fmt("equilibrium over %ld steps: rho <= %.0e, relative drifts <= %.0e", kEquilibriumSteps,
                     kEquilibriumRho, kEquilibriumDrift));
}

void criterion7() {
  bool ok = true;
  const SolverSettings st = settings(64, 1e-12);
  for (auto [alpha, sigma] : {std::pair{1.5, 1.0}, std::pair{1.9, 2.0}, std::pair{1.25, 1.0}}) {
    ok &= guarded([&, alpha = alpha, sigma = sigma] {
      const auto t0 = std::chrono::steady_clock::now();
      const StandingProfile phi = profile(-1, alpha, sigma, st);
      const JordanReport j = jordan_structure(phi, st, 128);
      StabilityOptions so;
      so.eps = {1e-4, 1e-3};
      so.dt = kStabilityDt;
      so.horizon = 100.0 * phi.params.T;
      so.seed = 7;
      so.workers = 2;
      const StabilityReport r = stability_experiment(phi, so);
      bool pass = std::abs(j.dNdc) >= kNonzeroDNdc;
      double lo = r.runs.front().C_emp, hi = lo;
      std::string runs;
      for (const StabilityRun& run : r.runs) {
        pass = pass && run.C_emp <= kCEmpMax && run.trend_ratio <= kTrendRatio;
        lo = std::min(lo, run.C_emp);
        hi = std::max(hi, run.C_emp);
        runs += fmt("  eps %.0e: C_emp %.3f trend %.2f drift %.1e", run.eps, run.C_emp, run.trend_ratio,
                    run.drift.max());
      }
      pass = pass && hi <= kCEmpRatio * lo;
      detail(fmt("alpha=%.2f sigma=%.0f  dN/dc %.4f", alpha, sigma, j.dNdc) + runs +
             fmt("  ratio %.2f  %.1f s  %s", hi / lo, seconds_since(t0), pass ? "ok" : "FAIL"));
      return pass;
    });
  }
  verdict(7, ok, fmt("orbital stability over 100 T: C_emp <= %.0f, eps ratio within %.0fx, trend <= %.0f", kCEmpMax,
                     kCEmpRatio, kTrendRatio));
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void criterion8() {
  bool ok = true;
  const fs::path scratch = fs::temp_directory_path() / "fnls_acceptance_determinism";
  fs::remove_all(scratch);
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(fs::path(FNLS_SOURCE_DIR) / "configs"))
    if (entry.path().extension() == ".ini") configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());
  for (const fs::path& path : configs) {
    ok &= guarded([&] {
      RunConfig cfg = load_config(path.string());
      const std::string name = path.stem().string();
      std::vector<fs::path> dirs;
      for (int workers : {1, 1, 3}) {
        cfg.workers = workers;
        dirs.push_back(scratch / (name + "_" + std::to_string(dirs.size())));
        emit(run(cfg), dirs.back().string());
      }
      int files = 0, mismatched = 0;
      std::string which;
      for (const auto& entry : fs::directory_iterator(dirs[0])) {
        const std::string file = entry.path().filename().string();
        if (file == "provenance.json") continue;
        ++files;
        const std::string ref = slurp(entry.path());
        // the config echo records the worker count, so it is compared only between identical configs
        const std::size_t last = file == "config.ini" ? 2 : dirs.size();
        for (std::size_t i = 1; i < last; ++i)
          if (!fs::exists(dirs[i] / file) || slurp(dirs[i] / file) != ref) {
            ++mismatched;
            which += " " + file;
          }
      }
      detail(fmt("%-12s %d files x 3 runs (workers 1, 1, 3): %d mismatches%s", name.c_str(), files, mismatched,
                 which.c_str()));
      return files > 0 && mismatched == 0;
    });
  }
  fs::remove_all(scratch);
  verdict(8, ok, "reports and tables byte-identical across reruns with a fixed seed");
}

}  // namespace

// With arguments, runs only the listed criteria (e.g. "acceptance 6 8").
int main(int argc, char** argv) {
  const std::vector<void (*)()> criteria = {criterion1, criterion2, criterion3, criterion4,
                                            criterion5, criterion6, criterion7, criterion8};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (int id = 1; id <= 8; ++id) selected.push_back(id);
  const auto t0 = std::chrono::steady_clock::now();
  for (int id : selected) {
    if (id < 1 || id > 8) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    criteria[id - 1]();
  }
  std::printf("%d of %zu criteria failed, %.1f s\n", failures, selected.size(), seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
