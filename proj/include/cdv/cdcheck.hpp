#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cdv/mms.hpp"
#include "cdv/transport.hpp"

namespace cdv {

struct EntropyValue {
  double N = 1.0;
  double value = 0.0;
};

// E_N(mu) = sum rho^{1-1/N} m over the absolutely continuous part.
EntropyValue renyi_entropy(const Space& space, const Measure& mu, double N);

struct CDRow {
  double t = std::numeric_limits<double>::quiet_NaN();
  double Nprime = std::numeric_limits<double>::quiet_NaN();
  double margin = 0.0;
  std::string witness;
};

struct CDReport {
  std::string condition;
  double tol = 0.0;
  std::vector<CDRow> rows;
  double worst = std::numeric_limits<double>::infinity();
  double worst_t = std::numeric_limits<double>::quiet_NaN();
  std::string witness;
  bool pass = true;
  bool inconclusive = false;  // failing plan that is not certified unique

  void add(CDRow row);
  void finish();  // pass iff worst >= -tol
  std::string verdict() const;
};

// C (dx + dt): grid tolerance for the CD checks.
double cd_tolerance(double dx, double dt, double C = 0.1);

// Default ladder N, N+1, 2N, 10N.
std::vector<double> nprime_ladder(double N);

// CD_p(K,N) along the plan's interpolants at every grid time. `degenerate` marks a
// plan whose support moved under perturbation: a failure is then inconclusive.
CDReport check_cdp(const Space& space, const DynamicalPlan& nu, double K, double N,
                   std::span<const double> nprimes, double tol, bool degenerate = false);

struct McpOptions {
  double ball_radius = 0.0;  // 0: three times the grid spacing
  double rel_tol = 0.1;
};
// Contraction of m restricted to A onto the Dirac mass at o. Densities are ball
// averages; margin is 1 - m(A) * (averaged density of the tau^N-weighted push-forward).
CDReport check_mcp(const Space& space, std::span<const std::size_t> A, std::size_t o, double K,
                   double N, std::span<const double> t_grid, const McpOptions& opts = {});

struct DensityProfile1D {
  std::vector<double> grid;
  std::vector<double> h;
  double K0 = 0.0;
  double N = 2.0;
};

// sigma form on all sampled triples: h(x_k)^{1/(N-1)} >= sigma^{(1-s)} h(x_i)^{1/(N-1)}
// + sigma^{(s)} h(x_j)^{1/(N-1)}, s = (x_k - x_i)/(x_j - x_i), K = K0, calligraphic N-1.
CDReport check_density_1d(const DensityProfile1D& profile, double tol);
// (-log h)'' >= ((-log h)')^2/(N-1) + K by non-uniform three-point differences.
CDReport check_kn_convexity(const DensityProfile1D& profile, double tol);

// tau^{(s/t)}(d(g0,gt))^N <= rho_t(g_t)/rho_s(g_s) <= tau^{((1-t)/(1-s))}(d(gs,g1))^{-N}
// over grid pairs s < t < 1; margins are relative to the ratio.
CDReport check_density_ratio_bounds(const Space& space, const DynamicalPlan& nu,
                                    const std::vector<DensitySnapshot>& snapshots, double K,
                                    double N, double tol);

}  // namespace cdv
