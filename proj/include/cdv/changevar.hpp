#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "cdv/cdcheck.hpp"
#include "cdv/hopflax.hpp"
#include "cdv/mms.hpp"
#include "cdv/needle.hpp"
#include "cdv/transport.hpp"

namespace cdv {

// One geodesic of the plan sampled on the time grid: its bins, the binned density
// rho_t(gamma_t) and the speed field read at the bins (NaN where undefined).
struct LedgerEntry {
  std::size_t geodesic = 0;
  double length = 0.0;
  double weight = 0.0;
  std::vector<double> t;
  std::vector<std::size_t> bins;
  std::vector<double> rho;
  std::vector<double> speed;
};

struct LedgerFilters {
  double min_length = 1e-9;
  double max_length = std::numeric_limits<double>::infinity();
  double speed_fraction = 0.95;  // interior times with a well-defined speed
};

struct GeodesicLedger {
  std::vector<LedgerEntry> entries;      // positive length, retained
  std::vector<LedgerEntry> zero_length;  // checked for constant density only
  std::size_t excluded_length = 0, excluded_density = 0, excluded_speed = 0;
  double excluded_mass = 0.0;
  double zero_length_defect = 0.0;  // max |rho_t/rho_s - 1| over zero-length geodesics
};

GeodesicLedger build_ledger(const Space& space, const DynamicalPlan& nu,
                            const std::vector<DensitySnapshot>& snapshots, const SpeedProfile& sp,
                            const LedgerFilters& filters = {});

// Needle decomposition for u = d_{phi_s - a}.
struct LevelNeedle {
  double s = 0.0, a = 0.0;
  SignedDistanceField u;
  TransportStructure structure;
  RayDecomposition rays;
};
LevelNeedle needle_for_level(const Space& space, const PotentialFamily& fam, std::size_t ks,
                             double a, double zero_tol, std::size_t bins = 32);

// h_s(t) along the needle ray of gamma_s, normalised so h_s(s) = 1 (NaN where gamma_t
// leaves that ray).
std::vector<double> needle_profile(const Space& space, const RayDecomposition& rd,
                                   const LedgerEntry& e, std::size_t ks);

struct ChangeOfVariablesSample {
  std::size_t geodesic = 0;
  double s = 0.0, t = 0.0;
  double lhs = 0.0, rhs = 0.0, residual = 0.0;  // residual = |lhs - rhs| / rhs
};
struct ChangeOfVariablesReport {
  std::vector<ChangeOfVariablesSample> samples;
  double max_residual = 0.0;
  std::size_t evaluated = 0, skipped = 0;
  void merge(const ChangeOfVariablesReport& o);
};
// rho_t/rho_s against d_t Phi_s^t(gamma_t) / (ell^p h_s(t)) at every grid time t != s.
ChangeOfVariablesReport change_of_variables_residual(const LedgerEntry& e, std::size_t ks,
                                                     std::span<const double> h,
                                                     const PropagatedPotential& P, double p);

// z_s(t) = ((rho(t)/rho(s)) h_s(t) - 1)/(t - s), NaN at t = s or where h is missing.
std::vector<double> z_for_s(const LedgerEntry& e, std::size_t ks, std::span<const double> h);

struct ZEstimate {
  std::vector<double> z;  // median over s, NaN where no s contributes
  double spread = 0.0;    // max over t of (max - min) across s
};
// Throws when the per-s estimates disagree by more than 10 tol.
ZEstimate extract_z(const std::map<std::size_t, std::vector<double>>& per_s, double tol);

struct LYFactorization {
  std::vector<double> t, L, Y, rho;
  double K0 = 0.0;
  double r0 = 0.5;
  double concavity_margin = 0.0;  // min L_k - chord(L_{k-1}, L_{k+1})
  double scale = 1.0;             // max |L|
  double product_defect = 0.0;    // max |L Y rho - 1|
  CDReport y_report;
};
// Interior samples only (0 < t < 1). z is the logarithmic speed derivative, so
// L(r) = exp(-int_{r0}^r z).
LYFactorization ly_factorize(std::span<const double> t, std::span<const double> rho,
                             std::span<const double> z, double K, double N, double ell,
                             double r0, double y_tol);

// Limit of the interior samples if it is at least the marginal density minus tol,
// otherwise the marginal density.
double endpoint_density(double t_near, double rho_near, double t_next, double rho_next,
                        double t_end, double marginal, double tol);

// rho_{t_a}^{-1/N} >= tau^{(a)}(ell |t1-t0|) rho_{t1}^{-1/N} + tau^{(1-a)} rho_{t0}^{-1/N}
// on every sampled triple; margins relative to the left side.
CDReport cd_chain_verify(std::span<const double> t, std::span<const double> rho, double K,
                         double N, double ell, double tol);

// |sigma_{K ell^2,N}^{(a)}(theta) - sigma_{K,N}^{(a)}(theta ell)| relative to max(1, value);
// 0 when both are infinite, +inf when exactly one is.
double sigma_scaling_defect(double K, double N, double theta, double ell, double alpha);

struct PartitionComparison {
  double s = 0.0, a = 0.0, t = 0.0;
  std::size_t points = 0, skipped = 0;
  double max_rel_error = 0.0;  // |ell |dPhi/darc| - d_t Phi| / d_t Phi
  double mean_ratio = 0.0;     // mean of the L1/Lq density ratio
};
// L1 density in t at x is m(x) ell / w_x; Lq density in a is m(x) / (|dPhi/darc| w_x).
// Their ratio is compared with the time derivative of the propagated potential.
PartitionComparison partition_compare(const Space& space, const LevelNeedle& needle,
                                      std::span<const std::size_t> points, std::size_t kt,
                                      const SpeedProfile& sp, const PropagatedPotential& P);

}  // namespace cdv
