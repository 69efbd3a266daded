#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdv/cdcheck.hpp"
#include "cdv/changevar.hpp"
#include "cdv/hopflax.hpp"
#include "cdv/mms.hpp"
#include "cdv/oracles.hpp"
#include "cdv/report.hpp"
#include "cdv/transport.hpp"

namespace cdv {

struct Problem {
  std::string name;
  Space space;
  Measure mu0, mu1;
  double p = 2.0;
  std::vector<double> grid;
  std::vector<double> s_list;
  std::optional<std::vector<double>> phi;  // closed-form potential sample, else LP duals
};

// Annulus A_{1,4} polar grid, mu0/mu1 with Lebesgue density 1/(omega_n |x|^{n-1}) on
// the shells [1,2] and [3,4] (fractional cell overlap), phi = -2^{q-1}|x| and the
// time lattice t = k dr/2 aligned with the radial spacing.
Problem radial_problem(int n_radial = 50, int n_angular = 64, double q = 2.0);
// Uniform block [0.1,0.3] translated onto [0.6,0.8] on a 100-cell grid of [0,1].
Problem translation_problem(double p = 2.0);
// Uniform block [0,0.25] stretched onto [0.5,1] on a 100-cell grid of [0,1].
Problem stretch_problem(double p = 2.0);

// Radial good subset: every bin of the geodesic stays a full cell away from the
// support boundary of mu_t.
bool radial_keep(const Space& space, const LedgerEntry& e);

struct InstanceOptions {
  double K = 0.0;
  double N = 2.0;
  double tol = 1e-6;          // generic numerical tolerance
  double grid_tol = 0.0;      // relative tolerance for grid-limited checks (chain, Y)
  std::uint64_t seed = 0;
  std::size_t needle_bins = 32;
  std::function<bool(const LedgerEntry&)> keep;  // optional good-subset surrogate
};

struct GeodesicAnalysis {
  std::size_t geodesic = 0;
  double length = 0.0, ell = 0.0, weight = 0.0;
  std::vector<double> t, rho, z;
  std::map<std::size_t, std::vector<double>> h;  // needle profile per grid index of s
  bool z_ok = true;
  LYFactorization ly;
  CDReport chain;
  ThirdOrderReport third;
};

struct InstanceResult {
  std::string name;
  double p = 2.0;
  SolveResult solve;
  PotentialField potentials;
  PotentialCertificate certificate;
  DynamicalPlan nu;
  std::vector<DensitySnapshot> snapshots;
  PotentialFamily family;
  SpeedProfile speeds;
  double tol_g = 0.0;
  std::map<std::size_t, PropagatedPotential> propagated;  // by grid index of s
  GeodesicLedger ledger;
  std::size_t excluded_filter = 0;  // dropped by InstanceOptions::keep (mass in ledger)
  ChangeOfVariablesReport cov;
  std::vector<GeodesicAnalysis> analyses;
  std::size_t z_inconsistent = 0;
  double z_spread = 0.0;
  SandwichReport sandwich;
  std::size_t sandwich_points = 0;
  SpeedBoundsReport speed_bounds;
  AffinityReport affinity;
  std::size_t needle_builds = 0, needle_failures = 0;
  double reconstruction = 0.0;
  std::vector<PartitionComparison> partitions;
  double runtime_seconds = 0.0;
};

InstanceResult run_instance(const Problem& prob, const InstanceOptions& opts);

// Relative errors of the radial run against the closed forms, evaluated at the
// grid points where each quantity is measured (cells touching a support boundary
// are left out).
struct RadialComparison {
  double cost = 0.0, phi_c = 0.0, rho = 0.0, Phi = 0.0, h = 0.0, ratio = 0.0, dPhi = 0.0;
  std::size_t samples = 0;
};
RadialComparison compare_radial(const Problem& prob, const InstanceResult& r,
                                const oracle::Radial& o);

// Exact-data stretch: rho(t) = rho0/(1+t), h = 1, ell = 0.5 + x0 on a uniform grid.
struct SyntheticStretch {
  std::vector<double> t, rho, z;
  double ell = 0.0;
  LYFactorization ly;
  ThirdOrderReport third;
  double z_spread = 0.0;
  double L_affinity = 0.0;  // max |L_k - chord(L_{k-1}, L_{k+1})|
};
SyntheticStretch synthetic_stretch(double x0, double p, std::size_t steps, double K, double N);

struct VerifyConfig {
  std::uint64_t seed = 0;
  double tol = 1e-6;
  int n_radial = 50, n_angular = 64;
  double q = 2.0;
};
struct VerifySummary {
  CsvReport report;
  bool pass = true;
};
VerifySummary verify_all(const VerifyConfig& cfg);

}  // namespace cdv
