#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cdv/mms.hpp"

namespace cdv {

struct PlanAtom {
  std::size_t source = 0;
  std::size_t target = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<PlanAtom> atoms;
  double p = 2.0;
  double total_cost = 0.0;  // sum of pi_ij d_ij^p
  bool degenerate = false;  // support moved under a 1e-10 cost perturbation

  double wasserstein() const;
};

// Kantorovich pair for the cost d^p/p.
struct PotentialField {
  std::vector<double> phi;
  std::vector<double> phi_c;
  double p = 2.0;
};

struct SolveOptions {
  bool check_degeneracy = true;
  std::uint64_t seed = 0;
};

struct SolveResult {
  TransportPlan plan;
  PotentialField potentials;
  double primal = 0.0;  // LP value with cost d^p/p
  double dual = 0.0;
  double gap = 0.0;
  std::size_t pivots = 0;
};

struct DynamicalPlan {
  std::vector<Geodesic> geodesics;
  std::vector<double> weights;
  std::vector<std::size_t> source, target;
  std::vector<double> grid;
  double p = 2.0;

  std::size_t size() const { return geodesics.size(); }
};

// Binned push-forward (e_t)#nu. `rho` is the density w.r.t. the reference
// measure (0 where m vanishes); `bin` maps every geodesic to its cell.
struct DensitySnapshot {
  double t = 0.0;
  Measure mu;
  std::vector<double> rho;
  std::vector<std::size_t> bin;
};

inline double cost_pp(double d, double p) { return p == 2.0 ? 0.5 * d * d : std::pow(d, p) / p; }

SolveResult solve_wp(const Space& space, const Measure& mu0, const Measure& mu1, double p,
                     const SolveOptions& opts = {});

// psi^c(x) = min_y d(x,y)^p/p - psi(y); entries of psi equal to +inf are ignored
// (they encode "not in the domain").
std::vector<double> c_transform(const Space& space, std::span<const double> psi, double p);

// Largest violation of phi(x) + phi_c(y) <= d^p/p over all pairs, and the
// largest |phi + phi_c - d^p/p| over the plan support.
struct PotentialCertificate {
  double feasibility = 0.0;
  double slackness = 0.0;
};
PotentialCertificate certify(const Space& space, const PotentialField& pot,
                             const TransportPlan& plan);

DynamicalPlan dynamical_plan(const Space& space, const TransportPlan& plan,
                             std::span<const double> grid);

// Position of geodesic g at grid index k as a space index (nearest point in the
// euclidean backend); the distance to that point is returned in `offset`.
std::size_t bin_of(const Space& space, const Geodesic& g, std::size_t k, double* offset = nullptr);

DensitySnapshot interpolate_density(const Space& space, const DynamicalPlan& nu, std::size_t k);
DensitySnapshot interpolate_density_at(const Space& space, const DynamicalPlan& nu, double t);

// max |phi(g_0) + phi^c(g_1) - d^p/p| over geodesics of nu.
double kantorovich_residual(const Space& space, const DynamicalPlan& nu,
                            const PotentialField& pot);

double plan_cost(const Space& space, const TransportPlan& plan);

}  // namespace cdv
