#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cdv/mms.hpp"
#include "cdv/transport.hpp"

namespace cdv {

struct HopfLaxEvaluation {
  double value = 0.0;
  std::vector<std::size_t> argmins;
  double d_plus = 0.0;
  double d_minus = 0.0;
};

// Q_t f(x) = min_y d(x,y)^p/(p t^{p-1}) + f(y) on a finite space. Caches the
// kernel d^p/p for spaces up to `cache_limit` points.
class HopfLax {
 public:
  HopfLax(const Space& space, double p, std::size_t cache_limit = 6000);

  const Space& space() const { return *space_; }
  double p() const { return p_; }

  HopfLaxEvaluation at_point(std::size_t i, std::span<const double> f, double t) const;
  HopfLaxEvaluation at_coords(std::span<const double> x, std::span<const double> f, double t) const;
  std::vector<HopfLaxEvaluation> evaluate(std::span<const double> f, double t) const;
  double value_at(std::size_t i, std::span<const double> f, double t) const;
  std::vector<double> values(std::span<const double> f, double t) const;

 private:
  double kernel(std::size_t i, std::size_t j) const;
  HopfLaxEvaluation finish(double best, std::span<const double> f, double scale,
                           const auto& cost_of, const auto& dist_of) const;

  const Space* space_;
  double p_;
  std::vector<double> cost_;
};

// Argmin sets collect every y within this relative distance of the minimum.
inline constexpr double kArgminTol = 1e-12;

std::vector<HopfLaxEvaluation> hopflax(const Space& space, std::span<const double> f, double t,
                                       double p);
// t < 0: Q_t f = -Q_{-t}(-f); D^± are those of the forward problem.
std::vector<HopfLaxEvaluation> hopflax_negative(const Space& space, std::span<const double> f,
                                                double t, double p);
double semigroup_check(const Space& space, std::span<const double> f, double s, double t,
                       double p);

struct TimeDerivative {
  double left = 0.0, right = 0.0;
  double predicted_left = 0.0, predicted_right = 0.0;
};
// Three-point one-sided differences with step h (requires t - 2h > 0).
TimeDerivative time_derivative_check(const HopfLax& hl, std::span<const double> f, std::size_t x,
                                     double t, double h);

// d(x,z)^p/t^{p-1} + d(z,y)^p/(1-t)^{p-1} - d(x,y)^p, nonnegative by Hoelder.
double holder_slack(double dxy, double dxz, double dzy, double t, double p);

// Midpoint certification: if the two one-sided potentials agree at x the
// distances must split in ratio t : 1-t.
struct IntermediateCheck {
  bool condition = false;  // the potential identity holds within tol
  double defect_yz = 0.0;  // |d(y,z) - d(x,y)/t|
  double defect_xz = 0.0;  // |d(y,z) - d(x,z)/(1-t)|
};
IntermediateCheck intermediate_point_check(const Space& space, const PotentialField& pot,
                                           std::size_t x, std::size_t y, std::size_t z, double t,
                                           double tol);

// phi_t = -Q_t(-phi), phibar_t = Q_{1-t}(-phi^c) on a time grid. D^± are the
// distance-progressed quantities of -phi at time t and of -phi^c at 1-t.
struct PotentialFamily {
  double p = 2.0;
  std::vector<double> times;
  std::vector<std::vector<double>> phi, phibar;
  std::vector<std::vector<double>> d_plus, d_minus, dbar_plus, dbar_minus;

  std::size_t index_of(double t) const;  // throws when t is not on the grid
};

// Replaces phi by (phi^c)^c so the pair is c-concave on the finite space.
PotentialField c_concave_pair(const Space& space, std::span<const double> phi, double p);

PotentialFamily interpolating_potentials(const HopfLax& hl, const PotentialField& pot,
                                         std::span<const double> grid);

// phi_t(gamma_t) at an arbitrary geodesic sample (coordinates or point id).
double phi_t_on_geodesic(const HopfLax& hl, const PotentialField& pot, const Geodesic& g,
                         std::size_t k);

struct AffinityReport {
  double along = 0.0;      // phi_t(g_t) - ((1-t) d^p/p - phi^c(g_1))
  double increments = 0.0; // phi_s(g_s) - phi_r(g_r) - (r-s) d^p/p
  std::size_t samples = 0;
};
AffinityReport affinity_check(const HopfLax& hl, const DynamicalPlan& nu,
                              const PotentialField& pot);

struct SpeedProfile {
  std::vector<double> times;
  std::vector<std::vector<double>> ell_plus, ell_minus, ellbar_plus, ellbar_minus;
  std::vector<std::vector<unsigned char>> well_defined, well_defined_bar;
  double tol = 0.0;

  double ell(std::size_t k, std::size_t x) const { return ell_plus[k][x]; }
  double ellbar(std::size_t k, std::size_t x) const { return ellbar_plus[k][x]; }
};

SpeedProfile speeds(const PotentialFamily& fam, double tol);

struct SpeedBoundsReport {
  double monotone_forward = 0.0;   // min over increments of t*ell_t (should be >= 0)
  double monotone_backward = 0.0;  // min over decrements of (1-t)*ellbar_t
  double under = 0.0;              // min FD d(ell^p/p) + ell^p/t
  double over = 0.0;               // min ellbar^p/(1-t) - FD d(ellbar^p/p)
  std::size_t samples = 0;
};
SpeedBoundsReport speed_bounds(const SpeedProfile& sp, double p);

// Both (x,t) samples lie on transported points: phibar - phi <= tol_g and
// both speeds are well defined there.
bool transported(const PotentialFamily& fam, const SpeedProfile& sp, std::size_t k,
                 std::size_t x, double tol_g);

struct SandwichReport {
  double worst = 0.0;  // min over pairs of both sandwich margins
  std::size_t pairs = 0;
  double worst_t = 0.0, worst_s = 0.0;
};
// (1-s)/(1-t) <= ell_t(x)/ell_s(x) <= s/t for t <= s, both in the transported set.
SandwichReport speed_sandwich(const PotentialFamily& fam, const SpeedProfile& sp, std::size_t x,
                              double tol_g);

struct PropagatedPotential {
  double s = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> Phi, Phibar;  // NaN where the speed is undefined
  std::vector<std::vector<double>> dPhi;         // Richardson centred, else three-point; NaN if skipped
  std::size_t evaluated = 0, skipped = 0;
};
PropagatedPotential propagate_potential(const PotentialFamily& fam, const SpeedProfile& sp,
                                        double s, double fd_tol);

struct PropagationBounds {
  double forward_lower = 0.0;  // t >= s: FD Phi - (s/t) ell^p
  double forward_upper = 0.0;  // t <= s: (s/t) ell^p - FD Phi
  double backward_upper = 0.0; // t >= s: ((1-s)/(1-t)) ellbar^p - FD Phibar
  double backward_lower = 0.0; // t <= s: FD Phibar - ((1-s)/(1-t)) ellbar^p
  std::size_t samples = 0;
};
PropagationBounds propagation_bounds(const PropagatedPotential& P, const SpeedProfile& sp,
                                     double p);

struct SecondOrderSample {
  double t = 0.0;
  double q_minus = 0.0, q_plus = 0.0, r_minus = 0.0, r_plus = 0.0;
  double z = 0.0;  // NaN unless q_- and q_+ agree
};
// Peano quotients of tau -> phi_tau(x) at tau = s over eps in +-{h, h/2, h/4, h/8}.
SecondOrderSample second_order_diagnostics(const HopfLax& hl, const PotentialField& pot,
                                           std::size_t x, double s, double h, double tol);

struct ThirdOrderReport {
  std::vector<double> t, margin_geomean, margin_ode;  // per sample (min over s < t)
  double worst_geomean = 0.0;
  double worst_ode = 0.0;
  double worst_s = 0.0, worst_t = 0.0;
  std::size_t pairs = 0;
};
// z in the normalisation z = d/dtau ((p-1) ell_tau^p / p). Requires a uniform grid
// for the ODE part (Richardson-extrapolated centred differences).
ThirdOrderReport third_order_check(std::span<const double> t, std::span<const double> z,
                                   double p, double ell);

}  // namespace cdv
