#pragma once

#include <span>
#include <string>
#include <vector>

namespace cdv::oracle {

// Radial transport from the shell 1 <= |x| <= 2 to 3 <= |x| <= 4 in R^n, both with
// Lebesgue density 1/(omega_n |x|^{n-1}), cost |x-y|^q/q. Every geodesic has length 2.
struct Radial {
  int n = 2;
  double q = 2.0;

  double omega() const;                       // area of the unit sphere S^{n-1}
  double phi(double r) const;                 // -2^{q-1} r
  double phi_t(double r, double t) const;     // interpolated potential
  double phi_c(double r) const;               // conjugate on the target side, r >= 2
  double transport_cost() const;              // W_q^q = 2^q
  double T(double r) const { return r + 2.0; }
  double T_t(double r, double t) const { return r + 2.0 * t; }
  double rho_t(double r0, double t) const;    // Lebesgue density at gamma_t, |gamma_0| = r0
  double density(double r, double t) const;   // Lebesgue density of mu_t at radius r (0 off support)
  double Phi(double r, double s, double t) const;
  double dPhi() const;                        // d/dt Phi_s^t = 2^q
  double level(double ell, double s) const;   // a with phi_s(gamma_s) = a, |gamma_0| = 1 + ell
  double h(double ell, double s, double t) const;
  double ratio(double ell, double s, double t) const;  // rho_t(gamma_t)/rho_s(gamma_s)
  double z(double ell, double t) const;       // d/dtau log ell_tau(gamma_t) = 0
};

// Quantity ids: phi, phi_t, phi_c, cost, T, T_t, rho_t, density, Phi, dPhi, level, h,
// ratio, z. Throws on unknown ids, wrong argument counts or out-of-domain arguments.
double radial_eval(const Radial& o, const std::string& quantity, std::span<const double> args);
std::vector<std::string> radial_quantities();

// Uniform block [a0,b0] moved onto [a1,b1]; the optimal map is affine for every p > 1.
struct Block {
  double a0 = 0.0, b0 = 1.0, a1 = 0.0, b1 = 1.0;
};
struct LineInterpolant {
  double lo = 0.0, hi = 0.0;
  double density = 0.0;  // Lebesgue density of mu_t on [lo, hi]
};
LineInterpolant line_transport(const Block& b, double t);
double line_map(const Block& b, double x, double t);  // position at time t of the particle from x

// Exhaustive minimum of sum_i c[i][sigma(i)] over permutations (n <= 8).
double brute_force_assignment(const std::vector<std::vector<double>>& cost);
// Cost of the sorted pairing of equal-mass atoms on the line: mean |x_(i) - y_(i)|^p.
double monotone_rearrangement_cost(std::vector<double> xs, std::vector<double> ys, double p);

}  // namespace cdv::oracle
