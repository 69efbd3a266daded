#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "cdv/mms.hpp"

namespace cdv {

inline constexpr std::size_t kNoRay = std::numeric_limits<std::size_t>::max();

struct SignedDistanceField {
  std::vector<double> values;
  std::vector<std::size_t> zero_set;
  double zero_tol = 0.0;
  double lipschitz_defect = 0.0;  // worst |d_f(x)-d_f(y)| - d(x,y) within a sign region
};

// d_f(x) = dist(x, {|f| <= zero_tol}) * sgn(f).
SignedDistanceField signed_distance(const Space& space, std::span<const double> f,
                                    double zero_tol);

struct StructureOptions {
  double eps_rel = 1e-6;
  double eps_abs = -1.0;  // negative: 1e-9 * (1 + diameter)
};

// L1 transport structure of a 1-Lipschitz u: (x,y) in Gamma iff u(x)-u(y) = d(x,y)
// within tolerance. gamma[x] lists y != x with (x,y) in Gamma, gamma_inv[y] the x.
struct TransportStructure {
  std::vector<double> u;
  double eps_rel = 0.0, eps_abs = 0.0;
  std::vector<std::vector<std::size_t>> gamma, gamma_inv;
  std::vector<unsigned char> transport, a_plus, a_minus;
  double transport_mass = 0.0;
  double branch_mass = 0.0;  // m((A+ u A-) n T)

  bool related(std::size_t x, std::size_t y) const;  // (x,y) in R = Gamma u Gamma^-1
  bool nonbranched(std::size_t x) const { return transport[x] && !a_plus[x] && !a_minus[x]; }
};

TransportStructure build_transport_structure(const Space& space, std::span<const double> u,
                                             const StructureOptions& opts = {});

struct Ray {
  std::vector<std::size_t> points;     // ordered by increasing u
  std::vector<double> arclength;       // from the first point
  std::vector<double> cell_lo, cell_hi;  // cell of every point along the ray
  double lo = 0.0, hi = 0.0;           // ray extent (cells extended by half a gap)
  std::size_t label = 0;               // point closest to the u-median
  double q = 0.0;                      // quotient weight: ray mass
  std::vector<double> h;               // binned density, integrates to 1 over [lo, hi]
  double isometry_defect = 0.0;

  double length() const { return hi - lo; }
  double bin_width() const { return h.empty() ? 0.0 : (hi - lo) / double(h.size()); }
};

struct RayDecomposition {
  std::vector<Ray> rays;
  std::vector<std::size_t> ray_of;     // per point, kNoRay if not on a ray
  std::vector<std::size_t> remainder;  // transport points routed to no ray (branch points)
  double remainder_mass = 0.0;
  std::size_t bins = 32;

  // m(x) / (q(alpha) * cell width): the point value of h on its ray.
  double point_density(const Space& space, std::size_t x) const;
  std::size_t index_on_ray(std::size_t x) const;
};

// Rays are the R-components of the non-branched transport set; each must be a
// Gamma-chain. Throws when a component is not totally ordered.
RayDecomposition extract_rays(const Space& space, const TransportStructure& st);
// Assigns masses, quotient weights and the binned profiles h_alpha.
void disintegrate(const Space& space, RayDecomposition& rd, std::size_t bins = 32);

// |m(T^b) - sum_alpha q(alpha) int h_alpha| + max_x |q h(x) w_x - m(x)|.
double reconstruction_residual(const Space& space, const TransportStructure& st,
                               const RayDecomposition& rd);

struct PairSet {
  std::vector<std::size_t> x, y;
};
struct MonotonicityVerdict {
  bool monotone = true;
  double worst = 0.0;  // min over cycles of sum_shifted - sum_identity
  std::vector<std::size_t> witness;  // indices into the pair set, cycle order
  std::size_t cycles = 0;
};
// Enumerates every ordering of every subset of at most `max_size` pairs (pairs beyond
// `max_pairs` are ignored, deterministic prefix).
MonotonicityVerdict cyclical_monotonicity(const Space& space, const PairSet& pairs, double p,
                                          std::size_t max_size = 5, std::size_t max_pairs = 8,
                                          double tol = 1e-10);
// Delta = (C x {u = delta}) n Gamma.
MonotonicityVerdict check_dp_monotone(const Space& space, const TransportStructure& st,
                                      double delta, std::span<const std::size_t> C, double p,
                                      double level_tol = 1e-9);

}  // namespace cdv
