#include "cdv/needle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cdv/error.hpp"

namespace cdv {

namespace {

constexpr const char* kModule = "needle";

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

bool contains(const std::vector<std::size_t>& v, std::size_t x) {
  return std::binary_search(v.begin(), v.end(), x);
}

bool has_unrelated_pair(const TransportStructure& st, const std::vector<std::size_t>& set) {
  for (std::size_t a = 0; a < set.size(); ++a)
    for (std::size_t b = a + 1; b < set.size(); ++b)
      if (!st.related(set[a], set[b])) return true;
  return false;
}

}  // namespace

SignedDistanceField signed_distance(const Space& space, std::span<const double> f,
                                    double zero_tol) {
  const std::size_t n = space.size();
  if (f.size() != n) throw Error(kModule, "field size does not match the space");
  SignedDistanceField sd;
  sd.zero_tol = zero_tol;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(f[i]) <= zero_tol) sd.zero_set.push_back(i);
  if (sd.zero_set.empty()) throw Error(kModule, "empty zero set (no |f| <= zero_tol)");
  sd.values.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(f[i]) <= zero_tol) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t z : sd.zero_set) best = std::min(best, space.distance(i, z));
    sd.values[i] = f[i] > 0.0 ? best : -best;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool same = (sd.values[i] >= 0.0) == (sd.values[j] >= 0.0);
      if (!same) continue;
      sd.lipschitz_defect = std::max(
          sd.lipschitz_defect, std::abs(sd.values[i] - sd.values[j]) - space.distance(i, j));
    }
  return sd;
}

bool TransportStructure::related(std::size_t x, std::size_t y) const {
  return x == y || contains(gamma[x], y) || contains(gamma_inv[x], y);
}

TransportStructure build_transport_structure(const Space& space, std::span<const double> u,
                                             const StructureOptions& opts) {
  const std::size_t n = space.size();
  if (u.size() != n) throw Error(kModule, "field size does not match the space");
  TransportStructure st;
  st.u.assign(u.begin(), u.end());
  st.eps_rel = opts.eps_rel;
  st.eps_abs = opts.eps_abs >= 0.0 ? opts.eps_abs : 1e-9 * (1.0 + space.diameter());
  st.gamma.assign(n, {});
  st.gamma_inv.assign(n, {});
  double worst = 0.0;
  std::size_t wx = 0, wy = 0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      const double d = space.distance(x, y);
      const double du = u[x] - u[y];
      const double excess = du - d - (st.eps_abs + st.eps_rel * d);
      if (excess > worst) {
        worst = excess;
        wx = x;
        wy = y;
      }
      if (d > 0.0 && du >= d * (1.0 - st.eps_rel) - st.eps_abs) {
        st.gamma[x].push_back(y);
        st.gamma_inv[y].push_back(x);
      }
    }
  if (worst > 0.0) {
    std::ostringstream os;
    os << "u is not 1-Lipschitz: u(" << wx << ")-u(" << wy << ") exceeds d by " << worst;
    throw Error(kModule, os.str());
  }
  st.transport.assign(n, 0);
  st.a_plus.assign(n, 0);
  st.a_minus.assign(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    st.transport[x] = !st.gamma[x].empty() || !st.gamma_inv[x].empty();
    st.a_plus[x] = has_unrelated_pair(st, st.gamma[x]);
    st.a_minus[x] = has_unrelated_pair(st, st.gamma_inv[x]);
    if (st.transport[x]) {
      st.transport_mass += space.weight(x);
      if (st.a_plus[x] || st.a_minus[x]) st.branch_mass += space.weight(x);
    }
  }
  return st;
}

RayDecomposition extract_rays(const Space& space, const TransportStructure& st) {
  const std::size_t n = space.size();
  RayDecomposition rd;
  rd.ray_of.assign(n, kNoRay);
  UnionFind uf(n);
  for (std::size_t x = 0; x < n; ++x) {
    if (!st.nonbranched(x)) continue;
    for (std::size_t y : st.gamma[x])
      if (st.nonbranched(y)) uf.unite(x, y);
  }
  std::vector<std::vector<std::size_t>> comps(n);
  for (std::size_t x = 0; x < n; ++x)
    if (st.nonbranched(x)) comps[uf.find(x)].push_back(x);
  for (std::size_t root = 0; root < n; ++root) {
    auto& pts = comps[root];
    if (pts.size() < 2) {
      for (std::size_t x : pts) rd.remainder.push_back(x);
      continue;
    }
    std::sort(pts.begin(), pts.end(), [&](std::size_t a, std::size_t b) {
      return st.u[a] < st.u[b] || (st.u[a] == st.u[b] && a < b);
    });
    Ray ray;
    ray.points = pts;
    ray.arclength.push_back(0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (!contains(st.gamma[pts[i]], pts[i - 1])) {
        std::ostringstream os;
        os << "component of point " << root << " is not a transport ray: points " << pts[i - 1]
           << " and " << pts[i] << " are not ordered";
        throw Error(kModule, os.str());
      }
      const double d = space.distance(pts[i - 1], pts[i]);
      ray.isometry_defect =
          std::max(ray.isometry_defect, std::abs((st.u[pts[i]] - st.u[pts[i - 1]]) - d));
      ray.arclength.push_back(ray.arclength.back() + d);
    }
    const std::size_t m = pts.size();
    ray.cell_lo.resize(m);
    ray.cell_hi.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double left = i > 0 ? ray.arclength[i] - ray.arclength[i - 1]
                                : ray.arclength[1] - ray.arclength[0];
      const double right = i + 1 < m ? ray.arclength[i + 1] - ray.arclength[i] : left;
      ray.cell_lo[i] = ray.arclength[i] - 0.5 * left;
      ray.cell_hi[i] = ray.arclength[i] + 0.5 * right;
    }
    ray.lo = ray.cell_lo.front();
    ray.hi = ray.cell_hi.back();
    const double median = 0.5 * (st.u[pts[(m - 1) / 2]] + st.u[pts[m / 2]]);
    std::size_t label = pts[0];
    for (std::size_t x : pts)
      if (std::abs(st.u[x] - median) < std::abs(st.u[label] - median)) label = x;
    ray.label = label;
    for (std::size_t x : pts) rd.ray_of[x] = rd.rays.size();
    rd.rays.push_back(std::move(ray));
  }
  for (std::size_t x = 0; x < n; ++x)
    if (st.transport[x] && !st.nonbranched(x)) rd.remainder.push_back(x);
  std::sort(rd.remainder.begin(), rd.remainder.end());
  for (std::size_t x : rd.remainder) rd.remainder_mass += space.weight(x);
  return rd;
}

void disintegrate(const Space& space, RayDecomposition& rd, std::size_t bins) {
  if (bins == 0) throw Error(kModule, "need at least one bin");
  rd.bins = bins;
  for (Ray& ray : rd.rays) {
    ray.q = 0.0;
    for (std::size_t x : ray.points) ray.q += space.weight(x);
    ray.h.assign(bins, 0.0);
    const double bw = ray.bin_width();
    for (std::size_t i = 0; i < ray.points.size(); ++i) {
      const double a = ray.cell_lo[i], b = ray.cell_hi[i], m = space.weight(ray.points[i]);
      const auto first = std::size_t(std::clamp((a - ray.lo) / bw, 0.0, double(bins - 1)));
      for (std::size_t k = first; k < bins; ++k) {
        const double blo = ray.lo + double(k) * bw, bhi = k + 1 == bins ? ray.hi : blo + bw;
        if (blo >= b) break;
        const double overlap = std::min(b, bhi) - std::max(a, blo);
        if (overlap > 0.0) ray.h[k] += m * overlap / (b - a);
      }
    }
    if (ray.q > 0.0)
      for (double& v : ray.h) v /= ray.q * bw;
  }
}

std::size_t RayDecomposition::index_on_ray(std::size_t x) const {
  const std::size_t r = ray_of.at(x);
  if (r == kNoRay) throw Error(kModule, "point lies on no ray");
  const auto& pts = rays[r].points;
  return std::size_t(std::find(pts.begin(), pts.end(), x) - pts.begin());
}

double RayDecomposition::point_density(const Space& space, std::size_t x) const {
  const std::size_t i = index_on_ray(x);
  const Ray& ray = rays[ray_of[x]];
  if (!(ray.q > 0.0)) return 0.0;
  return space.weight(x) / (ray.q * (ray.cell_hi[i] - ray.cell_lo[i]));
}

double reconstruction_residual(const Space& space, const TransportStructure& st,
                               const RayDecomposition& rd) {
  double rebuilt = rd.remainder_mass;
  double pointwise = 0.0;
  for (const Ray& ray : rd.rays) {
    const double bw = ray.bin_width();
    for (double v : ray.h) rebuilt += ray.q * v * bw;
    for (std::size_t i = 0; i < ray.points.size(); ++i) {
      const std::size_t x = ray.points[i];
      const double w = ray.cell_hi[i] - ray.cell_lo[i];
      pointwise = std::max(pointwise,
                           std::abs(ray.q * rd.point_density(space, x) * w - space.weight(x)));
    }
  }
  return std::abs(st.transport_mass - rebuilt) + pointwise;
}

MonotonicityVerdict cyclical_monotonicity(const Space& space, const PairSet& pairs, double p,
                                          std::size_t max_size, std::size_t max_pairs,
                                          double tol) {
  if (pairs.x.size() != pairs.y.size()) throw Error(kModule, "pair set is ragged");
  MonotonicityVerdict v;
  const std::size_t n = std::min(pairs.x.size(), max_pairs);
  auto c = [&](std::size_t i, std::size_t j) {
    return std::pow(space.distance(pairs.x[i], pairs.y[j]), p);
  };
  v.worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 2; k <= std::min(max_size, n); ++k) {
    std::vector<unsigned char> pick(n, 0);
    std::fill(pick.begin(), pick.begin() + std::ptrdiff_t(k), 1);
    do {
      std::vector<std::size_t> subset;
      for (std::size_t i = 0; i < n; ++i)
        if (pick[i]) subset.push_back(i);
      // Fix the first element; every cycle through the subset appears once.
      do {
        double base = 0.0, shifted = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
          base += c(subset[i], subset[i]);
          shifted += c(subset[i], subset[(i + 1) % k]);
        }
        ++v.cycles;
        if (shifted - base < v.worst) {
          v.worst = shifted - base;
          v.witness = subset;
        }
      } while (std::next_permutation(subset.begin() + 1, subset.end()));
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  if (v.cycles == 0) v.worst = 0.0;
  v.monotone = v.worst >= -tol;
  return v;
}

MonotonicityVerdict check_dp_monotone(const Space& space, const TransportStructure& st,
                                      double delta, std::span<const std::size_t> C, double p,
                                      double level_tol) {
  std::vector<std::size_t> level;
  for (std::size_t y = 0; y < space.size(); ++y)
    if (std::abs(st.u[y] - delta) <= level_tol) level.push_back(y);
  if (level.empty()) throw Error(kModule, "level set {u = delta} is empty");
  PairSet pairs;
  for (std::size_t x : C)
    for (std::size_t y : level)
      if (x == y || contains(st.gamma[x], y)) {
        pairs.x.push_back(x);
        pairs.y.push_back(y);
      }
  return cyclical_monotonicity(space, pairs, p);
}

}  // namespace cdv
