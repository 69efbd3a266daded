#include "cdv/cdcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cdv/distortion.hpp"
#include "cdv/error.hpp"

namespace cdv {

namespace {

constexpr const char* kModule = "cdcheck";
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string describe(const char* what, std::size_t a, std::size_t b) {
  std::ostringstream os;
  os << what << " " << a << "->" << b;
  return os.str();
}

}  // namespace

EntropyValue renyi_entropy(const Space& space, const Measure& mu, double N) {
  if (!(N >= 1.0)) throw Error(kModule, "Renyi entropy needs N >= 1");
  if (mu.size() != space.size()) throw Error(kModule, "measure size does not match the space");
  EntropyValue e;
  e.N = N;
  const double ex = 1.0 - 1.0 / N;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double m = space.weight(i);
    if (m > 0.0 && mu.weights[i] > 0.0) e.value += std::pow(mu.weights[i] / m, ex) * m;
  }
  return e;
}

void CDReport::add(CDRow row) {
  if (row.margin < worst || (std::isnan(row.margin) && !std::isnan(worst))) {
    worst = row.margin;
    worst_t = row.t;
    witness = row.witness;
  }
  rows.push_back(std::move(row));
}

void CDReport::finish() {
  if (rows.empty()) worst = 0.0;
  pass = worst >= -tol;
}

std::string CDReport::verdict() const {
  if (pass) return "PASS";
  return inconclusive ? "plan-FAIL (inconclusive)" : "FAIL";
}

double cd_tolerance(double dx, double dt, double C) { return C * (dx + dt); }

std::vector<double> nprime_ladder(double N) { return {N, N + 1.0, 2.0 * N, 10.0 * N}; }

CDReport check_cdp(const Space& space, const DynamicalPlan& nu, double K, double N,
                   std::span<const double> nprimes, double tol, bool degenerate) {
  if (!(N >= 1.0)) throw Error(kModule, "CD needs N >= 1");
  CDReport r;
  r.condition = "CD_p";
  r.tol = tol;
  const std::size_t last = nu.grid.size() - 1;
  if (nu.grid.front() != 0.0 || nu.grid.back() != 1.0)
    throw Error(kModule, "time grid must start at 0 and end at 1");
  const auto s0 = interpolate_density(space, nu, 0);
  const auto s1 = interpolate_density(space, nu, last);
  for (std::size_t g = 0; g < nu.size(); ++g)
    if (!(space.weight(s0.bin[g]) > 0.0) || !(space.weight(s1.bin[g]) > 0.0))
      throw Error(kModule, "endpoint measures must be absolutely continuous");
  for (double Np : nprimes) {
    if (Np < N) throw Error(kModule, "N' must be at least N");
    for (std::size_t k = 0; k <= last; ++k) {
      const double t = nu.grid[k];
      const auto snap = interpolate_density(space, nu, k);
      const double lhs = renyi_entropy(space, snap.mu, Np).value;
      double rhs = 0.0;
      std::string infinite;
      for (std::size_t g = 0; g < nu.size(); ++g) {
        const double d = nu.geodesics[g].length;
        const auto a = tau({K, Np, 1.0 - t, d});
        const auto b = tau({K, Np, t, d});
        const double r0 = s0.rho[s0.bin[g]], r1 = s1.rho[s1.bin[g]];
        const double w0 = std::pow(r0, -1.0 / Np), w1 = std::pow(r1, -1.0 / Np);
        if ((a.is_infinite() && w0 > 0.0 && t < 1.0) || (b.is_infinite() && w1 > 0.0 && t > 0.0)) {
          if (infinite.empty()) infinite = describe("infinite tau on geodesic", nu.source[g], nu.target[g]);
          continue;
        }
        if (t < 1.0) rhs += nu.weights[g] * a.value() * w0;
        if (t > 0.0) rhs += nu.weights[g] * b.value() * w1;
      }
      CDRow row;
      row.t = t;
      row.Nprime = Np;
      if (!infinite.empty()) {
        row.margin = -kInf;
        row.witness = infinite;
      } else {
        row.margin = lhs - rhs;
        std::ostringstream os;
        os << "t=" << t;
        row.witness = os.str();
      }
      r.add(std::move(row));
    }
  }
  r.finish();
  r.inconclusive = !r.pass && degenerate;
  return r;
}

CDReport check_mcp(const Space& space, std::span<const std::size_t> A, std::size_t o, double K,
                   double N, std::span<const double> t_grid, const McpOptions& opts) {
  if (!space.is_euclidean()) throw Error(kModule, "MCP check needs a euclidean space");
  if (o >= space.size()) throw Error(kModule, "contraction point out of range");
  double mA = 0.0, reach = 0.0;
  for (std::size_t x : A) {
    mA += space.weight(x);
    reach = std::max(reach, space.distance(x, o));
  }
  if (!(mA > 0.0)) throw Error(kModule, "m(A) must be positive");
  if (K > 0.0) {
    const auto D = diameter_bound(K, N - 1.0);
    if (N > 1.0 && D.is_finite() && reach >= D.value())
      throw Error(kModule, "A reaches beyond the diameter bound for K > 0");
  }
  const double radius = opts.ball_radius > 0.0 ? opts.ball_radius : 3.0 * space.spacing();
  CDReport r;
  r.condition = "MCP";
  r.tol = opts.rel_tol;
  const std::size_t n = space.size();
  for (double t : t_grid) {
    if (!(t >= 0.0 && t < 1.0)) throw Error(kModule, "MCP times must lie in [0,1)");
    std::vector<double> pushed(n, 0.0);
    for (std::size_t x : A) {
      const auto c = tau({K, N, 1.0 - t, space.distance(x, o)});
      if (c.is_infinite()) throw Error(kModule, "infinite tau inside the admissible ball");
      const auto pt = segment_point(space.coords(x), space.coords(o), t);
      pushed[space.nearest(pt)] += space.weight(x) / mA * std::pow(c.value(), N);
    }
    double worst_density = 0.0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pushed[i] == 0.0) continue;
      double mass = 0.0, ref = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (space.distance(i, j) <= radius) {
          mass += pushed[j];
          ref += space.weight(j);
        }
      if (ref > 0.0 && mass / ref > worst_density) {
        worst_density = mass / ref;
        at = i;
      }
    }
    CDRow row;
    row.t = t;
    row.Nprime = N;
    row.margin = 1.0 - mA * worst_density;
    std::ostringstream os;
    os << "point " << at;
    row.witness = os.str();
    r.add(std::move(row));
  }
  r.finish();
  return r;
}

CDReport check_density_1d(const DensityProfile1D& pr, double tol) {
  const std::size_t n = pr.grid.size();
  if (pr.h.size() != n) throw Error(kModule, "profile grid and values differ in length");
  if (!(pr.N >= 1.0)) throw Error(kModule, "density check needs N >= 1");
  for (double v : pr.h)
    if (!(v >= 0.0)) throw Error(kModule, "density profile must be nonnegative");
  for (std::size_t i = 1; i < n; ++i)
    if (!(pr.grid[i] > pr.grid[i - 1])) throw Error(kModule, "profile grid must increase");
  CDReport r;
  r.condition = "CD_1d";
  r.tol = tol;
  if (pr.N == 1.0) {
    // Only constant densities (and no positive curvature) qualify.
    double lo = kInf, hi = -kInf;
    for (double v : pr.h) lo = std::min(lo, v), hi = std::max(hi, v);
    CDRow row;
    row.Nprime = 1.0;
    row.margin = pr.K0 > 0.0 && n > 1 ? -kInf : lo - hi;
    row.witness = "constancy";
    r.add(std::move(row));
    r.finish();
    return r;
  }
  const double e = 1.0 / (pr.N - 1.0);
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = std::pow(pr.h[i], e);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    CDRow row;
    row.t = pr.grid[k];
    row.Nprime = pr.N;
    row.margin = kInf;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        const double theta = pr.grid[j] - pr.grid[i];
        const double s = (pr.grid[k] - pr.grid[i]) / theta;
        const auto a = sigma({pr.K0, pr.N - 1.0, 1.0 - s, theta});
        const auto b = sigma({pr.K0, pr.N - 1.0, s, theta});
        double m;
        if (a.is_infinite() || b.is_infinite())
          m = -kInf;
        else
          m = f[k] - (a.value() * f[i] + b.value() * f[j]);
        if (m < row.margin) {
          row.margin = m;
          std::ostringstream os;
          os << "x0=" << pr.grid[i] << " x1=" << pr.grid[j];
          row.witness = os.str();
        }
      }
    r.add(std::move(row));
  }
  r.finish();
  return r;
}

CDReport check_kn_convexity(const DensityProfile1D& pr, double tol) {
  const std::size_t n = pr.grid.size();
  if (pr.h.size() != n || n < 3) throw Error(kModule, "profile needs at least three samples");
  if (!(pr.N > 1.0)) throw Error(kModule, "log form needs N > 1");
  CDReport r;
  r.condition = "KN_convexity";
  r.tol = tol;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(pr.h[i] > 0.0)) {
      std::ostringstream os;
      os << "density vanishes at x=" << pr.grid[i];
      throw Error(kModule, os.str());
    }
    g[i] = -std::log(pr.h[i]);
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double h0 = pr.grid[k] - pr.grid[k - 1], h1 = pr.grid[k + 1] - pr.grid[k];
    const double d1 = (-h1 / (h0 * (h0 + h1))) * g[k - 1] + ((h1 - h0) / (h0 * h1)) * g[k] +
                      (h0 / (h1 * (h0 + h1))) * g[k + 1];
    const double d2 = 2.0 * (g[k - 1] / (h0 * (h0 + h1)) - g[k] / (h0 * h1) +
                             g[k + 1] / (h1 * (h0 + h1)));
    CDRow row;
    row.t = pr.grid[k];
    row.Nprime = pr.N;
    row.margin = d2 - d1 * d1 / (pr.N - 1.0) - pr.K0;
    r.add(std::move(row));
  }
  r.finish();
  return r;
}

CDReport check_density_ratio_bounds(const Space& space, const DynamicalPlan& nu,
                                    const std::vector<DensitySnapshot>& snaps, double K,
                                    double N, double tol) {
  (void)space;
  if (snaps.size() != nu.grid.size()) throw Error(kModule, "one snapshot per grid time required");
  CDReport r;
  r.condition = "density_ratio";
  r.tol = tol;
  for (std::size_t g = 0; g < nu.size(); ++g) {
    const double ell = nu.geodesics[g].length;
    CDRow row;
    row.margin = kInf;
    row.Nprime = N;
    for (std::size_t a = 0; a < snaps.size(); ++a) {
      const double s = nu.grid[a];
      const double rs = snaps[a].rho[snaps[a].bin[g]];
      if (s >= 1.0 || !(rs > 0.0)) continue;
      for (std::size_t b = a + 1; b < snaps.size(); ++b) {
        const double t = nu.grid[b];
        if (t >= 1.0) continue;
        const double rt = snaps[b].rho[snaps[b].bin[g]];
        if (!(rt > 0.0)) continue;
        const double ratio = rt / rs;
        const auto lo = tau({K, N, s / t, t * ell});
        const auto hi = tau({K, N, (1.0 - t) / (1.0 - s), (1.0 - s) * ell});
        double m = kInf;
        if (lo.is_infinite()) m = -kInf;
        else m = std::min(m, 1.0 - std::pow(lo.value(), N) / ratio);
        if (hi.is_finite()) m = std::min(m, std::pow(hi.value(), -N) / ratio - 1.0);
        if (m < row.margin) {
          row.margin = m;
          row.t = t;
          std::ostringstream os;
          os << "geodesic " << g << " s=" << s << " t=" << t;
          row.witness = os.str();
        }
      }
    }
    if (row.margin < kInf) r.add(std::move(row));
  }
  r.finish();
  return r;
}

}  // namespace cdv
