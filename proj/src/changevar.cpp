#include "cdv/changevar.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cdv/distortion.hpp"
#include "cdv/error.hpp"

namespace cdv {

namespace {

constexpr const char* kModule = "changevar";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double parabola_slope(double t0, double f0, double t1, double f1, double t2, double f2,
                      double at) {
  return f0 * ((at - t1) + (at - t2)) / ((t0 - t1) * (t0 - t2)) +
         f1 * ((at - t0) + (at - t2)) / ((t1 - t0) * (t1 - t2)) +
         f2 * ((at - t0) + (at - t1)) / ((t2 - t0) * (t2 - t1));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

GeodesicLedger build_ledger(const Space& space, const DynamicalPlan& nu,
                            const std::vector<DensitySnapshot>& snaps, const SpeedProfile& sp,
                            const LedgerFilters& filters) {
  (void)space;
  if (snaps.size() != nu.grid.size() || sp.times.size() != nu.grid.size())
    throw Error(kModule, "snapshots and speeds must live on the plan's time grid");
  GeodesicLedger L;
  for (std::size_t g = 0; g < nu.size(); ++g) {
    LedgerEntry e;
    e.geodesic = g;
    e.length = nu.geodesics[g].length;
    e.weight = nu.weights[g];
    e.t = nu.grid;
    bool positive = true;
    std::size_t interior = 0, defined = 0;
    for (std::size_t k = 0; k < nu.grid.size(); ++k) {
      const std::size_t b = snaps[k].bin[g];
      e.bins.push_back(b);
      e.rho.push_back(snaps[k].rho[b]);
      positive = positive && snaps[k].rho[b] > 0.0;
      const double t = nu.grid[k];
      if (t > 0.0 && t < 1.0) {
        ++interior;
        if (sp.well_defined[k][b]) {
          ++defined;
          e.speed.push_back(sp.ell_plus[k][b]);
        } else {
          e.speed.push_back(kNaN);
        }
      } else {
        e.speed.push_back(kNaN);
      }
    }
    if (e.length < filters.min_length) {
      for (std::size_t k = 0; k < e.rho.size(); ++k)
        if (e.rho[0] > 0.0)
          L.zero_length_defect = std::max(L.zero_length_defect, std::abs(e.rho[k] / e.rho[0] - 1.0));
      L.zero_length.push_back(std::move(e));
      continue;
    }
    const bool length_ok = e.length <= filters.max_length;
    const bool speed_ok = interior == 0 || double(defined) >= filters.speed_fraction * double(interior);
    if (!length_ok) ++L.excluded_length;
    else if (!positive) ++L.excluded_density;
    else if (!speed_ok) ++L.excluded_speed;
    if (!length_ok || !positive || !speed_ok) {
      L.excluded_mass += e.weight;
      continue;
    }
    L.entries.push_back(std::move(e));
  }
  if (L.entries.empty() && L.zero_length.empty())
    throw Error(kModule, "every geodesic was excluded from the ledger");
  return L;
}

LevelNeedle needle_for_level(const Space& space, const PotentialFamily& fam, std::size_t ks,
                             double a, double zero_tol, std::size_t bins) {
  LevelNeedle n;
  n.s = fam.times.at(ks);
  n.a = a;
  std::vector<double> f(fam.phi[ks]);
  for (double& v : f) v -= a;
  n.u = signed_distance(space, f, zero_tol);
  n.structure = build_transport_structure(space, n.u.values);
  n.rays = extract_rays(space, n.structure);
  disintegrate(space, n.rays, bins);
  return n;
}

std::vector<double> needle_profile(const Space& space, const RayDecomposition& rd,
                                   const LedgerEntry& e, std::size_t ks) {
  std::vector<double> h(e.t.size(), kNaN);
  const std::size_t xs = e.bins.at(ks);
  const std::size_t ray = rd.ray_of[xs];
  if (ray == kNoRay) return h;
  const double base = rd.point_density(space, xs);
  if (!(base > 0.0)) return h;
  for (std::size_t k = 0; k < e.t.size(); ++k)
    if (rd.ray_of[e.bins[k]] == ray) h[k] = rd.point_density(space, e.bins[k]) / base;
  return h;
}

void ChangeOfVariablesReport::merge(const ChangeOfVariablesReport& o) {
  samples.insert(samples.end(), o.samples.begin(), o.samples.end());
  max_residual = std::max(max_residual, o.max_residual);
  evaluated += o.evaluated;
  skipped += o.skipped;
}

ChangeOfVariablesReport change_of_variables_residual(const LedgerEntry& e, std::size_t ks,
                                                     std::span<const double> h,
                                                     const PropagatedPotential& P, double p) {
  ChangeOfVariablesReport r;
  const double ell = e.speed.at(ks);
  for (std::size_t k = 0; k < e.t.size(); ++k) {
    const double t = e.t[k];
    if (k == ks || !(t > 0.0 && t < 1.0)) continue;
    ++r.evaluated;
    const double dphi = P.dPhi[k][e.bins[k]];
    if (!std::isfinite(dphi) || !std::isfinite(h[k]) || !(h[k] > 0.0) || !std::isfinite(ell) ||
        !(e.rho[ks] > 0.0)) {
      ++r.skipped;
      continue;
    }
    ChangeOfVariablesSample smp;
    smp.geodesic = e.geodesic;
    smp.s = e.t[ks];
    smp.t = t;
    smp.lhs = e.rho[k] / e.rho[ks];
    smp.rhs = dphi / (std::pow(ell, p) * h[k]);
    smp.residual = std::abs(smp.lhs - smp.rhs) / std::abs(smp.rhs);
    r.max_residual = std::max(r.max_residual, smp.residual);
    r.samples.push_back(smp);
  }
  return r;
}

std::vector<double> z_for_s(const LedgerEntry& e, std::size_t ks, std::span<const double> h) {
  std::vector<double> z(e.t.size(), kNaN);
  for (std::size_t k = 0; k < e.t.size(); ++k) {
    const double t = e.t[k];
    if (k == ks || !(t > 0.0 && t < 1.0) || !std::isfinite(h[k])) continue;
    z[k] = ((e.rho[k] / e.rho[ks]) * h[k] - 1.0) / (t - e.t[ks]);
  }
  return z;
}

ZEstimate extract_z(const std::map<std::size_t, std::vector<double>>& per_s, double tol) {
  if (per_s.size() < 2) throw Error(kModule, "z extraction needs at least two values of s");
  const std::size_t n = per_s.begin()->second.size();
  ZEstimate out;
  out.z.assign(n, kNaN);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> vals;
    for (const auto& [ks, z] : per_s)
      if (std::isfinite(z.at(k))) vals.push_back(z[k]);
    if (vals.empty()) continue;
    const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
    out.spread = std::max(out.spread, *hi - *lo);
    out.z[k] = median(std::move(vals));
  }
  if (out.spread > 10.0 * tol) {
    std::ostringstream os;
    os << "z estimates disagree across s by " << out.spread << " (limit " << 10.0 * tol << ")";
    throw Error(kModule, os.str());
  }
  return out;
}

LYFactorization ly_factorize(std::span<const double> t, std::span<const double> rho,
                             std::span<const double> z, double K, double N, double ell,
                             double r0, double y_tol) {
  if (t.size() != rho.size() || t.size() != z.size())
    throw Error(kModule, "factorisation inputs differ in length");
  LYFactorization f;
  f.K0 = K * ell * ell;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] > 0.0 && t[k] < 1.0)) continue;
    if (!std::isfinite(z[k])) throw Error(kModule, "z is undefined at an interior time");
    if (!(rho[k] > 0.0)) throw Error(kModule, "density must be positive at interior times");
    f.t.push_back(t[k]);
    f.rho.push_back(rho[k]);
  }
  const std::size_t n = f.t.size();
  if (n < 3) throw Error(kModule, "need at least three interior samples");
  std::vector<double> zi;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] > 0.0 && t[k] < 1.0) zi.push_back(z[k]);
  // Anchor at the sample closest to r0.
  std::size_t k0 = 0;
  for (std::size_t k = 1; k < n; ++k)
    if (std::abs(f.t[k] - r0) < std::abs(f.t[k0] - r0)) k0 = k;
  f.r0 = f.t[k0];
  // Trapezoid with the Euler-Maclaurin end correction -h^2/12 (z'(b) - z'(a)), z'
  // from three-point parabolas: fourth order on smooth z.
  std::vector<double> dz(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = k == 0 ? 0 : (k + 1 == n ? n - 3 : k - 1);
    dz[k] = parabola_slope(f.t[a], zi[a], f.t[a + 1], zi[a + 1], f.t[a + 2], zi[a + 2], f.t[k]);
  }
  auto step = [&](std::size_t k) {  // integral of z over [t_k, t_{k+1}]
    const double h = f.t[k + 1] - f.t[k];
    return 0.5 * h * (zi[k] + zi[k + 1]) - h * h / 12.0 * (dz[k + 1] - dz[k]);
  };
  std::vector<double> I(n, 0.0);
  for (std::size_t k = k0 + 1; k < n; ++k) I[k] = I[k - 1] + step(k - 1);
  for (std::size_t k = k0; k-- > 0;) I[k] = I[k + 1] - step(k);
  f.L.resize(n);
  f.Y.resize(n);
  f.scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    f.L[k] = std::exp(-I[k]);
    if (!(f.L[k] > 0.0)) throw Error(kModule, "L is not positive (corrupted z)");
    f.Y[k] = 1.0 / (f.rho[k] * f.L[k]);
    f.scale = std::max(f.scale, std::abs(f.L[k]));
    f.product_defect = std::max(f.product_defect, std::abs(f.L[k] * f.Y[k] * f.rho[k] - 1.0));
  }
  f.concavity_margin = kInf;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double a = f.t[k] - f.t[k - 1], b = f.t[k + 1] - f.t[k];
    const double chord = (b * f.L[k - 1] + a * f.L[k + 1]) / (a + b);
    f.concavity_margin = std::min(f.concavity_margin, f.L[k] - chord);
  }
  DensityProfile1D prof;
  prof.grid = f.t;
  prof.h = f.Y;
  prof.K0 = f.K0;
  prof.N = N;
  f.y_report = check_density_1d(prof, y_tol);
  return f;
}

double endpoint_density(double t_near, double rho_near, double t_next, double rho_next,
                        double t_end, double marginal, double tol) {
  const double slope = (rho_next - rho_near) / (t_next - t_near);
  const double limit = rho_near + slope * (t_end - t_near);
  return limit >= marginal - tol ? limit : marginal;
}

CDReport cd_chain_verify(std::span<const double> t, std::span<const double> rho, double K,
                         double N, double ell, double tol) {
  if (t.size() != rho.size()) throw Error(kModule, "chain inputs differ in length");
  CDReport r;
  r.condition = "CD_chain";
  r.tol = tol;
  const std::size_t n = t.size();
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(rho[k] > 0.0)) throw Error(kModule, "density must be positive along the geodesic");
    w[k] = std::pow(rho[k], -1.0 / N);
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    CDRow row;
    row.t = t[k];
    row.Nprime = N;
    row.margin = kInf;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        const double theta = ell * (t[j] - t[i]);
        const double alpha = (t[k] - t[i]) / (t[j] - t[i]);
        const auto a = tau({K, N, alpha, theta});
        const auto b = tau({K, N, 1.0 - alpha, theta});
        double m;
        if (a.is_infinite() || b.is_infinite())
          m = -kInf;
        else
          m = (w[k] - (a.value() * w[j] + b.value() * w[i])) / w[k];
        if (m < row.margin) {
          row.margin = m;
          std::ostringstream os;
          os << "t0=" << t[i] << " t1=" << t[j];
          row.witness = os.str();
        }
      }
    r.add(std::move(row));
  }
  r.finish();
  return r;
}

double sigma_scaling_defect(double K, double N, double theta, double ell, double alpha) {
  const auto a = sigma({K * ell * ell, N, alpha, theta});
  const auto b = sigma({K, N, alpha, theta * ell});
  if (a.is_infinite() && b.is_infinite()) return 0.0;
  if (a.is_infinite() != b.is_infinite()) return kInf;
  return std::abs(a.value() - b.value()) / std::max(1.0, std::abs(a.value()));
}

PartitionComparison partition_compare(const Space& space, const LevelNeedle& needle,
                                      std::span<const std::size_t> points, std::size_t kt,
                                      const SpeedProfile& sp, const PropagatedPotential& P) {
  PartitionComparison c;
  c.s = needle.s;
  c.a = needle.a;
  c.t = P.times.at(kt);
  const auto& rd = needle.rays;
  double ratio_sum = 0.0;
  for (std::size_t x : points) {
    const std::size_t r = rd.ray_of[x];
    const double dphi = P.dPhi[kt][x];
    if (r == kNoRay || !std::isfinite(dphi) || !sp.well_defined[kt][x]) {
      ++c.skipped;
      continue;
    }
    const Ray& ray = rd.rays[r];
    const std::size_t i = rd.index_on_ray(x);
    const std::size_t lo = i > 0 ? i - 1 : i, hi = i + 1 < ray.points.size() ? i + 1 : i;
    const double a = P.Phi[kt][ray.points[lo]], b = P.Phi[kt][ray.points[hi]];
    if (lo == hi || !std::isfinite(a) || !std::isfinite(b)) {
      ++c.skipped;
      continue;
    }
    const double slope = std::abs(b - a) / (ray.arclength[hi] - ray.arclength[lo]);
    const double w = ray.cell_hi[i] - ray.cell_lo[i];
    const double ell = sp.ell_plus[kt][x];
    const double l1 = space.weight(x) * ell / w;
    const double lq = space.weight(x) / (slope * w);
    const double ratio = l1 / lq;
    ratio_sum += ratio;
    ++c.points;
    c.max_rel_error = std::max(c.max_rel_error, std::abs(ratio - dphi) / std::abs(dphi));
  }
  if (c.points) c.mean_ratio = ratio_sum / double(c.points);
  return c;
}

}  // namespace cdv
