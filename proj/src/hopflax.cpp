#include "cdv/hopflax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cdv/error.hpp"

namespace cdv {

namespace {

constexpr const char* kModule = "hopflax";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> negated(std::span<const double> f) {
  std::vector<double> g(f.begin(), f.end());
  for (double& v : g) v = -v;
  return g;
}

}  // namespace

HopfLax::HopfLax(const Space& space, double p, std::size_t cache_limit)
    : space_(&space), p_(p) {
  if (!(p > 1.0)) throw Error(kModule, "exponent p must exceed 1");
  const std::size_t n = space.size();
  if (n <= cache_limit) {
    cost_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      cost_[i * n + i] = 0.0;
      for (std::size_t j = i + 1; j < n; ++j)
        cost_[i * n + j] = cost_[j * n + i] = cost_pp(space.distance(i, j), p);
    }
  }
}

double HopfLax::kernel(std::size_t i, std::size_t j) const {
  if (!cost_.empty()) return cost_[i * space_->size() + j];
  return cost_pp(space_->distance(i, j), p_);
}

HopfLaxEvaluation HopfLax::finish(double best, std::span<const double> f, double scale,
                                  const auto& cost_of, const auto& dist_of) const {
  if (!std::isfinite(best)) throw Error(kModule, "field is +inf everywhere");
  HopfLaxEvaluation e;
  e.value = best;
  const double cut = best + kArgminTol * (1.0 + std::abs(best));
  e.d_plus = 0.0;
  e.d_minus = kInf;
  for (std::size_t y = 0; y < f.size(); ++y) {
    if (f[y] == kInf) continue;
    if (cost_of(y) * scale + f[y] <= cut) {
      e.argmins.push_back(y);
      const double d = dist_of(y);
      e.d_plus = std::max(e.d_plus, d);
      e.d_minus = std::min(e.d_minus, d);
    }
  }
  return e;
}

HopfLaxEvaluation HopfLax::at_point(std::size_t i, std::span<const double> f, double t) const {
  if (!(t > 0.0)) throw Error(kModule, "t must be positive (use hopflax_negative)");
  if (f.size() != space_->size()) throw Error(kModule, "field size does not match the space");
  const double scale = std::pow(t, 1.0 - p_);
  double best = kInf;
  for (std::size_t y = 0; y < f.size(); ++y)
    if (f[y] != kInf) best = std::min(best, kernel(i, y) * scale + f[y]);
  return finish(
      best, f, scale, [&](std::size_t y) { return kernel(i, y); },
      [&](std::size_t y) { return space_->distance(i, y); });
}

HopfLaxEvaluation HopfLax::at_coords(std::span<const double> x, std::span<const double> f,
                                     double t) const {
  if (!space_->is_euclidean()) throw Error(kModule, "coordinate queries need a euclidean space");
  if (!(t > 0.0)) throw Error(kModule, "t must be positive (use hopflax_negative)");
  if (f.size() != space_->size()) throw Error(kModule, "field size does not match the space");
  const std::size_t n = space_->size();
  std::vector<double> dist(n), cost(n);
  for (std::size_t y = 0; y < n; ++y) {
    dist[y] = space_->distance_to(x, y);
    cost[y] = cost_pp(dist[y], p_);
  }
  const double scale = std::pow(t, 1.0 - p_);
  double best = kInf;
  for (std::size_t y = 0; y < n; ++y)
    if (f[y] != kInf) best = std::min(best, cost[y] * scale + f[y]);
  return finish(
      best, f, scale, [&](std::size_t y) { return cost[y]; },
      [&](std::size_t y) { return dist[y]; });
}

std::vector<HopfLaxEvaluation> HopfLax::evaluate(std::span<const double> f, double t) const {
  std::vector<HopfLaxEvaluation> out;
  out.reserve(space_->size());
  for (std::size_t i = 0; i < space_->size(); ++i) out.push_back(at_point(i, f, t));
  return out;
}

double HopfLax::value_at(std::size_t i, std::span<const double> f, double t) const {
  if (!(t > 0.0)) throw Error(kModule, "t must be positive (use hopflax_negative)");
  const double scale = std::pow(t, 1.0 - p_);
  double best = kInf;
  for (std::size_t y = 0; y < f.size(); ++y)
    if (f[y] != kInf) best = std::min(best, kernel(i, y) * scale + f[y]);
  return best;
}

std::vector<double> HopfLax::values(std::span<const double> f, double t) const {
  if (f.size() != space_->size()) throw Error(kModule, "field size does not match the space");
  std::vector<double> v(space_->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = value_at(i, f, t);
  return v;
}

std::vector<HopfLaxEvaluation> hopflax(const Space& space, std::span<const double> f, double t,
                                       double p) {
  if (!(t > 0.0)) throw Error(kModule, "t must be positive (use hopflax_negative)");
  return HopfLax(space, p, 0).evaluate(f, t);
}

std::vector<HopfLaxEvaluation> hopflax_negative(const Space& space, std::span<const double> f,
                                                double t, double p) {
  if (!(t < 0.0)) throw Error(kModule, "negative-time evaluation needs t < 0");
  auto out = HopfLax(space, p, 0).evaluate(negated(f), -t);
  for (auto& e : out) e.value = -e.value;
  return out;
}

double semigroup_check(const Space& space, std::span<const double> f, double s, double t,
                       double p) {
  HopfLax hl(space, p);
  const auto qt = hl.values(f, t);
  const auto qst = hl.values(qt, s);
  const auto direct = hl.values(f, s + t);
  double worst = 0.0;
  for (std::size_t i = 0; i < direct.size(); ++i)
    worst = std::max(worst, std::abs(direct[i] - qst[i]));
  return worst;
}

TimeDerivative time_derivative_check(const HopfLax& hl, std::span<const double> f, std::size_t x,
                                     double t, double h) {
  if (!(h > 0.0) || !(t - 2.0 * h > 0.0)) throw Error(kModule, "need 0 < 2h < t");
  const double p = hl.p();
  auto Q = [&](double tau) { return hl.value_at(x, f, tau); };
  const double q0 = Q(t);
  TimeDerivative r;
  r.right = (-3.0 * q0 + 4.0 * Q(t + h) - Q(t + 2.0 * h)) / (2.0 * h);
  r.left = (3.0 * q0 - 4.0 * Q(t - h) + Q(t - 2.0 * h)) / (2.0 * h);
  const auto e = hl.at_point(x, f, t);
  const double k = (p - 1.0) / (p * std::pow(t, p));
  r.predicted_right = -k * std::pow(e.d_plus, p);
  r.predicted_left = -k * std::pow(e.d_minus, p);
  return r;
}

double holder_slack(double dxy, double dxz, double dzy, double t, double p) {
  if (!(t > 0.0 && t < 1.0)) throw Error(kModule, "Hoelder split needs t in (0,1)");
  return std::pow(dxz, p) / std::pow(t, p - 1.0) + std::pow(dzy, p) / std::pow(1.0 - t, p - 1.0) -
         std::pow(dxy, p);
}

IntermediateCheck intermediate_point_check(const Space& space, const PotentialField& pot,
                                           std::size_t x, std::size_t y, std::size_t z, double t,
                                           double tol) {
  const double p = pot.p;
  const double dxy = space.distance(x, y), dxz = space.distance(x, z);
  const double dyz = space.distance(y, z);
  // x is t of the way from y to z: Q_t(-phi)(x) attained at y and
  // Q_{1-t}(-phi^c)(x) attained at z with matching values.
  const double lhs = std::pow(dxy, p) / (p * std::pow(t, p - 1.0)) - pot.phi[y];
  const double rhs = pot.phi_c[z] - std::pow(dxz, p) / (p * std::pow(1.0 - t, p - 1.0));
  IntermediateCheck c;
  c.condition = std::abs(lhs + rhs) <= tol;
  c.defect_yz = std::abs(dyz - dxy / t);
  c.defect_xz = std::abs(dyz - dxz / (1.0 - t));
  return c;
}

std::size_t PotentialFamily::index_of(double t) const {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - t) <= 1e-12) return k;
  std::ostringstream os;
  os << "time " << t << " is not on the potential grid";
  throw Error(kModule, os.str());
}

PotentialField c_concave_pair(const Space& space, std::span<const double> phi, double p) {
  PotentialField pot;
  pot.p = p;
  pot.phi_c = c_transform(space, phi, p);
  pot.phi = c_transform(space, pot.phi_c, p);
  return pot;
}

PotentialFamily interpolating_potentials(const HopfLax& hl, const PotentialField& pot,
                                         std::span<const double> grid) {
  const Space& space = hl.space();
  const std::size_t n = space.size();
  if (pot.phi.size() != n || pot.phi_c.size() != n)
    throw Error(kModule, "potential size does not match the space");
  double scale = 1.0;
  for (double v : pot.phi) scale = std::max(scale, std::abs(v));
  const auto back = hl.values(negated(pot.phi_c), 1.0);  // (phi^c)^c
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(back[i] - pot.phi[i]) > 1e-9 * scale) {
      std::ostringstream os;
      os << "potential is not c-concave at point " << i << " (round trip off by "
         << std::abs(back[i] - pot.phi[i]) << ")";
      throw Error(kModule, os.str());
    }

  PotentialFamily fam;
  fam.p = hl.p();
  fam.times.assign(grid.begin(), grid.end());
  const auto minus_phi = negated(pot.phi);
  const auto minus_phic = negated(pot.phi_c);
  for (double t : grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(kModule, "time grid must lie in [0,1]");
    std::vector<double> phi(n), phibar(n), dp(n, kNaN), dm(n, kNaN), dbp(n, kNaN), dbm(n, kNaN);
    if (t == 0.0) {
      phi = pot.phi;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const auto e = hl.at_point(i, minus_phi, t);
        phi[i] = -e.value;
        dp[i] = e.d_plus;
        dm[i] = e.d_minus;
      }
    }
    if (t == 1.0) {
      phibar = minus_phic;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const auto e = hl.at_point(i, minus_phic, 1.0 - t);
        phibar[i] = e.value;
        dbp[i] = e.d_plus;
        dbm[i] = e.d_minus;
      }
    }
    if (t == 0.0) phibar = pot.phi;  // (phi^c)^c = phi exactly, checked above
    if (t == 1.0) phi = minus_phic;
    fam.phi.push_back(std::move(phi));
    fam.phibar.push_back(std::move(phibar));
    fam.d_plus.push_back(std::move(dp));
    fam.d_minus.push_back(std::move(dm));
    fam.dbar_plus.push_back(std::move(dbp));
    fam.dbar_minus.push_back(std::move(dbm));
  }
  return fam;
}

double phi_t_on_geodesic(const HopfLax& hl, const PotentialField& pot, const Geodesic& g,
                         std::size_t k) {
  const double t = g.times[k];
  const Space& space = hl.space();
  if (t == 0.0) {
    if (!g.ids.empty()) return pot.phi[g.ids[k]];
  }
  const auto minus_phi = negated(pot.phi);
  if (t == 0.0) {
    // Euclidean sample that coincides with a source point.
    std::size_t b = space.nearest(g.coords[k]);
    if (space.distance_to(g.coords[k], b) == 0.0) return pot.phi[b];
    throw Error(kModule, "geodesic start is not a space point");
  }
  if (!g.ids.empty()) return -hl.value_at(g.ids[k], minus_phi, t);
  return -hl.at_coords(g.coords[k], minus_phi, t).value;
}

AffinityReport affinity_check(const HopfLax& hl, const DynamicalPlan& nu,
                              const PotentialField& pot) {
  AffinityReport r;
  const Space& space = hl.space();
  const double p = pot.p;
  for (std::size_t g = 0; g < nu.size(); ++g) {
    const Geodesic& geo = nu.geodesics[g];
    const double c = cost_pp(space.distance(nu.source[g], nu.target[g]), p);
    const double end = pot.phi_c[nu.target[g]];
    double prev_t = 0.0, prev_v = 0.0;
    bool have_prev = false;
    for (std::size_t k = 0; k < geo.size(); ++k) {
      const double t = geo.times[k];
      if (t >= 1.0) continue;
      const double v = t == 0.0 ? pot.phi[nu.source[g]] : phi_t_on_geodesic(hl, pot, geo, k);
      r.along = std::max(r.along, std::abs(v - ((1.0 - t) * c - end)));
      if (have_prev) r.increments = std::max(r.increments, std::abs(prev_v - v - (t - prev_t) * c));
      prev_t = t;
      prev_v = v;
      have_prev = true;
      ++r.samples;
    }
  }
  return r;
}

SpeedProfile speeds(const PotentialFamily& fam, double tol) {
  SpeedProfile sp;
  sp.times = fam.times;
  sp.tol = tol;
  for (std::size_t k = 0; k < fam.times.size(); ++k) {
    const double t = fam.times[k];
    const std::size_t n = fam.phi[k].size();
    std::vector<double> lp(n, kNaN), lm(n, kNaN), bp(n, kNaN), bm(n, kNaN);
    std::vector<unsigned char> wd(n, 0), wdb(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (t > 0.0) {
        lp[i] = fam.d_plus[k][i] / t;
        lm[i] = fam.d_minus[k][i] / t;
        wd[i] = lp[i] - lm[i] <= tol;
      }
      if (t < 1.0) {
        bp[i] = fam.dbar_plus[k][i] / (1.0 - t);
        bm[i] = fam.dbar_minus[k][i] / (1.0 - t);
        wdb[i] = bp[i] - bm[i] <= tol;
      }
    }
    sp.ell_plus.push_back(std::move(lp));
    sp.ell_minus.push_back(std::move(lm));
    sp.ellbar_plus.push_back(std::move(bp));
    sp.ellbar_minus.push_back(std::move(bm));
    sp.well_defined.push_back(std::move(wd));
    sp.well_defined_bar.push_back(std::move(wdb));
  }
  return sp;
}

SpeedBoundsReport speed_bounds(const SpeedProfile& sp, double p) {
  SpeedBoundsReport r;
  r.monotone_forward = r.monotone_backward = r.under = r.over = kInf;
  const std::size_t nt = sp.times.size();
  if (nt < 2) return r;
  const std::size_t n = sp.ell_plus[0].size();
  for (std::size_t k = 0; k + 1 < nt; ++k) {
    const double t0 = sp.times[k], t1 = sp.times[k + 1], dt = t1 - t0;
    for (std::size_t i = 0; i < n; ++i) {
      if (t0 > 0.0) {
        const double a = sp.ell_plus[k][i], b = sp.ell_minus[k + 1][i];
        r.monotone_forward = std::min(r.monotone_forward, t1 * b - t0 * a);
        const double fd = (std::pow(b, p) - std::pow(a, p)) / (p * dt);
        r.under = std::min(r.under, fd + std::max(std::pow(a, p) / t0, std::pow(b, p) / t1));
        ++r.samples;
      }
      if (t1 < 1.0) {
        const double a = sp.ellbar_minus[k][i], b = sp.ellbar_plus[k + 1][i];
        r.monotone_backward = std::min(r.monotone_backward, (1.0 - t0) * a - (1.0 - t1) * b);
        const double fd = (std::pow(b, p) - std::pow(a, p)) / (p * dt);
        r.over = std::min(r.over,
                          std::max(std::pow(a, p) / (1.0 - t0), std::pow(b, p) / (1.0 - t1)) - fd);
      }
    }
  }
  return r;
}

bool transported(const PotentialFamily& fam, const SpeedProfile& sp, std::size_t k,
                 std::size_t x, double tol_g) {
  const double t = fam.times[k];
  if (!(t > 0.0 && t < 1.0)) return false;
  return fam.phibar[k][x] - fam.phi[k][x] <= tol_g && sp.well_defined[k][x] &&
         sp.well_defined_bar[k][x];
}

SandwichReport speed_sandwich(const PotentialFamily& fam, const SpeedProfile& sp, std::size_t x,
                              double tol_g) {
  SandwichReport r;
  r.worst = kInf;
  std::vector<std::size_t> ks;
  for (std::size_t k = 0; k < fam.times.size(); ++k)
    if (transported(fam, sp, k, x, tol_g) && sp.ell_plus[k][x] > 0.0) ks.push_back(k);
  for (std::size_t a = 0; a < ks.size(); ++a)
    for (std::size_t b = a + 1; b < ks.size(); ++b) {
      const double t = fam.times[ks[a]], s = fam.times[ks[b]];
      const double ratio = sp.ell_plus[ks[a]][x] / sp.ell_plus[ks[b]][x];
      const double m = std::min(s / t - ratio, ratio - (1.0 - s) / (1.0 - t));
      ++r.pairs;
      if (m < r.worst) {
        r.worst = m;
        r.worst_t = t;
        r.worst_s = s;
      }
    }
  return r;
}

namespace {

// Derivative at `at` of the parabola through three samples.
double parabola_slope(double t0, double f0, double t1, double f1, double t2, double f2,
                      double at) {
  return f0 * ((at - t1) + (at - t2)) / ((t0 - t1) * (t0 - t2)) +
         f1 * ((at - t0) + (at - t2)) / ((t1 - t0) * (t1 - t2)) +
         f2 * ((at - t0) + (at - t1)) / ((t2 - t0) * (t2 - t1));
}

}  // namespace

PropagatedPotential propagate_potential(const PotentialFamily& fam, const SpeedProfile& sp,
                                        double s, double fd_tol) {
  if (!(s > 0.0 && s < 1.0)) throw Error(kModule, "s must lie in (0,1)");
  PropagatedPotential P;
  P.s = s;
  P.times = fam.times;
  const double p = fam.p;
  const std::size_t nt = fam.times.size();
  const std::size_t n = nt ? fam.phi[0].size() : 0;
  for (std::size_t k = 0; k < nt; ++k) {
    const double t = fam.times[k];
    std::vector<double> Phi(n, kNaN), Phibar(n, kNaN);
    for (std::size_t i = 0; i < n; ++i) {
      if (t > 0.0 && sp.well_defined[k][i])
        Phi[i] = fam.phi[k][i] + (t - s) * std::pow(sp.ell_plus[k][i], p) / p;
      if (t < 1.0 && sp.well_defined_bar[k][i])
        Phibar[i] = fam.phibar[k][i] + (t - s) * std::pow(sp.ellbar_plus[k][i], p) / p;
    }
    P.Phi.push_back(std::move(Phi));
    P.Phibar.push_back(std::move(Phibar));
  }
  const auto& T = fam.times;
  for (std::size_t k = 0; k < nt; ++k) {
    std::vector<double> d(n, kNaN);
    for (std::size_t i = 0; i < n; ++i) {
      auto ok = [&](std::ptrdiff_t j) {
        return j >= 0 && std::size_t(j) < nt && std::isfinite(P.Phi[j][i]);
      };
      auto slope = [&](std::ptrdiff_t a, std::ptrdiff_t b, std::ptrdiff_t c) {
        return parabola_slope(T[a], P.Phi[a][i], T[b], P.Phi[b][i], T[c], P.Phi[c][i], T[k]);
      };
      const std::ptrdiff_t j = std::ptrdiff_t(k);
      if (!ok(j)) continue;
      // Candidates in order of preference; the first is used, the second checks it.
      std::vector<double> est;
      const bool uniform = ok(j - 2) && ok(j - 1) && ok(j + 1) && ok(j + 2) &&
                           std::abs((T[k + 2] - T[k]) - (T[k] - T[k - 2])) <= 1e-12 &&
                           std::abs((T[k + 1] - T[k]) - (T[k] - T[k - 1])) <= 1e-12;
      if (uniform) {
        const double d1 = (P.Phi[k + 1][i] - P.Phi[k - 1][i]) / (T[k + 1] - T[k - 1]);
        const double d2 = (P.Phi[k + 2][i] - P.Phi[k - 2][i]) / (T[k + 2] - T[k - 2]);
        est.push_back((4.0 * d1 - d2) / 3.0);
        est.push_back(d2);
      }
      if (ok(j - 1) && ok(j + 1)) est.push_back(slope(j - 1, j, j + 1));
      if (ok(j + 1) && ok(j + 2)) est.push_back(slope(j, j + 1, j + 2));
      if (ok(j - 2) && ok(j - 1)) est.push_back(slope(j - 2, j - 1, j));
      if (ok(j + 2) && ok(j + 4)) est.push_back(slope(j, j + 2, j + 4));
      if (ok(j - 4) && ok(j - 2)) est.push_back(slope(j - 4, j - 2, j));
      if (est.empty()) continue;
      ++P.evaluated;
      // First estimate confirmed by an independent stencil; stencils that straddle
      // a kink of t -> Phi(x) disagree with the ones that do not.
      double chosen = kNaN;
      for (std::size_t a = 0; a < est.size() && std::isnan(chosen); ++a)
        for (std::size_t b = 0; b < est.size(); ++b)
          if (b != a && std::abs(est[a] - est[b]) <= fd_tol * (1.0 + std::abs(est[a]))) {
            chosen = est[a];
            break;
          }
      if (std::isnan(chosen)) {
        ++P.skipped;
        continue;
      }
      d[i] = chosen;
    }
    P.dPhi.push_back(std::move(d));
  }
  return P;
}

PropagationBounds propagation_bounds(const PropagatedPotential& P, const SpeedProfile& sp,
                                     double p) {
  PropagationBounds r;
  r.forward_lower = r.forward_upper = r.backward_upper = r.backward_lower = kInf;
  const double s = P.s;
  const std::size_t nt = P.times.size();
  for (std::size_t k = 0; k + 1 < nt; ++k) {
    const double t0 = P.times[k], t1 = P.times[k + 1], dt = t1 - t0;
    const bool after = t0 >= s, before = t1 <= s;
    if (!after && !before) continue;
    for (std::size_t i = 0; i < P.Phi[k].size(); ++i) {
      const double a = P.Phi[k][i], b = P.Phi[k + 1][i];
      if (std::isfinite(a) && std::isfinite(b)) {
        const double fd = (b - a) / dt;
        const double b0 = (s / t0) * std::pow(sp.ell_plus[k][i], p);
        const double b1 = (s / t1) * std::pow(sp.ell_plus[k + 1][i], p);
        if (after) r.forward_lower = std::min(r.forward_lower, fd - std::min(b0, b1));
        if (before) r.forward_upper = std::min(r.forward_upper, std::max(b0, b1) - fd);
        ++r.samples;
      }
      const double c = P.Phibar[k][i], e = P.Phibar[k + 1][i];
      if (std::isfinite(c) && std::isfinite(e)) {
        const double fd = (e - c) / dt;
        const double b0 = (1.0 - s) / (1.0 - t0) * std::pow(sp.ellbar_plus[k][i], p);
        const double b1 = (1.0 - s) / (1.0 - t1) * std::pow(sp.ellbar_plus[k + 1][i], p);
        if (after) r.backward_upper = std::min(r.backward_upper, std::max(b0, b1) - fd);
        if (before) r.backward_lower = std::min(r.backward_lower, fd - std::min(b0, b1));
      }
    }
  }
  return r;
}

SecondOrderSample second_order_diagnostics(const HopfLax& hl, const PotentialField& pot,
                                           std::size_t x, double s, double h, double tol) {
  const double p = hl.p();
  if (!(s - h > 0.0 && s + h < 1.0)) throw Error(kModule, "Peano ladder leaves (0,1)");
  const auto f = negated(pot.phi);
  auto phi_at = [&](double tau) { return -hl.value_at(x, f, tau); };
  auto energy = [&](double D, double tau) { return (p - 1.0) * std::pow(D / tau, p) / p; };
  const auto e0 = hl.at_point(x, f, s);
  const double f0 = -e0.value;
  const double right = energy(e0.d_plus, s), left = energy(e0.d_minus, s);
  SecondOrderSample r;
  r.t = s;
  r.q_plus = r.r_plus = -kInf;
  r.q_minus = r.r_minus = kInf;
  for (double sign : {1.0, -1.0})
    for (int j = 0; j < 4; ++j) {
      const double eps = sign * h / double(1 << j);
      const double slope = sign > 0 ? right : left;
      const double q = 2.0 * (phi_at(s + eps) - f0 - eps * slope) / (eps * eps);
      const auto ee = hl.at_point(x, f, s + eps);
      const double en = energy(sign > 0 ? ee.d_minus : ee.d_plus, s + eps);
      const double rr = (en - (sign > 0 ? right : left)) / eps;
      r.q_plus = std::max(r.q_plus, q);
      r.q_minus = std::min(r.q_minus, q);
      r.r_plus = std::max(r.r_plus, rr);
      r.r_minus = std::min(r.r_minus, rr);
    }
  const double mid = 0.5 * (r.q_plus + r.q_minus);
  r.z = r.q_plus - r.q_minus <= tol * (1.0 + std::abs(mid)) ? mid : kNaN;
  return r;
}

ThirdOrderReport third_order_check(std::span<const double> t, std::span<const double> z,
                                   double p, double ell) {
  if (t.size() != z.size()) throw Error(kModule, "time and z samples differ in length");
  const double A = (p - 1.0) * std::pow(ell, p);
  if (!(A > 0.0)) throw Error(kModule, "third-order check needs a positive speed");
  ThirdOrderReport r;
  r.t.assign(t.begin(), t.end());
  r.margin_geomean.assign(t.size(), kNaN);
  r.margin_ode.assign(t.size(), kNaN);
  r.worst_geomean = r.worst_ode = kInf;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (!std::isfinite(z[j])) continue;
    for (std::size_t i = 0; i < j; ++i) {
      if (!std::isfinite(z[i])) continue;
      const double s = t[i], tt = t[j];
      const double w = std::sqrt((s / tt) * (1.0 - tt) / (1.0 - s));
      const double m = (z[j] - z[i]) / (tt - s) - w * std::abs(z[i]) * std::abs(z[j]) / A;
      ++r.pairs;
      if (!(m >= r.margin_geomean[j])) r.margin_geomean[j] = m;
      if (m < r.worst_geomean) {
        r.worst_geomean = m;
        r.worst_s = s;
        r.worst_t = tt;
      }
    }
    if (j >= 2 && j + 2 < t.size() && std::isfinite(z[j - 2]) && std::isfinite(z[j - 1]) &&
        std::isfinite(z[j + 1]) && std::isfinite(z[j + 2])) {
      const double d1 = (z[j + 1] - z[j - 1]) / (t[j + 1] - t[j - 1]);
      const double d2 = (z[j + 2] - z[j - 2]) / (t[j + 2] - t[j - 2]);
      const double dz = (4.0 * d1 - d2) / 3.0;
      const double m = dz - z[j] * z[j] / A;
      r.margin_ode[j] = m;
      r.worst_ode = std::min(r.worst_ode, m);
    }
  }
  if (r.worst_geomean == kInf) r.worst_geomean = 0.0;
  if (r.worst_ode == kInf) r.worst_ode = 0.0;
  return r;
}

}  // namespace cdv
