#include "cdv/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include "cdv/error.hpp"
#include "cdv/network_simplex.hpp"

namespace cdv {

namespace {

constexpr const char* kModule = "transport";

std::vector<std::size_t> support_of(const Measure& mu) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu.weights[i] > 0.0) s.push_back(i);
  return s;
}

void check_probability(const Space& space, const Measure& mu, const char* name) {
  if (mu.size() != space.size())
    throw Error(kModule, std::string(name) + " has the wrong number of weights");
  for (double w : mu.weights)
    if (!(w >= 0.0)) throw Error(kModule, std::string(name) + " has a negative weight");
  if (std::abs(mu.total() - 1.0) > 1e-9) {
    std::ostringstream os;
    os << name << " has mass " << mu.total() << ", expected 1";
    throw Error(kModule, os.str());
  }
}

struct LpOutcome {
  NetworkSimplex::Result r;
  std::vector<std::size_t> s0, s1;
};

LpOutcome solve_lp(const Space& space, const Measure& mu0, const Measure& mu1, double p,
                   const std::vector<double>* noise) {
  LpOutcome out;
  out.s0 = support_of(mu0);
  out.s1 = support_of(mu1);
  const std::size_t n0 = out.s0.size(), n1 = out.s1.size();
  std::vector<double> a(n0), b(n1), c(n0 * n1);
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < n0; ++i) sa += (a[i] = mu0.weights[out.s0[i]]);
  for (std::size_t j = 0; j < n1; ++j) sb += (b[j] = mu1.weights[out.s1[j]]);
  // Balance exactly so artificial arcs can drain to zero.
  *std::max_element(b.begin(), b.end()) += sa - sb;
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) {
      double cij = cost_pp(space.distance(out.s0[i], out.s1[j]), p);
      if (noise) cij += (*noise)[i * n1 + j];
      c[i * n1 + j] = cij;
    }
  NetworkSimplex ns(std::move(a), std::move(b), std::move(c));
  out.r = ns.run();
  if (out.r.artificial_flow > 1e-9) {
    std::ostringstream os;
    os << "solver did not reach a feasible plan (residual " << out.r.artificial_flow << ")";
    throw Error(kModule, os.str());
  }
  return out;
}

std::set<std::pair<std::size_t, std::size_t>> support_pairs(const LpOutcome& o) {
  std::set<std::pair<std::size_t, std::size_t>> s;
  const std::size_t n1 = o.s1.size();
  for (std::size_t e = 0; e < o.r.flow.size(); ++e)
    if (o.r.flow[e] > 1e-12) s.insert({o.s0[e / n1], o.s1[e % n1]});
  return s;
}

}  // namespace

double TransportPlan::wasserstein() const { return std::pow(std::max(total_cost, 0.0), 1.0 / p); }

SolveResult solve_wp(const Space& space, const Measure& mu0, const Measure& mu1, double p,
                     const SolveOptions& opts) {
  if (!(p > 1.0)) throw Error(kModule, "exponent p must be > 1");
  check_probability(space, mu0, "mu0");
  check_probability(space, mu1, "mu1");

  LpOutcome lp = solve_lp(space, mu0, mu1, p, nullptr);
  const std::size_t n0 = lp.s0.size(), n1 = lp.s1.size();

  SolveResult res;
  res.pivots = lp.r.pivots;
  res.plan.p = p;
  for (std::size_t e = 0; e < lp.r.flow.size(); ++e) {
    if (lp.r.flow[e] <= 1e-15) continue;
    PlanAtom a{lp.s0[e / n1], lp.s1[e % n1], lp.r.flow[e]};
    res.plan.atoms.push_back(a);
  }
  res.plan.total_cost = plan_cost(space, res.plan);

  // Reduced costs are c + pi_s - pi_t, so phi = -pi_s and psi = pi_t.
  res.primal = lp.r.cost;
  res.dual = 0.0;
  for (std::size_t i = 0; i < n0; ++i) res.dual -= mu0.weights[lp.s0[i]] * lp.r.source_pi[i];
  for (std::size_t j = 0; j < n1; ++j) res.dual += mu1.weights[lp.s1[j]] * lp.r.sink_pi[j];
  res.gap = res.primal - res.dual;
  if (std::abs(res.gap) > 1e-8 * (1.0 + std::abs(res.primal))) {
    std::ostringstream os;
    os << "duality gap " << res.gap << " exceeds tolerance";
    throw Error(kModule, os.str());
  }

  // Extend: phi = (psi on supp mu1)^c over the whole space, then phi^c.
  std::vector<double> psi(space.size(), std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < n1; ++j) psi[lp.s1[j]] = lp.r.sink_pi[j];
  res.potentials.p = p;
  res.potentials.phi = c_transform(space, psi, p);
  res.potentials.phi_c = c_transform(space, res.potentials.phi, p);

  if (opts.check_degeneracy && n0 * n1 > 1) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> noise(n0 * n1);
    for (double& v : noise) v = 1e-10 * U(rng);
    LpOutcome alt = solve_lp(space, mu0, mu1, p, &noise);
    res.plan.degenerate = support_pairs(alt) != support_pairs(lp);
  }
  return res;
}

std::vector<double> c_transform(const Space& space, std::span<const double> psi, double p) {
  const std::size_t n = space.size();
  if (psi.size() != n) throw Error(kModule, "field has the wrong length");
  std::vector<std::size_t> dom;
  for (std::size_t j = 0; j < n; ++j)
    if (std::isfinite(psi[j])) dom.push_back(j);
  if (dom.empty()) throw Error(kModule, "c-transform of a field that is nowhere finite");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j : dom) best = std::min(best, cost_pp(space.distance(i, j), p) - psi[j]);
    out[i] = best;
  }
  return out;
}

PotentialCertificate certify(const Space& space, const PotentialField& pot,
                             const TransportPlan& plan) {
  PotentialCertificate c;
  const std::size_t n = space.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      c.feasibility = std::max(
          c.feasibility, pot.phi[i] + pot.phi_c[j] - cost_pp(space.distance(i, j), pot.p));
  for (const auto& a : plan.atoms)
    c.slackness = std::max(c.slackness, std::abs(pot.phi[a.source] + pot.phi_c[a.target] -
                                                 cost_pp(space.distance(a.source, a.target),
                                                         pot.p)));
  return c;
}

double plan_cost(const Space& space, const TransportPlan& plan) {
  double c = 0.0;
  for (const auto& a : plan.atoms) c += a.mass * std::pow(space.distance(a.source, a.target), plan.p);
  return c;
}

DynamicalPlan dynamical_plan(const Space& space, const TransportPlan& plan,
                             std::span<const double> grid) {
  if (grid.empty()) throw Error(kModule, "empty time grid");
  DynamicalPlan nu;
  nu.p = plan.p;
  nu.grid.assign(grid.begin(), grid.end());
  double mass = 0.0;
  for (const auto& a : plan.atoms) mass += a.mass;
  for (const auto& a : plan.atoms) {
    nu.geodesics.push_back(geodesic_between(space, a.source, a.target, grid));
    nu.weights.push_back(a.mass / mass);
    nu.source.push_back(a.source);
    nu.target.push_back(a.target);
  }
  return nu;
}

std::size_t bin_of(const Space& space, const Geodesic& g, std::size_t k, double* offset) {
  if (!g.ids.empty()) {
    if (offset) *offset = 0.0;
    return g.ids[k];
  }
  std::size_t b = space.nearest(g.coords[k]);
  if (offset) *offset = space.distance_to(g.coords[k], b);
  return b;
}

namespace {

DensitySnapshot bin_positions(const Space& space, const DynamicalPlan& nu, double t,
                              const std::vector<std::size_t>& bins,
                              const std::vector<double>& offsets) {
  DensitySnapshot s;
  s.t = t;
  s.mu.weights.assign(space.size(), 0.0);
  s.rho.assign(space.size(), 0.0);
  s.bin = bins;
  for (std::size_t g = 0; g < nu.size(); ++g) {
    const double tol = 1.5 * std::max(space.nn_distance(bins[g]), 1e-300);
    if (offsets[g] > tol) {
      std::ostringstream os;
      os << "geodesic " << g << " at t=" << t << " lies " << offsets[g]
         << " from every space point";
      throw Error(kModule, os.str());
    }
    s.mu.weights[bins[g]] += nu.weights[g];
  }
  for (std::size_t i = 0; i < space.size(); ++i)
    if (space.weight(i) > 0.0) s.rho[i] = s.mu.weights[i] / space.weight(i);
  return s;
}

}  // namespace

DensitySnapshot interpolate_density(const Space& space, const DynamicalPlan& nu, std::size_t k) {
  if (k >= nu.grid.size()) throw Error(kModule, "time index outside the grid");
  std::vector<std::size_t> bins(nu.size());
  std::vector<double> offsets(nu.size(), 0.0);
  for (std::size_t g = 0; g < nu.size(); ++g) bins[g] = bin_of(space, nu.geodesics[g], k, &offsets[g]);
  return bin_positions(space, nu, nu.grid[k], bins, offsets);
}

DensitySnapshot interpolate_density_at(const Space& space, const DynamicalPlan& nu, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(kModule, "t must lie in [0,1]");
  for (std::size_t k = 0; k < nu.grid.size(); ++k)
    if (nu.grid[k] == t) return interpolate_density(space, nu, k);
  std::vector<std::size_t> bins(nu.size());
  std::vector<double> offsets(nu.size(), 0.0);
  const double ts[1] = {t};
  for (std::size_t g = 0; g < nu.size(); ++g) {
    Geodesic one = geodesic_between(space, nu.source[g], nu.target[g], ts);
    bins[g] = bin_of(space, one, 0, &offsets[g]);
  }
  return bin_positions(space, nu, t, bins, offsets);
}

double kantorovich_residual(const Space& space, const DynamicalPlan& nu,
                            const PotentialField& pot) {
  double worst = 0.0;
  for (std::size_t g = 0; g < nu.size(); ++g) {
    const std::size_t x = nu.source[g], y = nu.target[g];
    worst = std::max(worst, std::abs(pot.phi[x] + pot.phi_c[y] -
                                     cost_pp(space.distance(x, y), pot.p)));
  }
  return worst;
}

}  // namespace cdv
