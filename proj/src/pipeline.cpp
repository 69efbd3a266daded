#include "cdv/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "cdv/distortion.hpp"
#include "cdv/error.hpp"
#include "cdv/needle.hpp"

namespace cdv {

namespace {

constexpr const char* kModule = "pipeline";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double radius(const Space& space, std::size_t i) {
  double s = 0.0;
  for (double c : space.coords(i)) s += c * c;
  return std::sqrt(s);
}

// Radial spacing of a polar grid on A_{1,4}: the innermost centre sits at 1 + dr/2.
double radial_spacing(const Space& space) {
  double rmin = 1e300;
  for (std::size_t i = 0; i < space.size(); ++i) rmin = std::min(rmin, radius(space, i));
  return 2.0 * (rmin - 1.0);
}

// The cell of a point at radius r stays a full spacing away from the boundary of
// the support [1 + 2t, 2 + 2t] of mu_t: partially filled edge cells are left out.
bool radial_interior(double r, double t, double dr) {
  return r - 1.5 * dr >= 1.0 + 2.0 * t - 1e-9 && r + 1.5 * dr <= 2.0 + 2.0 * t + 1e-9;
}

double overlap(double a0, double b0, double a1, double b1) {
  return std::max(0.0, std::min(b0, b1) - std::max(a0, a1));
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Measure block_on_interval(const Space& space, double a, double b) {
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double x = space.coords(i)[0];
    if (x >= a - 1e-12 && x <= b + 1e-12) support.push_back(i);
  }
  return uniform_on(space, support);
}

std::vector<double> uniform_grid(std::size_t steps) {
  std::vector<double> g;
  for (std::size_t k = 0; k <= steps; ++k) g.push_back(double(k) / double(steps));
  return g;
}

std::vector<double> interior(std::span<const double> t, std::span<const double> v) {
  std::vector<double> out;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] > 0.0 && t[k] < 1.0) out.push_back(v[k]);
  return out;
}

double chord_defect(std::span<const double> t, std::span<const double> L) {
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < t.size(); ++k) {
    const double a = t[k] - t[k - 1], b = t[k + 1] - t[k];
    const double chord = (b * L[k - 1] + a * L[k + 1]) / (a + b);
    worst = std::max(worst, std::abs(L[k] - chord));
  }
  return worst;
}

}  // namespace

Problem radial_problem(int n_radial, int n_angular, double q) {
  Problem prob{"radial", sample_disc(n_radial, n_angular, 1.0, 4.0), {}, {}, q, {}, {}, {}};
  const double dr = 3.0 / n_radial;
  const std::size_t n = prob.space.size();
  prob.mu0.weights.assign(n, 0.0);
  prob.mu1.weights.assign(n, 0.0);
  oracle::Radial o{2, q};
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = radius(prob.space, i);
    // density 1/(2 pi r) against the cell area r dr dtheta: mass = overlap / n_angular
    prob.mu0.weights[i] = overlap(r - 0.5 * dr, r + 0.5 * dr, 1.0, 2.0) / n_angular;
    prob.mu1.weights[i] = overlap(r - 0.5 * dr, r + 0.5 * dr, 3.0, 4.0) / n_angular;
    phi[i] = o.phi(r);
  }
  prob.phi = std::move(phi);
  const double dt = 0.5 * dr;
  for (std::size_t k = 0; double(k) * dt < 1.0 - 1e-12; ++k) prob.grid.push_back(double(k) * dt);
  prob.grid.push_back(1.0);
  for (double s : {0.3, 0.6}) {
    const std::size_t k = std::size_t(std::lround(s / dt));
    prob.s_list.push_back(prob.grid.at(k));
  }
  return prob;
}

Problem translation_problem(double p) {
  Problem prob{"translation", sample_interval(100, 0.0, 1.0), {}, {}, p, uniform_grid(50),
               {0.3, 0.6}, {}};
  prob.mu0 = block_on_interval(prob.space, 0.1, 0.3);
  prob.mu1 = block_on_interval(prob.space, 0.6, 0.8);
  // Kantorovich potential of the shift by 0.5 for the cost |x-y|^p/p.
  std::vector<double> phi;
  for (std::size_t i = 0; i < prob.space.size(); ++i)
    phi.push_back(-std::pow(0.5, p - 1.0) * prob.space.coords(i)[0]);
  prob.phi = std::move(phi);
  return prob;
}

Problem stretch_problem(double p) {
  Problem prob{"stretch", sample_interval(100, 0.0, 1.0), {}, {}, p, uniform_grid(50),
               {0.3, 0.6}, {}};
  prob.mu0 = block_on_interval(prob.space, 0.0, 0.25);
  prob.mu1 = block_on_interval(prob.space, 0.5, 1.0);
  return prob;
}

InstanceResult run_instance(const Problem& prob, const InstanceOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const Space& space = prob.space;
  const double p = prob.p;
  InstanceResult R;
  R.name = prob.name;
  R.p = p;
  SolveOptions so;
  so.seed = opts.seed;
  R.solve = solve_wp(space, prob.mu0, prob.mu1, p, so);
  R.potentials = prob.phi ? c_concave_pair(space, *prob.phi, p) : R.solve.potentials;
  R.certificate = certify(space, R.potentials, R.solve.plan);
  R.nu = dynamical_plan(space, R.solve.plan, prob.grid);
  for (std::size_t k = 0; k < prob.grid.size(); ++k)
    R.snapshots.push_back(interpolate_density(space, R.nu, k));

  HopfLax hl(space, p);
  R.family = interpolating_potentials(hl, R.potentials, prob.grid);
  double scale = 1.0;
  for (double v : R.potentials.phi)
    if (std::isfinite(v)) scale = std::max(scale, 1.0 + std::abs(v));
  R.tol_g = 1e-9 * scale;
  R.speeds = speeds(R.family, 1e-9 * (1.0 + space.diameter()));
  std::vector<std::size_t> ks_list;
  for (double s : prob.s_list) {
    const std::size_t ks = R.family.index_of(s);
    ks_list.push_back(ks);
    R.propagated.emplace(ks, propagate_potential(R.family, R.speeds, s, 1e-6));
  }

  R.ledger = build_ledger(space, R.nu, R.snapshots, R.speeds);
  if (opts.keep) {
    std::vector<LedgerEntry> kept;
    for (auto& e : R.ledger.entries) {
      if (opts.keep(e)) {
        kept.push_back(std::move(e));
      } else {
        ++R.excluded_filter;
        R.ledger.excluded_mass += e.weight;
      }
    }
    R.ledger.entries = std::move(kept);
  }
  auto& entries = R.ledger.entries;
  R.analyses.resize(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto& A = R.analyses[i];
    const auto& e = entries[i];
    A.geodesic = e.geodesic;
    A.length = e.length;
    A.weight = e.weight;
    A.t = e.t;
    A.rho = e.rho;
    std::vector<double> sp;
    for (double v : e.speed)
      if (std::isfinite(v)) sp.push_back(v);
    A.ell = sp.empty() ? e.length : median(sp);
  }

  // Needles: one per level set of phi_s met by the retained geodesics.
  const double zero_tol = 1e-9 * scale;
  for (std::size_t ks : ks_list) {
    std::vector<std::pair<double, std::size_t>> levels;
    for (std::size_t i = 0; i < entries.size(); ++i)
      levels.emplace_back(R.family.phi[ks][entries[i].bins[ks]], i);
    std::sort(levels.begin(), levels.end());
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<double> reps;
    for (std::size_t j = 0; j < levels.size(); ++j) {
      if (clusters.empty() || levels[j].first - reps.back() > zero_tol) {
        clusters.emplace_back();
        reps.push_back(levels[j].first);
      }
      clusters.back().push_back(levels[j].second);
    }
    const auto& P = R.propagated.at(ks);
    const std::size_t mid = clusters.size() / 2;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      LevelNeedle nd;
      try {
        nd = needle_for_level(space, R.family, ks, reps[c], zero_tol, opts.needle_bins);
      } catch (const Error&) {
        ++R.needle_failures;
        for (std::size_t i : clusters[c])
          R.analyses[i].h[ks] = std::vector<double>(entries[i].t.size(), kNaN);
        continue;
      }
      ++R.needle_builds;
      R.reconstruction =
          std::max(R.reconstruction, reconstruction_residual(space, nd.structure, nd.rays));
      for (std::size_t i : clusters[c]) {
        auto h = needle_profile(space, nd.rays, entries[i], ks);
        R.cov.merge(change_of_variables_residual(entries[i], ks, h, P, p));
        R.analyses[i].h[ks] = std::move(h);
      }
      if (c != mid) continue;
      for (std::size_t kt = 1; kt + 1 < prob.grid.size(); ++kt) {
        if (kt == ks) continue;
        std::set<std::size_t> pts;
        for (std::size_t i : clusters[c]) pts.insert(entries[i].bins[kt]);
        std::vector<std::size_t> v(pts.begin(), pts.end());
        R.partitions.push_back(partition_compare(space, nd, v, kt, R.speeds, P));
      }
    }
  }

  // Per-geodesic z, L Y factorisation, CD chain and third-order margins.
  const double dx = space.spacing();
  double dt = 1.0;
  for (std::size_t k = 0; k + 1 < prob.grid.size(); ++k)
    dt = std::min(dt, prob.grid[k + 1] - prob.grid[k]);
  const double chain_tol = opts.tol + opts.grid_tol;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto& A = R.analyses[i];
    std::map<std::size_t, std::vector<double>> per_s;
    for (std::size_t ks : ks_list) per_s[ks] = z_for_s(entries[i], ks, A.h[ks]);
    try {
      const auto est = extract_z(per_s, opts.tol);
      A.z = est.z;
      R.z_spread = std::max(R.z_spread, est.spread);
    } catch (const Error&) {
      A.z_ok = false;
      ++R.z_inconsistent;
      continue;
    }
    double ymax = 0.0;
    for (double r : interior(A.t, A.rho))
      ymax = std::max(ymax, opts.N > 1.0 ? std::pow(1.0 / r, 1.0 / (opts.N - 1.0)) : 1.0 / r);
    const double y_tol = std::max(cd_tolerance(dx, dt), opts.grid_tol * ymax);
    try {
      A.ly = ly_factorize(A.t, A.rho, A.z, opts.K, opts.N, A.ell, 0.5, y_tol);
    } catch (const Error&) {
      A.z_ok = false;
      ++R.z_inconsistent;
      continue;
    }
    A.chain = cd_chain_verify(A.t, A.rho, opts.K, opts.N, A.ell, chain_tol);
    const auto ti = interior(A.t, A.t);
    auto zi = interior(A.t, A.z);
    const double Ap = (p - 1.0) * std::pow(A.ell, p);
    for (double& v : zi) v *= Ap;
    A.third = third_order_check(ti, zi, p, A.ell);
  }

  // Speed sandwich on every point visited by a retained geodesic.
  std::set<std::size_t> visited;
  for (const auto& e : entries)
    for (std::size_t k = 0; k < e.bins.size(); ++k) visited.insert(e.bins[k]);
  R.sandwich.worst = std::numeric_limits<double>::infinity();
  for (std::size_t x : visited) {
    const auto sw = speed_sandwich(R.family, R.speeds, x, R.tol_g);
    R.sandwich.pairs += sw.pairs;
    if (sw.pairs && sw.worst < R.sandwich.worst) {
      R.sandwich.worst = sw.worst;
      R.sandwich.worst_t = sw.worst_t;
      R.sandwich.worst_s = sw.worst_s;
    }
    ++R.sandwich_points;
  }
  if (R.sandwich.pairs == 0) R.sandwich.worst = 0.0;
  R.speed_bounds = speed_bounds(R.speeds, p);
  R.affinity = affinity_check(hl, R.nu, R.potentials);
  R.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return R;
}

RadialComparison compare_radial(const Problem& prob, const InstanceResult& r,
                                const oracle::Radial& o) {
  const Space& space = prob.space;
  RadialComparison c;
  const double W = o.transport_cost();
  c.cost = std::abs(r.solve.plan.total_cost - W) / W;
  const double dr = radial_spacing(space);
  double rmax = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) rmax = std::max(rmax, radius(space, i));
  const double area = std::numbers::pi * (std::pow(rmax + 0.5 * dr, 2) - 1.0);
  auto inside = [&](double rr, double t) { return radial_interior(rr, t, dr); };
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };

  for (std::size_t i = 0; i < space.size(); ++i) {
    const double rr = radius(space, i);
    if (radial_interior(rr, 1.0, dr))
      c.phi_c = std::max(c.phi_c, rel(r.potentials.phi_c[i], o.phi_c(rr)));
  }
  const auto& grid = r.nu.grid;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const auto& snap = r.snapshots[k];
    for (std::size_t i = 0; i < space.size(); ++i) {
      const double rr = radius(space, i);
      if (!inside(rr, t)) continue;
      c.rho = std::max(c.rho, rel(snap.rho[i] / area, o.density(rr, t)));
      ++c.samples;
      if (!(t > 0.0 && t < 1.0)) continue;
      for (const auto& [ks, P] : r.propagated) {
        if (std::isfinite(P.Phi[k][i])) c.Phi = std::max(c.Phi, rel(P.Phi[k][i], o.Phi(rr, P.s, t)));
        if (std::isfinite(P.dPhi[k][i])) c.dPhi = std::max(c.dPhi, rel(P.dPhi[k][i], o.dPhi()));
      }
    }
  }
  // h and the density ratio along retained geodesics, with the oracle geodesic
  // through the measured points.
  for (const auto& A : r.analyses) {
    for (const auto& [ks, h] : A.h) {
      const double s = grid[ks];
      const std::size_t bs = r.snapshots[ks].bin[A.geodesic];
      const double rs = radius(space, bs);
      if (!inside(rs, s)) continue;
      const double ell = rs - 1.0 - 2.0 * s;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid[k];
        if (k == ks || !(t > 0.0 && t < 1.0) || !std::isfinite(h[k])) continue;
        const std::size_t bt = r.snapshots[k].bin[A.geodesic];
        const double rt = radius(space, bt);
        if (!inside(rt, t)) continue;
        const double tp = (rt - 1.0 - ell) / 2.0;
        if (!(tp > 0.0 && tp < 1.0)) continue;
        c.h = std::max(c.h, rel(h[k], o.h(ell, s, tp)));
        c.ratio = std::max(c.ratio, rel(A.rho[k] / A.rho[ks], o.ratio(ell, s, tp)));
      }
    }
  }
  return c;
}

SyntheticStretch synthetic_stretch(double x0, double p, std::size_t steps, double K, double N) {
  SyntheticStretch S;
  S.t = uniform_grid(steps);
  S.ell = 0.5 + x0;
  const double rho0 = 4.0;
  LedgerEntry e;
  e.t = S.t;
  e.length = S.ell;
  for (double t : S.t) {
    S.rho.push_back(rho0 / (1.0 + t));
    e.rho.push_back(S.rho.back());
    e.bins.push_back(0);
    e.speed.push_back(S.ell);
  }
  std::vector<double> h(S.t.size(), 1.0);
  std::map<std::size_t, std::vector<double>> per_s;
  for (std::size_t ks : {std::size_t(std::lround(0.3 * steps)), std::size_t(std::lround(0.6 * steps))})
    per_s[ks] = z_for_s(e, ks, h);
  const auto est = extract_z(per_s, 1e-9);
  S.z = est.z;
  S.z_spread = est.spread;
  S.ly = ly_factorize(S.t, S.rho, S.z, K, N, S.ell, 0.5, 1e-6);
  S.L_affinity = chord_defect(S.ly.t, S.ly.L);
  const auto ti = interior(S.t, S.t);
  auto zi = interior(S.t, S.z);
  const double A = (p - 1.0) * std::pow(S.ell, p);
  for (double& v : zi) v *= A;
  S.third = third_order_check(ti, zi, p, S.ell);
  return S;
}

bool radial_keep(const Space& space, const LedgerEntry& e) {
  const double dr = radial_spacing(space);
  for (std::size_t k = 0; k < e.t.size(); ++k)
    if (!radial_interior(radius(space, e.bins[k]), e.t[k], dr)) return false;
  return true;
}

namespace {

struct Summary {
  CsvReport& rep;
  bool pass = true;
  void check(const std::string& inst, const std::string& name, double value, const std::string& rule,
             bool ok) {
    rep.row({inst, name, fmt(value), rule, ok ? "PASS" : "FAIL"});
    pass = pass && ok;
  }
  void info(const std::string& inst, const std::string& name, double value) {
    rep.row({inst, name, fmt(value), "-", "report"});
  }
};

void instance_rows(Summary& S, const InstanceResult& R, double tol, double grid_tol) {
  const std::string& n = R.name;
  S.check(n, "dual_gap", R.solve.gap, "<= 1e-8", R.solve.gap <= 1e-8);
  S.check(n, "speed_sandwich_worst", R.sandwich.worst, ">= -1e-6", R.sandwich.worst >= -1e-6);
  S.info(n, "speed_sandwich_pairs", double(R.sandwich.pairs));
  S.check(n, "speed_monotone_forward", R.speed_bounds.monotone_forward, ">= -1e-9",
          R.speed_bounds.monotone_forward >= -1e-9);
  S.check(n, "needle_reconstruction", R.reconstruction, "<= 1e-9", R.reconstruction <= 1e-9);
  const double cov_lim = std::max(tol, grid_tol);
  S.check(n, "cov_max_residual", R.cov.max_residual, "<= " + fmt(cov_lim), R.cov.max_residual <= cov_lim);
  const double skipped = R.cov.evaluated ? double(R.cov.skipped) / double(R.cov.evaluated) : 1.0;
  S.check(n, "cov_skipped_fraction", skipped, "<= 0.05", skipped <= 0.05);
  double conc = std::numeric_limits<double>::infinity(), prod = 0.0, chain = conc, geo = conc;
  bool ypass = true, chain_pass = true;
  std::size_t analysed = 0;
  for (const auto& A : R.analyses) {
    if (!A.z_ok) continue;
    ++analysed;
    conc = std::min(conc, A.ly.concavity_margin / A.ly.scale);
    prod = std::max(prod, A.ly.product_defect);
    ypass = ypass && A.ly.y_report.pass;
    chain = std::min(chain, A.chain.worst);
    chain_pass = chain_pass && A.chain.pass;
    geo = std::min(geo, A.third.worst_geomean);
  }
  S.info(n, "geodesics_analysed", double(analysed));
  S.info(n, "excluded_mass", R.ledger.excluded_mass);
  S.check(n, "z_inconsistent", double(R.z_inconsistent), "== 0", R.z_inconsistent == 0);
  S.check(n, "L_concavity_rel", conc, ">= -1e-6", conc >= -1e-6);
  S.check(n, "LY_product_defect", prod, "<= 1e-9", prod <= 1e-9);
  S.check(n, "Y_cd_density", ypass ? 1.0 : 0.0, "pass", ypass);
  S.check(n, "cd_chain_worst", chain, ">= -" + fmt(tol + grid_tol), chain_pass);
  S.check(n, "third_order_geomean", geo, ">= -" + fmt(tol), geo >= -tol);
}

}  // namespace

VerifySummary verify_all(const VerifyConfig& cfg) {
  VerifySummary out{CsvReport("verify-all", cfg.seed), true};
  auto& rep = out.report;
  rep.config("tol", fmt(cfg.tol));
  rep.config("radial_grid", std::to_string(cfg.n_radial) + "x" + std::to_string(cfg.n_angular));
  rep.config("q", fmt(cfg.q));
  rep.columns({"instance", "check", "value", "threshold", "verdict"});
  Summary S{rep};

  // Radial annulus transport.
  {
    const auto prob = radial_problem(cfg.n_radial, cfg.n_angular, cfg.q);
    InstanceOptions o;
    o.K = 0.0;
    o.N = 2.0;
    o.tol = cfg.tol;
    o.grid_tol = 0.02;
    o.seed = cfg.seed;
    o.keep = [&](const LedgerEntry& e) { return radial_keep(prob.space, e); };
    const auto R = run_instance(prob, o);
    const auto c = compare_radial(prob, R, oracle::Radial{2, cfg.q});
    for (auto [name, v] : {std::pair{"W_q^q", c.cost}, {"phi_c", c.phi_c}, {"rho_t", c.rho},
                           {"Phi_s^t", c.Phi}, {"dPhi", c.dPhi}, {"h", c.h}, {"density_ratio", c.ratio}})
      S.check("radial", std::string("oracle_rel_") + name, v, "<= 0.02", v <= 0.02);
    instance_rows(S, R, cfg.tol, 0.02);
  }
  // Unit-speed translation on the line, for several exponents.
  for (double p : {1.5, 2.0, 3.0}) {
    const auto prob = translation_problem(p);
    InstanceOptions o;
    o.K = 0.0;
    o.N = 1.0;
    o.tol = cfg.tol;
    o.seed = cfg.seed;
    const auto R = run_instance(prob, o);
    const std::string n = "translation_p" + fmt(p);
    auto Rn = R;
    Rn.name = n;
    instance_rows(S, Rn, cfg.tol, 0.0);
    const double tol = cd_tolerance(prob.space.spacing(), 1.0 / 50.0);
    const std::vector<double> np{1.0, 2.0, 5.0, 10.0};
    const auto flat = check_cdp(prob.space, R.nu, 0.0, 1.0, np, tol, R.solve.plan.degenerate);
    S.check(n, "cdp_K0", flat.worst, ">= -" + fmt(tol), flat.pass);
    const auto curved = check_cdp(prob.space, R.nu, 5.0, 1.0, np, tol, R.solve.plan.degenerate);
    S.check(n, "cdp_K5_fails", curved.worst, "< -" + fmt(tol), !curved.pass && !curved.witness.empty());
  }
  // Stretch on the line: binning aliases the density, reported only.
  {
    const auto prob = stretch_problem(2.0);
    InstanceOptions o;
    o.tol = cfg.tol;
    o.N = 1.0;
    o.seed = cfg.seed;
    const auto R = run_instance(prob, o);
    S.check("stretch", "speed_sandwich_worst", R.sandwich.worst, ">= -1e-6", R.sandwich.worst >= -1e-6);
    S.info("stretch", "cov_max_residual", R.cov.max_residual);
    S.info("stretch", "z_inconsistent", double(R.z_inconsistent));
  }
  // Exact-data stretch: equality in the ODE, L affine.
  {
    const auto syn = synthetic_stretch(0.125, 2.0, 50, 0.0, 2.0);
    S.check("synthetic_stretch", "L_affinity", syn.L_affinity, "<= 1e-6", syn.L_affinity <= 1e-6);
    S.check("synthetic_stretch", "third_order_ode", syn.third.worst_ode, "|.| <= 1e-6",
            std::abs(syn.third.worst_ode) <= 1e-6);
    S.check("synthetic_stretch", "third_order_geomean", syn.third.worst_geomean, ">= -" + fmt(cfg.tol),
            syn.third.worst_geomean >= -cfg.tol);
    S.check("synthetic_stretch", "LY_product_defect", syn.ly.product_defect, "<= 1e-9",
            syn.ly.product_defect <= 1e-9);
    S.check("synthetic_stretch", "Y_cd_density", syn.ly.y_report.worst, "pass", syn.ly.y_report.pass);
  }
  // sigma scaling identity over seeded draws.
  {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double K = -2.0 + 4.0 * U(rng), N = 1.5 + 8.5 * U(rng), theta = 0.05 + 0.95 * U(rng),
                   ell = 0.2 + 1.8 * U(rng), a = U(rng);
      worst = std::max(worst, sigma_scaling_defect(K, N, theta, ell, a));
    }
    S.check("distortion", "sigma_scaling_defect", worst, "<= 1e-12", worst <= 1e-12);
  }
  out.pass = S.pass;
  return out;
}

}  // namespace cdv
