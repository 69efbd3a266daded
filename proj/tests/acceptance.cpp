// Acceptance run: one PASS/FAIL line per criterion. Every threshold is pinned here.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cdv/cdcheck.hpp"
#include "cdv/changevar.hpp"
#include "cdv/hopflax.hpp"
#include "cdv/needle.hpp"
#include "cdv/oracles.hpp"
#include "cdv/pipeline.hpp"
#include "cdv/transport.hpp"

using namespace cdv;

namespace {

constexpr double kTol = 1e-6;            // generic numerical tolerance
constexpr double kRadialRel = 0.02;      // grid-limited radial comparisons
constexpr double kRadialSeconds = 60.0;
constexpr double kLpAbs = 1e-9;
constexpr double kDualGap = 1e-8;
constexpr double kLpSeconds = 10.0;
constexpr double kHopfLaxC = 10.0;       // |FD - law| <= C h
constexpr double kHopfLaxOrder = 0.9;
constexpr double kSandwich = -1e-6;
constexpr double kCosMargin = 1e-4;
constexpr double kSkipped = 0.05;
constexpr double kConcavityRel = 1e-6;
constexpr double kProduct = 1e-9;
constexpr double kAffine = 1e-6;
constexpr double kOde = 1e-6;
constexpr double kScaling = 1e-12;
constexpr double kReconstruction = 1e-9;
constexpr double kDiscRel = 0.01;
constexpr std::uint64_t kSeed = 20240611;

constexpr double kInf = std::numeric_limits<double>::infinity();

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Corpus {
  Problem radial_prob = radial_problem(50, 64, 2.0);
  InstanceResult radial;
  double radial_seconds = 0.0;
  std::vector<InstanceResult> translation;  // p = 1.5, 2, 3
  std::vector<Problem> translation_probs;
  InstanceResult stretch;
};

Corpus build_corpus() {
  const auto t0 = std::chrono::steady_clock::now();
  Corpus c;  // generates the radial problem
  {
    InstanceOptions o;
    o.N = 2.0;
    o.tol = kTol;
    o.grid_tol = kRadialRel;
    o.seed = kSeed;
    const Space& sp = c.radial_prob.space;
    o.keep = [&sp](const LedgerEntry& e) { return radial_keep(sp, e); };
    c.radial = run_instance(c.radial_prob, o);
    c.radial_seconds = seconds_since(t0);
  }
  for (double p : {1.5, 2.0, 3.0}) {
    c.translation_probs.push_back(translation_problem(p));
    InstanceOptions o;
    o.N = 1.0;
    o.tol = kTol;
    o.seed = kSeed;
    c.translation.push_back(run_instance(c.translation_probs.back(), o));
  }
  {
    InstanceOptions o;
    o.N = 1.0;
    o.tol = kTol;
    o.seed = kSeed;
    c.stretch = run_instance(stretch_problem(2.0), o);
  }
  return c;
}

void criterion1(const Corpus& c) {
  const auto cmp = compare_radial(c.radial_prob, c.radial, oracle::Radial{2, 2.0});
  const double worst =
      std::max({cmp.cost, cmp.phi_c, cmp.rho, cmp.Phi, cmp.h, cmp.ratio, cmp.dPhi});
  const bool ok = worst <= kRadialRel && cmp.samples > 0 && c.radial_seconds <= kRadialSeconds;
  report(1, ok,
         "radial 50x64 q=2: rel err W=" + num(cmp.cost) + " phi_c=" + num(cmp.phi_c) +
             " rho=" + num(cmp.rho) + " Phi=" + num(cmp.Phi) + " h=" + num(cmp.h) +
             " ratio=" + num(cmp.ratio) + " dPhi=" + num(cmp.dPhi) + " (<= 0.02), " +
             num(c.radial_seconds) + " s (<= 60)");
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double ps[] = {1.5, 2.0, 3.0};
  double worst = 0.0, gap = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    const int n = 1 + int(rng() % 6);
    const double p = ps[inst % 3];
    std::vector<Point> pts;
    for (int i = 0; i < 2 * n; ++i) pts.push_back({i, {U(rng), U(rng)}});
    const auto s = Space::euclidean(pts, std::vector<double>(2 * n, 1.0), true);
    std::vector<std::size_t> a, b;
    for (int i = 0; i < n; ++i) a.push_back(i), b.push_back(n + i);
    const auto r = solve_wp(s, uniform_on(s, a), uniform_on(s, b), p);
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cost[i][j] = std::pow(s.distance(i, n + j), p) / n;
    worst = std::max(worst, std::abs(r.plan.total_cost - oracle::brute_force_assignment(cost)));
    gap = std::max(gap, std::abs(r.gap));
  }
  const double secs = seconds_since(t0);
  report(2, worst <= kLpAbs && gap <= kDualGap && secs <= kLpSeconds,
         "200 random LPs: |LP - brute force| = " + num(worst) + " (<= 1e-9), dual gap " +
             num(gap) + " (<= 1e-8), " + num(secs) + " s (<= 10)");
}

void criterion3() {
  // 20 random fields on random planar clouds, 3 exponents. Samples sit at times where
  // the argmin is unique and unchanged over the widest stencil.
  const std::vector<double> hs{0.02, 0.01, 0.005, 0.0025};
  std::vector<double> E(hs.size(), 0.0);
  std::size_t samples = 0;
  std::mt19937_64 rng(kSeed + 3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int field = 0; field < 20; ++field) {
    std::vector<Point> pts;
    std::vector<double> f;
    for (int i = 0; i < 30; ++i) {
      pts.push_back({i, {U(rng), U(rng)}});
      f.push_back(0.5 * U(rng));
    }
    const auto s = Space::euclidean(pts, std::vector<double>(30, 1.0), true);
    for (double p : {1.5, 2.0, 3.0}) {
      HopfLax hl(s, p);
      for (std::size_t x = 0; x < 5; ++x) {
        double t = -1.0;
        for (double cand = 0.3; cand <= 0.9 + 1e-12; cand += 0.05) {
          const auto a = hl.at_point(x, f, cand - 2.0 * hs[0]).argmins;
          const auto m = hl.at_point(x, f, cand).argmins;
          const auto b = hl.at_point(x, f, cand + 2.0 * hs[0]).argmins;
          if (m.size() == 1 && a == m && b == m) { t = cand; break; }
        }
        if (t < 0.0) continue;
        ++samples;
        for (std::size_t k = 0; k < hs.size(); ++k) {
          const auto d = time_derivative_check(hl, f, x, t, hs[k]);
          E[k] = std::max({E[k], std::abs(d.left - d.predicted_left),
                           std::abs(d.right - d.predicted_right)});
        }
      }
    }
  }
  bool bounded = samples > 0;
  for (std::size_t k = 0; k < hs.size(); ++k) bounded = bounded && E[k] <= kHopfLaxC * hs[k];
  // Least-squares slope of log E against log h over the levels above roundoff.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 0; k < hs.size(); ++k)
    if (E[k] > 1e-11) {
      const double lx = std::log(hs[k]), ly = std::log(E[k]);
      sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, ++m;
    }
  const double order = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : kInf;
  report(3, bounded && order >= kHopfLaxOrder,
         "Hopf-Lax derivative law, " + std::to_string(samples) + " samples: max err " +
             num(E.front()) + " @h=0.02 .. " + num(E.back()) + " @h=0.0025 (<= 10 h), order " +
             num(order) + " (>= 0.9)");
}

void criterion4(const Corpus& c) {
  double worst = kInf;
  std::size_t pairs = 0;
  auto take = [&](const InstanceResult& r) {
    worst = std::min(worst, r.sandwich.worst);
    pairs += r.sandwich.pairs;
  };
  take(c.radial);
  for (const auto& r : c.translation) take(r);
  take(c.stretch);
  report(4, worst >= kSandwich && pairs > 0,
         "speed sandwich over " + std::to_string(pairs) + " pairs on 5 instances: worst margin " +
             num(worst) + " (>= -1e-6)");
}

void criterion5() {
  bool ok = true;
  for (int n : {2, 3, 5}) {
    auto profile = [&](double N) {
      DensityProfile1D pr;
      pr.N = N;
      for (int i = 0; i < 256; ++i) {
        const double r = (i + 0.5) / 256.0;
        pr.grid.push_back(r);
        pr.h.push_back(std::pow(r, n - 1));
      }
      return pr;
    };
    for (double N : {double(n), n + 1.0, 2.0 * n}) ok = ok && check_density_1d(profile(N), 1e-9).pass;
    ok = ok && !check_density_1d(profile(n - 0.5), 1e-9).pass;
  }
  double cos_worst = 0.0;
  for (double N : {2.0, 3.0, 5.0}) {
    DensityProfile1D pr;
    pr.N = N;
    pr.K0 = N - 1.0;
    for (int i = 0; i < 256; ++i) {
      const double x = -std::numbers::pi / 2 + std::numbers::pi * (i + 0.5) / 256.0;
      pr.grid.push_back(x);
      pr.h.push_back(std::pow(std::cos(x), N - 1.0));
    }
    const auto r = check_density_1d(pr, kCosMargin);
    ok = ok && r.pass;
    cos_worst = std::max(cos_worst, std::abs(r.worst));
  }
  ok = ok && cos_worst <= kCosMargin;
  report(5, ok,
         "r^{n-1} passes N in {n,n+1,2n}, fails n-0.5 (n=2,3,5); cos^{N-1} |margin| " +
             num(cos_worst) + " (<= 1e-4) at 256 bins");
}

void criterion6(const Corpus& c) {
  bool ok = true;
  double worst_pass = kInf, worst_fail = -kInf;
  const std::vector<double> np{1.0, 2.0, 5.0, 10.0};
  for (std::size_t i = 0; i < c.translation.size(); ++i) {
    const auto& prob = c.translation_probs[i];
    const auto& r = c.translation[i];
    const double tol = cd_tolerance(prob.space.spacing(), 1.0 / 50.0);
    const auto flat = check_cdp(prob.space, r.nu, 0.0, 1.0, np, tol, r.solve.plan.degenerate);
    const auto curved = check_cdp(prob.space, r.nu, 5.0, 1.0, np, tol, r.solve.plan.degenerate);
    ok = ok && flat.pass && !curved.pass && !curved.inconclusive && !curved.witness.empty();
    worst_pass = std::min(worst_pass, flat.worst);
    worst_fail = std::max(worst_fail, curved.worst);
  }
  report(6, ok,
         "flat line CD_p, p=1.5,2,3: K=0 worst margin " + num(worst_pass) +
             " (>= -tol), K=5 worst margin " + num(worst_fail) + " (FAIL with witness)");
}

double skipped_fraction(const ChangeOfVariablesReport& r) {
  return r.evaluated ? double(r.skipped) / double(r.evaluated) : 1.0;
}

void criterion7(const Corpus& c) {
  double line = 0.0, line_skip = 0.0;
  for (const auto& r : c.translation) {
    line = std::max(line, r.cov.max_residual);
    line_skip = std::max(line_skip, skipped_fraction(r.cov));
  }
  const double rad = c.radial.cov.max_residual, rad_skip = skipped_fraction(c.radial.cov);
  const bool ok = rad <= kRadialRel && line <= kTol && rad_skip <= kSkipped &&
                  line_skip <= kSkipped && c.radial.cov.evaluated > 0;
  report(7, ok,
         "change of variables: radial max residual " + num(rad) + " (<= 0.02), skipped " +
             num(rad_skip) + "; line max residual " + num(line) + " (<= 1e-6), skipped " +
             num(line_skip) + " (<= 0.05)");
}

struct LYSummary {
  double concavity = kInf, product = 0.0;
  bool y_pass = true, chain_pass = true;
  double chain = kInf, geomean = kInf;
  std::size_t analysed = 0;
};

LYSummary summarize(const InstanceResult& r) {
  LYSummary s;
  for (const auto& A : r.analyses) {
    if (!A.z_ok) continue;
    ++s.analysed;
    s.concavity = std::min(s.concavity, A.ly.concavity_margin / A.ly.scale);
    s.product = std::max(s.product, A.ly.product_defect);
    s.y_pass = s.y_pass && A.ly.y_report.pass;
    s.chain_pass = s.chain_pass && A.chain.pass;
    s.chain = std::min(s.chain, A.chain.worst);
    s.geomean = std::min(s.geomean, A.third.worst_geomean);
  }
  return s;
}

void criterion8(const Corpus& c, const SyntheticStretch& syn) {
  bool ok = true;
  double conc = kInf, prod = 0.0;
  std::size_t analysed = 0;
  auto take = [&](const InstanceResult& r) {
    const auto s = summarize(r);
    ok = ok && s.analysed > 0 && r.z_inconsistent == 0 && s.y_pass;
    conc = std::min(conc, s.concavity);
    prod = std::max(prod, s.product);
    analysed += s.analysed;
  };
  take(c.radial);
  for (const auto& r : c.translation) take(r);
  ok = ok && conc >= -kConcavityRel && prod <= kProduct && syn.L_affinity <= kAffine;
  report(8, ok,
         "L.Y on " + std::to_string(analysed) + " geodesics: L concavity/scale " + num(conc) +
             " (>= -1e-6), |LY rho - 1| " + num(prod) + " (<= 1e-9), Y passes CD(K l^2,N); "
             "synthetic L affine to " + num(syn.L_affinity) + " (<= 1e-6)");
}

void criterion9(const Corpus& c, const SyntheticStretch& syn) {
  double geo = kInf;
  geo = std::min(geo, summarize(c.radial).geomean);
  for (const auto& r : c.translation) geo = std::min(geo, summarize(r).geomean);
  const bool ok = geo >= -kTol && syn.third.worst_geomean >= -kTol &&
                  std::abs(syn.third.worst_ode) <= kOde;
  report(9, ok,
         "geomean margin on PASS instances " + num(geo) + " (>= -1e-6); synthetic equality ODE "
         "margin " + num(syn.third.worst_ode) + " (|.| <= 1e-6)");
}

void criterion10(const Corpus& c) {
  bool ok = true;
  double chain = kInf;
  auto take = [&](const InstanceResult& r) {
    const auto s = summarize(r);
    ok = ok && s.chain_pass;
    chain = std::min(chain, s.chain);
  };
  take(c.radial);
  for (const auto& r : c.translation) take(r);
  std::mt19937_64 rng(kSeed + 10);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double K = -2.0 + 4.0 * U(rng), N = 1.5 + 8.5 * U(rng), th = 0.05 + 0.95 * U(rng),
                 ell = 0.2 + 1.8 * U(rng), a = U(rng);
    worst = std::max(worst, sigma_scaling_defect(K, N, th, ell, a));
  }
  ok = ok && worst <= kScaling;
  report(10, ok,
         "CD chain worst relative margin " + num(chain) + " (>= -tol per instance); sigma "
         "scaling defect over 1e4 draws " + num(worst) + " (<= 1e-12)");
}

void criterion11(const Corpus& c) {
  double recon = std::max(c.radial.reconstruction, 0.0);
  for (const auto& r : c.translation) recon = std::max(recon, r.reconstruction);
  // Unit disc, u = |x|: h(r) = 2r per polar ray.
  double disc = 0.0;
  {
    const auto s = sample_disc(64, 32, 0.0, 1.0);
    std::vector<double> u(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) u[i] = std::hypot(s.coords(i)[0], s.coords(i)[1]);
    const auto st = build_transport_structure(s, u);
    auto rd = extract_rays(s, st);
    disintegrate(s, rd, 32);
    recon = std::max(recon, reconstruction_residual(s, st, rd));
    for (const auto& ray : rd.rays)
      for (std::size_t k = 0; k < ray.h.size(); ++k) {
        // Arclength runs from the first point of the ray, at radius u of that point.
        const double r = u[ray.points.front()] + ray.lo + (k + 0.5) * ray.bin_width();
        disc = std::max(disc, std::abs(ray.h[k] - 2.0 * r) / (2.0 * r));
      }
    if (rd.rays.empty()) disc = kInf;
  }
  // Branch-set mass of u = |x| on the lattice disc under 2x refinement.
  std::vector<double> branch;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto s = sample_lattice_disc(h, 1.0);
    std::vector<double> u(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) u[i] = std::hypot(s.coords(i)[0], s.coords(i)[1]);
    branch.push_back(build_transport_structure(s, u).branch_mass);
  }
  const bool decreasing = branch[1] < branch[0] && branch[2] < branch[1];
  report(11, recon <= kReconstruction && disc <= kDiscRel && decreasing,
         "needle reconstruction " + num(recon) + " (<= 1e-9); unit disc h=2r rel err " +
             num(disc) + " (<= 0.01) at 32 bins; branch mass " + num(branch[0]) + " > " +
             num(branch[1]) + " > " + num(branch[2]));
}

void criterion12() {
  VerifyConfig cfg;
  cfg.seed = kSeed;
  const auto a = verify_all(cfg).report.str();
  const auto b = verify_all(cfg).report.str();
  report(12, a == b && !a.empty(),
         "verify-all twice with seed " + std::to_string(kSeed) + ": " +
             (a == b ? "byte-identical" : "outputs differ") + " (" + std::to_string(a.size()) +
             " bytes)");
}

}  // namespace

int main() {
  try {
    const auto corpus = build_corpus();
    const auto syn = synthetic_stretch(0.125, 2.0, 50, 0.0, 2.0);
    criterion1(corpus);
    criterion2();
    criterion3();
    criterion4(corpus);
    criterion5();
    criterion6(corpus);
    criterion7(corpus);
    criterion8(corpus, syn);
    criterion9(corpus, syn);
    criterion10(corpus);
    criterion11(corpus);
    criterion12();
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d of 12 criteria failed\n", failures);
  return failures ? 1 : 0;
}
