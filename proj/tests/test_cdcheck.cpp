#include <cmath>
#include <numbers>

#include "cdv/cdcheck.hpp"
#include "cdv/error.hpp"
#include "cdv/transport.hpp"
#include "doctest.h"

using namespace cdv;

namespace {

DensityProfile1D power_profile(int n, double N, std::size_t bins) {
  DensityProfile1D pr;
  pr.N = N;
  for (std::size_t i = 0; i < bins; ++i) {
    double r = (i + 0.5) / double(bins);
    pr.grid.push_back(r);
    pr.h.push_back(std::pow(r, n - 1));
  }
  return pr;
}

struct LineInstance {
  Space space;
  DynamicalPlan nu;
};

LineInstance translation(double p) {
  auto s = sample_interval(100, 0.0, 1.0);
  std::vector<std::size_t> a, b;
  for (std::size_t i = 10; i < 30; ++i) a.push_back(i);
  for (std::size_t i = 60; i < 80; ++i) b.push_back(i);
  auto r = solve_wp(s, uniform_on(s, a), uniform_on(s, b), p);
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(k / 10.0);
  auto nu = dynamical_plan(s, r.plan, grid);
  return {std::move(s), std::move(nu)};
}

}  // namespace

TEST_CASE("Renyi entropy") {
  auto s = sample_interval(10, 0.0, 1.0);
  CHECK(renyi_entropy(s, Measure{s.weights()}, 3.0).value == doctest::Approx(1.0));
  std::vector<std::size_t> half{0, 1, 2, 3, 4};
  for (double N : {1.0, 2.0, 5.0})
    CHECK(renyi_entropy(s, uniform_on(s, half), N).value ==
          doctest::Approx(std::pow(2.0, -1.0 / N)));
  auto z = Space::euclidean({{0, {0.0}}, {1, {1.0}}, {2, {2.0}}}, {0.5, 0.5, 0.0});
  CHECK(renyi_entropy(z, dirac(z, 2), 2.0).value == 0.0);
  CHECK_THROWS_AS(renyi_entropy(s, Measure{s.weights()}, 0.5), Error);
}

TEST_CASE("1-D density r^{n-1} satisfies CD(0,N) exactly for N >= n") {
  for (int n : {2, 3, 5}) {
    for (double N : {double(n), n + 1.0, 2.0 * n})
      CHECK(check_density_1d(power_profile(n, N, 64), 1e-9).pass);
    auto bad = check_density_1d(power_profile(n, n - 0.5, 64), 1e-9);
    CHECK_FALSE(bad.pass);
    CHECK_FALSE(bad.witness.empty());
    // The log form is a finite-difference check: N = n is an equality case at grid
    // level, so test with slack on either side.
    CHECK(check_kn_convexity(power_profile(n, n + 1.0, 64), 1e-6).pass);
    CHECK_FALSE(check_kn_convexity(power_profile(n, n - 0.5, 64), 1e-6).pass);
  }
}

TEST_CASE("cos^{N-1} is the CD(N-1,N) equality case") {
  for (double N : {2.0, 3.0, 4.5}) {
    DensityProfile1D pr;
    pr.N = N;
    pr.K0 = N - 1.0;
    const std::size_t bins = 256;
    for (std::size_t i = 0; i < bins; ++i) {
      double x = -std::numbers::pi / 2 + std::numbers::pi * (i + 0.5) / bins;
      pr.grid.push_back(x);
      pr.h.push_back(std::pow(std::cos(x), N - 1.0));
    }
    auto r = check_density_1d(pr, 1e-9);
    CHECK(r.pass);
    CHECK(std::abs(r.worst) <= 1e-4);
    // More curvature than the profile carries must fail.
    pr.K0 = 1.5 * (N - 1.0);
    CHECK_FALSE(check_density_1d(pr, 1e-9).pass);
  }
}

TEST_CASE("N = 1 admits only constant densities") {
  DensityProfile1D pr{{0.1, 0.2, 0.3}, {1.0, 1.0, 1.0}, 0.0, 1.0};
  CHECK(check_density_1d(pr, 1e-12).pass);
  pr.h[1] = 1.1;
  CHECK_FALSE(check_density_1d(pr, 1e-12).pass);
}

TEST_CASE("profile validation") {
  DensityProfile1D pr{{0.1, 0.05, 0.3}, {1.0, 1.0, 1.0}, 0.0, 2.0};
  CHECK_THROWS_AS(check_density_1d(pr, 1e-9), Error);
  pr.grid = {0.1, 0.2, 0.3};
  pr.h = {1.0, -1.0, 1.0};
  CHECK_THROWS_AS(check_density_1d(pr, 1e-9), Error);
}

TEST_CASE("flat line: CD_p(0,N) holds, K = 5 fails") {
  for (double p : {1.5, 2.0, 3.0}) {
    auto inst = translation(p);
    std::vector<double> nps{1.0, 2.0, 5.0, 10.0};
    auto ok = check_cdp(inst.space, inst.nu, 0.0, 1.0, nps, 1e-9);
    CHECK(ok.pass);
    CHECK(ok.worst >= -1e-9);
    auto bad = check_cdp(inst.space, inst.nu, 5.0, 1.0, nps, 1e-9);
    CHECK_FALSE(bad.pass);
    CHECK_FALSE(bad.witness.empty());
    CHECK_FALSE(bad.inconclusive);
    auto deg = check_cdp(inst.space, inst.nu, 5.0, 1.0, nps, 1e-9, true);
    CHECK(deg.inconclusive);
    CHECK(deg.verdict() == "plan-FAIL (inconclusive)");
    std::vector<double> low{0.5};
    CHECK_THROWS_AS(check_cdp(inst.space, inst.nu, 0.0, 1.0, low, 1e-9), Error);
  }
}

TEST_CASE("identical marginals give the K = 0 equality case") {
  auto s = sample_interval(20, 0.0, 1.0);
  std::vector<std::size_t> a{3, 4, 5, 6};
  auto mu = uniform_on(s, a);
  auto r = solve_wp(s, mu, mu, 2.0);
  std::vector<double> grid{0.0, 0.5, 1.0};
  auto nu = dynamical_plan(s, r.plan, grid);
  std::vector<double> nps{2.0};
  auto rep = check_cdp(s, nu, 0.0, 2.0, nps, 1e-12);
  CHECK(rep.pass);
  CHECK(std::abs(rep.worst) <= 1e-12);
}

TEST_CASE("density ratio bounds on the translation") {
  auto inst = translation(2.0);
  std::vector<DensitySnapshot> snaps;
  for (std::size_t k = 0; k < inst.nu.grid.size(); ++k)
    snaps.push_back(interpolate_density(inst.space, inst.nu, k));
  CHECK(check_density_ratio_bounds(inst.space, inst.nu, snaps, 0.0, 1.0, 1e-9).pass);
}

TEST_CASE("MCP on the plane: N = 2 holds, N = 1.5 fails") {
  auto s = sample_lattice_disc(0.05, 1.0);
  std::size_t o = s.nearest(std::vector<double>{0.0, 0.0});
  std::vector<std::size_t> A;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.distance(i, o) <= 0.5) A.push_back(i);
  std::vector<double> ts{0.0, 0.25, 0.5};
  auto ok = check_mcp(s, A, o, 0.0, 2.0, ts);
  CHECK(ok.pass);
  auto bad = check_mcp(s, A, o, 0.0, 1.5, ts);
  CHECK_FALSE(bad.pass);
  CHECK(bad.worst_t == doctest::Approx(0.5));
}

TEST_CASE("tolerance helpers") {
  CHECK(cd_tolerance(0.01, 0.02) == doctest::Approx(0.003));
  CHECK(nprime_ladder(2.0) == std::vector<double>{2.0, 3.0, 4.0, 20.0});
}
