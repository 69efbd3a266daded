#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cdv/error.hpp"
#include "cdv/network_simplex.hpp"
#include "cdv/oracles.hpp"
#include "cdv/transport.hpp"
#include "doctest.h"

using namespace cdv;

namespace {

Space points_1d(const std::vector<double>& xs) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < xs.size(); ++i) pts.push_back({int(i), {xs[i]}});
  return Space::euclidean(pts, std::vector<double>(xs.size(), 1.0), true);
}

Measure on(const Space& s, std::vector<std::size_t> ids) { return uniform_on(s, ids); }

}  // namespace

TEST_CASE("dirac to dirac") {
  auto s = points_1d({0.0, 0.3, 1.0});
  auto r = solve_wp(s, dirac(s, 0), dirac(s, 2), 2.0);
  REQUIRE(r.plan.atoms.size() == 1);
  CHECK(r.plan.atoms[0].source == 0);
  CHECK(r.plan.atoms[0].target == 2);
  CHECK(r.plan.wasserstein() == doctest::Approx(1.0));
}

TEST_CASE("identical marginals cost nothing") {
  auto s = points_1d({0.0, 0.3, 1.0});
  auto mu = on(s, {0, 1, 2});
  auto r = solve_wp(s, mu, mu, 3.0);
  CHECK(r.plan.wasserstein() == doctest::Approx(0.0));
  for (const auto& a : r.plan.atoms) CHECK(a.source == a.target);
}

TEST_CASE("four-point instance matches all 24 permutation plans") {
  auto s = Space::euclidean({{0, {0.0, 0.0}}, {1, {1.0, 0.0}}, {2, {0.0, 2.0}}, {3, {3.0, 1.0}},
                             {4, {1.5, 1.5}}, {5, {-1.0, 2.5}}, {6, {2.0, -1.0}}, {7, {0.5, 3.0}}},
                            std::vector<double>(8, 1.0), true);
  auto mu0 = on(s, {0, 1, 2, 3}), mu1 = on(s, {4, 5, 6, 7});
  for (double p : {1.5, 2.0, 3.0}) {
    std::vector<std::vector<double>> c(4, std::vector<double>(4));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) c[i][j] = std::pow(s.distance(i, 4 + j), p) / 4.0;
    auto r = solve_wp(s, mu0, mu1, p);
    CHECK(r.plan.total_cost == doctest::Approx(oracle::brute_force_assignment(c)).epsilon(1e-12));
    CHECK(std::abs(r.gap) <= 1e-8);
    auto cert = certify(s, r.potentials, r.plan);
    CHECK(cert.feasibility <= 1e-9);
    CHECK(cert.slackness <= 1e-9);
  }
}

TEST_CASE("equal-mass atoms on the line follow the monotone rearrangement") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> xs(10);
    for (double& x : xs) x = U(rng);
    auto s = points_1d(xs);
    auto mu0 = on(s, {0, 1, 2, 3, 4}), mu1 = on(s, {5, 6, 7, 8, 9});
    for (double p : {1.5, 2.0, 3.0}) {
      auto r = solve_wp(s, mu0, mu1, p);
      double ref = oracle::monotone_rearrangement_cost({xs.begin(), xs.begin() + 5},
                                                       {xs.begin() + 5, xs.end()}, p);
      CHECK(r.plan.total_cost == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("network simplex on a textbook transportation problem") {
  NetworkSimplex ns({20, 30, 25}, {10, 35, 30}, {8, 6, 10, 9, 12, 13, 14, 9, 16});
  auto r = ns.run();
  // Checked against an independent exhaustive integer enumeration below.
  double best = 1e300;
  for (int a = 0; a <= 20; ++a)
    for (int b = 0; a + b <= 20; ++b) {
      int c = 20 - a - b;
      for (int d = 0; d <= 30; ++d)
        for (int e = 0; d + e <= 30; ++e) {
          int f = 30 - d - e;
          int g = 10 - a - d, h = 35 - b - e, i = 30 - c - f;
          if (g < 0 || h < 0 || i < 0 || g + h + i != 25) continue;
          double v = 8 * a + 6 * b + 10 * c + 9 * d + 12 * e + 13 * f + 14 * g + 9 * h + 16 * i;
          best = std::min(best, v);
        }
    }
  CHECK(r.cost == doctest::Approx(best));
  CHECK(r.artificial_flow < 1e-12);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (r.flow[i * 3 + j] > 0) {
        double c = std::vector<double>{8, 6, 10, 9, 12, 13, 14, 9, 16}[i * 3 + j];
        CHECK(c + r.source_pi[i] - r.sink_pi[j] == doctest::Approx(0.0).epsilon(1e-12));
      }
}

TEST_CASE("c-transform") {
  auto s = points_1d({0.0, 0.5, 1.0, 2.0});
  std::vector<double> zero(4, 0.0);
  for (double v : c_transform(s, zero, 2.0)) CHECK(v == doctest::Approx(0.0));
  // A c-concave potential is recovered by the double transform.
  std::vector<double> phi{0.0, -0.25, -0.5, -1.0};  // -x/2: translation by 0.5 with p = 2
  auto phic = c_transform(s, phi, 2.0);
  auto back = c_transform(s, phic, 2.0);
  for (int i = 0; i < 4; ++i) CHECK(back[i] == doctest::Approx(phi[i]).epsilon(1e-14));
  std::vector<double> psi{0.0, std::numeric_limits<double>::infinity(), 0.0, 0.0};
  // Point 1 is outside the domain of psi, so its own term is skipped.
  CHECK(c_transform(s, psi, 2.0)[1] == doctest::Approx(0.125));
}

TEST_CASE("dynamical plan and interpolated densities") {
  auto s = sample_interval(20, 0.0, 1.0);
  std::vector<std::size_t> a{0, 1, 2, 3}, b{10, 11, 12, 13};
  auto mu0 = on(s, a), mu1 = on(s, b);
  auto r = solve_wp(s, mu0, mu1, 2.0);
  std::vector<double> grid{0.0, 0.5, 1.0};
  auto nu = dynamical_plan(s, r.plan, grid);
  CHECK(nu.size() == 4);
  for (const auto& g : nu.geodesics) CHECK(g.length == doctest::Approx(0.5));
  auto d0 = interpolate_density(s, nu, 0);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(d0.mu.weights[i] == doctest::Approx(mu0.weights[i]));
  auto d1 = interpolate_density(s, nu, 2);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(d1.mu.weights[i] == doctest::Approx(mu1.weights[i]));
  auto dh = interpolate_density(s, nu, 1);
  CHECK(dh.mu.weights[5] == doctest::Approx(0.25));
  CHECK(dh.rho[5] == doctest::Approx(5.0));
  CHECK(kantorovich_residual(s, nu, r.potentials) < 1e-12);
}

TEST_CASE("solver rejects mismatched inputs") {
  auto s = points_1d({0.0, 1.0});
  Measure bad{{0.5}};
  CHECK_THROWS_AS(solve_wp(s, bad, dirac(s, 0), 2.0), Error);
  Measure heavy{{0.9, 0.9}};
  CHECK_THROWS_AS(solve_wp(s, heavy, dirac(s, 0), 2.0), Error);
  CHECK_THROWS_AS(solve_wp(s, dirac(s, 0), dirac(s, 1), 0.5), Error);
}

TEST_CASE("degeneracy flag on a tie") {
  // Two atoms swapped across a symmetric square: both pairings cost the same.
  auto s = Space::euclidean({{0, {0.0, 0.0}}, {1, {1.0, 1.0}}, {2, {1.0, 0.0}}, {3, {0.0, 1.0}}},
                            {1, 1, 1, 1}, true);
  auto r = solve_wp(s, on(s, {0, 1}), on(s, {2, 3}), 2.0);
  CHECK(r.plan.degenerate);
  auto t = solve_wp(s, dirac(s, 0), dirac(s, 2), 2.0);
  CHECK_FALSE(t.plan.degenerate);
}
