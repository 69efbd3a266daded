#include <cmath>
#include <random>

#include "cdv/changevar.hpp"
#include "cdv/error.hpp"
#include "doctest.h"

using namespace cdv;

namespace {

// rho(t) = 1/(1+t), unit needle profile: z(t) = -1/(1+t).
LedgerEntry stretch_entry(std::size_t steps) {
  LedgerEntry e;
  e.length = 1.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    double t = double(k) / double(steps);
    e.t.push_back(t);
    e.rho.push_back(1.0 / (1.0 + t));
    e.bins.push_back(k);
    e.speed.push_back(1.0);
  }
  return e;
}

}  // namespace

TEST_CASE("z from a density and a needle profile") {
  auto e = stretch_entry(20);
  std::vector<double> h(e.t.size(), 1.0);
  for (std::size_t ks : {5u, 10u}) {
    auto z = z_for_s(e, ks, h);
    CHECK(std::isnan(z[ks]));
    CHECK(std::isnan(z.front()));
    CHECK(std::isnan(z.back()));
    for (std::size_t k = 1; k + 1 < z.size(); ++k)
      if (k != ks) CHECK(z[k] == doctest::Approx(-1.0 / (1.0 + e.t[k])).epsilon(1e-12));
  }
}

TEST_CASE("z extraction across s") {
  std::map<std::size_t, std::vector<double>> per_s;
  per_s[1] = {NAN, 1.0, 2.0};
  per_s[2] = {NAN, 1.0 + 1e-8, NAN};
  auto z = extract_z(per_s, 1e-6);
  CHECK(std::isnan(z.z[0]));
  CHECK(z.z[1] == doctest::Approx(1.0 + 0.5e-8));
  CHECK(z.z[2] == 2.0);
  per_s[2][1] = 1.1;
  CHECK_THROWS_AS(extract_z(per_s, 1e-6), Error);
  per_s.erase(2);
  CHECK_THROWS_AS(extract_z(per_s, 1e-6), Error);
}

TEST_CASE("L Y factorisation of the stretch: L affine, Y constant") {
  std::vector<double> t, rho, z;
  for (int k = 0; k <= 50; ++k) {
    double tt = k / 50.0;
    t.push_back(tt);
    rho.push_back(2.0 / (1.0 + tt));
    z.push_back(-1.0 / (1.0 + tt));
  }
  // Fourth-order quadrature at h = 0.02: L is exact to ~1e-7.
  auto f = ly_factorize(t, rho, z, 0.0, 2.0, 1.0, 0.5, 1e-6);
  CHECK(f.t.size() == 49);
  CHECK(f.r0 == doctest::Approx(0.5));
  for (std::size_t k = 0; k < f.t.size(); ++k) {
    CHECK(f.L[k] == doctest::Approx((1.0 + f.t[k]) / 1.5).epsilon(1e-6));
    CHECK(f.Y[k] == doctest::Approx(0.75).epsilon(1e-6));
  }
  CHECK(f.product_defect <= 1e-12);
  CHECK(std::abs(f.concavity_margin) <= 1e-6);
  CHECK(f.y_report.pass);
  z[10] = NAN;
  CHECK_THROWS_AS(ly_factorize(t, rho, z, 0.0, 2.0, 1.0, 0.5, 1e-6), Error);
}

TEST_CASE("CD chain along a geodesic") {
  std::vector<double> t;
  for (int k = 0; k <= 20; ++k) t.push_back(k / 20.0);
  auto make = [&](double power) {
    std::vector<double> rho;
    for (double tt : t) rho.push_back(1.0 / std::pow(1.5 + 2.0 * tt, power));
    return rho;
  };
  // Planar radial density: rho^{-1/2} = sqrt(1.5 + 2t) is concave.
  CHECK(cd_chain_verify(t, make(1.0), 0.0, 2.0, 2.0, 1e-12).pass);
  // rho^{-1/N} affine at N = 1: equality.
  auto eq = cd_chain_verify(t, make(1.0), 0.0, 1.0, 2.0, 1e-12);
  CHECK(eq.pass);
  CHECK(std::abs(eq.worst) <= 1e-12);
  // rho^{-1/2} = (1.5 + 2t)^{1.5} is convex.
  auto bad = cd_chain_verify(t, make(3.0), 0.0, 2.0, 2.0, 1e-9);
  CHECK_FALSE(bad.pass);
  CHECK_FALSE(bad.witness.empty());
  // Negative curvature relaxes the affine case, positive curvature breaks it.
  CHECK(cd_chain_verify(t, make(2.0), -1.0, 2.0, 2.0, 1e-12).pass);
  CHECK_FALSE(cd_chain_verify(t, make(2.0), 1.0, 2.0, 2.0, 1e-9).pass);
}

TEST_CASE("sigma scaling identity") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> K(-2, 2), N(1.5, 10), th(0.05, 1), ell(0.2, 2), a(0, 1);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i)
    worst = std::max(worst, sigma_scaling_defect(K(rng), N(rng), th(rng), ell(rng), a(rng)));
  CHECK(worst <= 1e-12);
  CHECK(sigma_scaling_defect(100.0, 1.0, 1.0, 1.0, 0.5) == 0.0);  // both infinite
}

TEST_CASE("endpoint density") {
  // Linear extrapolation of the interior samples is kept when it does not undershoot.
  CHECK(endpoint_density(0.1, 1.1, 0.2, 1.2, 0.0, 1.0, 1e-9) == doctest::Approx(1.0));
  CHECK(endpoint_density(0.1, 1.1, 0.2, 1.3, 0.0, 1.0, 1e-9) == doctest::Approx(1.0));
  CHECK(endpoint_density(0.1, 1.3, 0.2, 1.2, 0.0, 1.0, 1e-9) == doctest::Approx(1.4));
}

TEST_CASE("change of variables on exact data") {
  auto e = stretch_entry(20);
  PropagatedPotential P;
  P.s = 0.5;
  P.times = e.t;
  // d_t Phi = ell^p; with h = rho_s/rho_t the identity holds exactly.
  P.dPhi.assign(e.t.size(), std::vector<double>(e.t.size(), 1.0));
  const std::size_t ks = 10;
  std::vector<double> h(e.t.size());
  for (std::size_t k = 0; k < h.size(); ++k) h[k] = e.rho[ks] / e.rho[k];
  auto r = change_of_variables_residual(e, ks, h, P, 2.0);
  CHECK(r.evaluated == 18);
  CHECK(r.skipped == 0);
  CHECK(r.max_residual <= 1e-14);
  h[3] = NAN;
  auto r2 = change_of_variables_residual(e, ks, h, P, 2.0);
  CHECK(r2.skipped == 1);
  r.merge(r2);
  CHECK(r.evaluated == 36);
}
