#include <cmath>
#include <numbers>
#include <random>

#include "cdv/distortion.hpp"
#include "cdv/error.hpp"
#include "doctest.h"

using namespace cdv;

namespace {

// Independent evaluation straight from the trigonometric quotients.
double sigma_ref(double K, double N, double t, double th) {
  if (K == 0.0 || th == 0.0) return t;
  double x = th * std::sqrt(std::abs(K) / N);
  return K > 0 ? std::sin(t * x) / std::sin(x) : std::sinh(t * x) / std::sinh(x);
}

}  // namespace

TEST_CASE("sigma closed values") {
  CHECK(sigma({0.0, 3.0, 0.3, 1.7}).value() == doctest::Approx(0.3));
  CHECK(sigma({1.0, 1.0, 0.5, std::numbers::pi / 2}).value() ==
        doctest::Approx(0.7071067812).epsilon(1e-10));
  CHECK(sigma({1.0, 1.0, 0.5, std::numbers::pi}).is_infinite());
  CHECK(sigma({-4.0, 2.0, 0.7, 0.0}).value() == doctest::Approx(0.7));
  CHECK(sigma({5.0, kInfiniteDimension, 0.2, 3.0}).value() == doctest::Approx(0.2));
}

TEST_CASE("tau closed values") {
  CHECK(tau({-1.0, 1.0, 0.4, 2.0}).value() == doctest::Approx(0.4));
  CHECK(tau({0.0, 3.0, 0.5, 1.0}).value() == doctest::Approx(0.5));
  double ref = std::sqrt(0.5) * std::sqrt(std::sinh(0.5) / std::sinh(1.0));
  CHECK(tau({-1.0, 2.0, 0.5, 1.0}).value() == doctest::Approx(ref).epsilon(1e-12));
  CHECK(ref == doctest::Approx(0.470855).epsilon(1e-6));
  CHECK(tau({1.0, 1.0, 0.5, 1.0}).is_infinite());
}

TEST_CASE("continuity in K through the series branch") {
  for (double t : {0.1, 0.5, 0.9})
    for (double th : {0.5, 2.0}) {
      double s0 = sigma({0.0, 2.0, t, th}).value();
      CHECK(std::abs(sigma({1e-8, 2.0, t, th}).value() - s0) < 1e-6);
      CHECK(std::abs(sigma({-1e-8, 2.0, t, th}).value() - s0) < 1e-6);
    }
}

TEST_CASE("sigma agrees with the reference quotient on random draws") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> K(-3, 3), N(1.0, 8.0), t(0, 1), th(0.01, 1.5);
  for (int i = 0; i < 2000; ++i) {
    double k = K(rng), n = N(rng), tt = t(rng), x = th(rng);
    if (k > 0 && x * std::sqrt(k / n) >= std::numbers::pi) continue;
    double ref = sigma_ref(k, n, tt, x);
    CHECK(sigma({k, n, tt, x}).value() == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("large negative curvature stays finite") {
  auto s = sigma({-1e6, 1.0, 0.5, 10.0});
  REQUIRE(s.is_finite());
  CHECK(s.value() >= 0.0);
  CHECK(s.value() < 1e-100);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(sigma({0.0, 2.0, 1.5, 1.0}), Error);
  CHECK_THROWS_AS(sigma({0.0, 2.0, 0.5, -1.0}), Error);
  CHECK_THROWS_AS(tau({0.0, 0.5, 0.5, 1.0}), Error);
  CHECK_THROWS_AS(sigma({1.0, 1.0, 0.5, 4.0}).value(), Error);
  CHECK(sigma({1.0, 1.0, 0.5, 4.0}).str() == "inf");
}

TEST_CASE("diameter bound") {
  CHECK(diameter_bound(0.0, 3.0).is_infinite());
  CHECK(diameter_bound(2.0, 2.0).value() == doctest::Approx(std::numbers::pi));
}
