#include <cmath>
#include <numbers>

#include "cdv/error.hpp"
#include "cdv/mms.hpp"
#include "doctest.h"

using namespace cdv;

TEST_CASE("two-point space is valid") {
  auto s = Space::euclidean({{0, {0.0}}, {1, {1.0}}}, {0.5, 0.5});
  CHECK(s.size() == 2);
  CHECK(s.distance(0, 1) == doctest::Approx(1.0));
  CHECK(s.diameter() == doctest::Approx(1.0));
}

TEST_CASE("unnormalised mass is rejected with its value") {
  try {
    Space::euclidean({{0, {0.0}}, {1, {1.0}}}, {0.7, 0.7});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("mass 1.4") != std::string::npos);
    CHECK(e.module() == "mms");
  }
}

TEST_CASE("distance matrix must be a metric") {
  std::vector<Point> pts{{0, {}}, {1, {}}, {2, {}}};
  std::vector<std::vector<double>> bad{{0, 1, 5}, {1, 0, 1}, {5, 1, 0}};
  CHECK_THROWS_AS(Space::from_matrix(pts, bad, {1, 1, 1}, true), Error);
  std::vector<std::vector<double>> asym{{0, 1, 1}, {2, 0, 1}, {1, 1, 0}};
  CHECK_THROWS_AS(Space::from_matrix(pts, asym, {1, 1, 1}, true), Error);
  std::vector<std::vector<double>> ok{{0, 1, 2}, {1, 0, 1}, {2, 1, 0}};
  auto s = Space::from_matrix(pts, ok, {1, 1, 1}, true);
  CHECK(s.weight(1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("disc sampler") {
  auto s = sample_disc(2, 4, 0.0, 1.0);
  CHECK(s.size() == 8);
  double m = 0.0;
  for (double w : s.weights()) m += w;
  CHECK(m == doctest::Approx(1.0));
  CHECK_THROWS_AS(sample_disc(2, 3, 0.5, 0.5), Error);

  // Cell-area quadrature: the annulus weights are proportional to r, so the mass
  // of the shell 1 <= r <= 2.2 (a cell boundary) is (2.2^2 - 1)/(16 - 1).
  auto a = sample_disc(50, 64, 1.0, 4.0);
  double inner = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double r = std::hypot(a.coords(i)[0], a.coords(i)[1]);
    if (r < 2.2) inner += a.weight(i);
  }
  CHECK(inner == doctest::Approx(3.84 / 15.0).epsilon(1e-9));
}

TEST_CASE("segment geodesics") {
  auto s = Space::euclidean({{0, {0.0, 0.0}}, {1, {1.0, 0.0}}, {2, {2.0, 0.0}}}, {1, 1, 1}, true);
  std::vector<double> grid{0.0, 0.5, 1.0};
  auto g = geodesic_between(s, 0, 2, grid);
  CHECK(g.length == doctest::Approx(2.0));
  CHECK(g.coords[1][0] == doctest::Approx(1.0));
  CHECK(g.coords[1][1] == doctest::Approx(0.0));
  CHECK(constant_speed_defect(s, g) < 1e-15);
  auto c = geodesic_between(s, 1, 1, grid);
  CHECK(c.length == 0.0);
  CHECK(c.coords[2][0] == doctest::Approx(1.0));
  auto r = reversed(g);
  CHECK(r.coords[0][0] == doctest::Approx(2.0));
}

TEST_CASE("radial pair follows the radial displacement") {
  auto s = sample_disc(50, 64, 1.0, 4.0);
  // A point at angle 0 on the first shell and its image |x| + 2 on the same ray.
  std::size_t x = 5, y = 5 + 20 * 1;  // dr = 0.06: 20 cells is a radial shift of 1.2
  std::vector<double> grid{0.0, 0.25, 0.5, 1.0};
  auto g = geodesic_between(s, x, y, grid);
  double r0 = std::hypot(g.coords[0][0], g.coords[0][1]);
  double r1 = std::hypot(g.coords[3][0], g.coords[3][1]);
  CHECK(r1 - r0 == doctest::Approx(1.2));
  CHECK(std::abs(g.coords[2][1]) < 1e-12);
}

TEST_CASE("matrix backend midpoint search") {
  // Path graph 0-1-2-3-4 with unit edges.
  std::vector<Point> pts;
  std::vector<std::vector<double>> d(5, std::vector<double>(5));
  for (int i = 0; i < 5; ++i) {
    pts.push_back({i, {}});
    for (int j = 0; j < 5; ++j) d[i][j] = std::abs(i - j);
  }
  auto s = Space::from_matrix(pts, d, std::vector<double>(5, 1.0), true);
  std::vector<double> grid{0.0, 0.25, 0.5, 1.0};
  auto g = geodesic_between(s, 0, 4, grid);
  CHECK(g.ids == std::vector<std::size_t>{0, 1, 2, 4});
  CHECK(constant_speed_defect(s, g) < 1e-12);
}

TEST_CASE("nearest breaks exact ties toward the lowest index") {
  auto s = sample_interval(4, 0.0, 1.0);
  std::vector<double> mid{0.25};
  CHECK(s.nearest(mid) == 0);
  std::vector<double> x{0.9};
  CHECK(s.nearest(x) == 3);
}

TEST_CASE("measures") {
  auto s = sample_interval(4, 0.0, 1.0);
  std::vector<std::size_t> half{0, 1};
  auto mu = uniform_on(s, half);
  CHECK(mu.total() == doctest::Approx(1.0));
  CHECK(mu.weights[0] == doctest::Approx(0.5));
  CHECK(s.absolutely_continuous(mu));
  CHECK(dirac(s, 2).weights[2] == 1.0);
  std::vector<std::size_t> none;
  CHECK_THROWS_AS(uniform_on(s, none), Error);
}

TEST_CASE("lattice disc") {
  auto s = sample_lattice_disc(0.5, 1.0);
  // origin, 4 axis points at 0.5, 4 at 1, 4 diagonals at |x| = 0.707
  CHECK(s.size() == 13);
}
