#include "cdv/mms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cdv/error.hpp"

namespace cdv {

namespace {

constexpr const char* kModule = "mms";

double mass_of(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s += v;
  return s;
}

}  // namespace

double Measure::total() const { return mass_of(weights); }

Space Space::euclidean(std::vector<Point> points, std::vector<double> weights,
                       bool normalize) {
  if (points.empty()) throw Error(kModule, "space has no points");
  Space s;
  s.mode_ = GeodesicMode::euclidean_segment;
  s.dim_ = static_cast<int>(points.front().coords.size());
  if (s.dim_ == 0) throw Error(kModule, "euclidean metric needs coordinates");
  for (const auto& p : points)
    if (static_cast<int>(p.coords.size()) != s.dim_)
      throw Error(kModule, "point " + std::to_string(p.id) + " has wrong dimension");
  s.points_ = std::move(points);
  s.weights_ = std::move(weights);
  s.finalize(normalize);
  return s;
}

Space Space::from_matrix(std::vector<Point> points, std::vector<std::vector<double>> d,
                         std::vector<double> weights, bool normalize, double triangle_tol) {
  const std::size_t n = points.size();
  if (n == 0) throw Error(kModule, "space has no points");
  if (d.size() != n) throw Error(kModule, "distance matrix size does not match points");
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i].size() != n) throw Error(kModule, "distance matrix is not square");
    if (d[i][i] != 0.0) throw Error(kModule, "nonzero diagonal at " + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (!(d[i][j] >= 0.0)) throw Error(kModule, "negative or NaN distance");
      if (d[i][j] != d[j][i]) throw Error(kModule, "distance matrix is not symmetric");
    }
  }
  // O(n^3); only the matrix backend needs it, euclidean distances are metric.
  double worst = 0.0;
  std::size_t wi = 0, wj = 0, wk = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        double ex = d[i][k] - d[i][j] - d[j][k];
        if (ex > worst) { worst = ex; wi = i; wj = j; wk = k; }
      }
  if (worst > triangle_tol) {
    std::ostringstream os;
    os << "triangle inequality violated by " << worst << " at (" << wi << "," << wj << ","
       << wk << ")";
    throw Error(kModule, os.str());
  }
  Space s;
  s.mode_ = GeodesicMode::matrix_midpoint;
  s.dim_ = points.front().coords.size();
  s.points_ = std::move(points);
  s.dmat_ = std::move(d);
  s.weights_ = std::move(weights);
  s.finalize(normalize);
  return s;
}

void Space::finalize(bool normalize) {
  const std::size_t n = points_.size();
  if (weights_.size() != n) throw Error(kModule, "measure length does not match points");
  for (double w : weights_)
    if (!(w >= 0.0)) throw Error(kModule, "negative measure weight");
  double mass = mass_of(weights_);
  if (normalize) {
    if (mass <= 0.0) throw Error(kModule, "cannot normalize a zero measure");
    for (double& w : weights_) w /= mass;
  } else if (std::abs(mass - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(12);
    os << "mass " << mass << " != 1";
    throw Error(kModule, os.str());
  }
  nn_.assign(n, std::numeric_limits<double>::infinity());
  min_pos_ = std::numeric_limits<double>::infinity();
  diameter_ = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double dij = distance(i, j);
      diameter_ = std::max(diameter_, dij);
      if (dij > 0.0) {
        min_pos_ = std::min(min_pos_, dij);
        nn_[i] = std::min(nn_[i], dij);
        nn_[j] = std::min(nn_[j], dij);
      }
    }
  spacing_ = 0.0;
  for (double v : nn_)
    if (std::isfinite(v)) spacing_ = std::max(spacing_, v);
  if (n == 1) { nn_[0] = 0.0; min_pos_ = 0.0; }
}

double Space::distance(std::size_t i, std::size_t j) const {
  if (mode_ == GeodesicMode::matrix_midpoint) return dmat_[i][j];
  return distance_to(points_[i].coords, j);
}

double Space::distance_to(std::span<const double> x, std::size_t j) const {
  if (mode_ != GeodesicMode::euclidean_segment)
    throw Error(kModule, "coordinate queries need a euclidean space");
  const auto& y = points_[j].coords;
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) {
    double dk = x[k] - y[k];
    s += dk * dk;
  }
  return std::sqrt(s);
}

std::size_t Space::nearest(std::span<const double> x) const {
  if (mode_ != GeodesicMode::euclidean_segment)
    throw Error(kModule, "coordinate queries need a euclidean space");
  // Distances within a roundoff band of the minimum count as ties, so exact
  // midpoints resolve to the lowest index instead of the last rounding bit.
  std::vector<double> d2(points_.size());
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < points_.size(); ++j) {
    const auto& y = points_[j].coords;
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) {
      double dk = x[k] - y[k];
      s += dk * dk;
    }
    d2[j] = s;
    bd = std::min(bd, s);
  }
  const double band = 1e-12 * (1.0 + diameter_) * (1.0 + diameter_);
  for (std::size_t j = 0; j < points_.size(); ++j)
    if (d2[j] <= bd + band) return j;
  return 0;
}

bool Space::absolutely_continuous(const Measure& mu) const {
  if (mu.size() != size()) return false;
  for (std::size_t i = 0; i < size(); ++i)
    if (mu.weights[i] > 0.0 && weights_[i] <= 0.0) return false;
  return true;
}

Space sample_disc(int n_radial, int n_angular, double r_min, double r_max) {
  if (n_radial < 2 || n_angular < 3 || !(r_min >= 0.0) || !(r_max > r_min))
    throw Error(kModule, "degenerate disc grid parameters");
  const double dr = (r_max - r_min) / n_radial;
  const double dth = 2.0 * std::numbers::pi / n_angular;
  std::vector<Point> pts;
  std::vector<double> w;
  pts.reserve(static_cast<std::size_t>(n_radial) * n_angular);
  int id = 0;
  for (int j = 0; j < n_angular; ++j) {
    const double th = j * dth;
    for (int i = 0; i < n_radial; ++i) {
      const double r = r_min + (i + 0.5) * dr;
      pts.push_back({id++, {r * std::cos(th), r * std::sin(th)}});
      w.push_back(r * dr * dth);
    }
  }
  return Space::euclidean(std::move(pts), std::move(w), true);
}

Space sample_interval(int n, double a, double b) {
  if (n < 2 || !(b > a)) throw Error(kModule, "degenerate interval grid parameters");
  const double h = (b - a) / n;
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back({i, {a + (i + 0.5) * h}});
  return Space::euclidean(std::move(pts), std::vector<double>(n, 1.0), true);
}

Space sample_lattice_disc(double h, double radius) {
  if (!(h > 0.0) || !(radius >= h)) throw Error(kModule, "degenerate lattice parameters");
  const int m = static_cast<int>(std::floor(radius / h + 1e-9));
  std::vector<Point> pts;
  int id = 0;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j) {
      double x = i * h, y = j * h;
      if (x * x + y * y <= radius * radius * (1.0 + 1e-12)) pts.push_back({id++, {x, y}});
    }
  std::vector<double> w(pts.size(), 1.0);
  return Space::euclidean(std::move(pts), std::move(w), true);
}

std::vector<double> segment_point(std::span<const double> x, std::span<const double> y,
                                  double t) {
  std::vector<double> z(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) z[k] = (1.0 - t) * x[k] + t * y[k];
  return z;
}

namespace {

// Matrix backend: the sample at time t minimises
//   |(1-t) d(x,z) - t d(z,y)| / (2 t (1-t)) + |d(x,y) - d(x,z) - d(z,y)|,
// which at t = 1/2 is the usual midpoint score. Lowest id wins ties.
std::size_t matrix_sample(const Space& s, std::size_t x, std::size_t y, double t,
                          double tol) {
  if (t <= 0.0) return x;
  if (t >= 1.0) return y;
  const double L = s.distance(x, y);
  if (L == 0.0) return x;
  std::size_t best = x;
  double bs = std::numeric_limits<double>::infinity();
  for (std::size_t z = 0; z < s.size(); ++z) {
    double a = s.distance(x, z), b = s.distance(z, y);
    double score = std::abs((1.0 - t) * a - t * b) / (2.0 * t * (1.0 - t)) + std::abs(L - a - b);
    if (score < bs - 1e-15) { bs = score; best = z; }
  }
  if (bs > tol) {
    std::ostringstream os;
    os << "no admissible intermediate point between " << x << " and " << y << " at t=" << t
       << " (score " << bs << ")";
    throw Error(kModule, os.str());
  }
  return best;
}

}  // namespace

Geodesic geodesic_between(const Space& s, std::size_t x, std::size_t y,
                          std::span<const double> grid) {
  if (x >= s.size() || y >= s.size()) throw Error(kModule, "geodesic endpoint out of range");
  Geodesic g;
  g.length = s.distance(x, y);
  g.times.assign(grid.begin(), grid.end());
  if (s.is_euclidean()) {
    for (double t : grid) g.coords.push_back(segment_point(s.coords(x), s.coords(y), t));
  } else {
    const double tol = std::max(s.spacing(), 1e-12);
    for (double t : grid) g.ids.push_back(matrix_sample(s, x, y, t, tol));
  }
  return g;
}

Geodesic reversed(const Geodesic& g) {
  Geodesic r;
  r.length = g.length;
  const std::size_t n = g.size();
  for (std::size_t k = 0; k < n; ++k) r.times.push_back(1.0 - g.times[n - 1 - k]);
  r.coords.assign(g.coords.rbegin(), g.coords.rend());
  r.ids.assign(g.ids.rbegin(), g.ids.rend());
  return r;
}

double constant_speed_defect(const Space& s, const Geodesic& g) {
  double worst = 0.0;
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b = a + 1; b < g.size(); ++b) {
      double d;
      if (!g.coords.empty()) {
        double acc = 0.0;
        for (std::size_t k = 0; k < g.coords[a].size(); ++k) {
          double dk = g.coords[a][k] - g.coords[b][k];
          acc += dk * dk;
        }
        d = std::sqrt(acc);
      } else {
        d = s.distance(g.ids[a], g.ids[b]);
      }
      worst = std::max(worst, std::abs(d - std::abs(g.times[b] - g.times[a]) * g.length));
    }
  return worst;
}

Measure uniform_on(const Space& s, std::span<const std::size_t> support) {
  Measure mu;
  mu.weights.assign(s.size(), 0.0);
  double mass = 0.0;
  for (std::size_t i : support) mass += s.weight(i);
  if (mass <= 0.0) throw Error(kModule, "uniform measure on a null set");
  for (std::size_t i : support) mu.weights[i] = s.weight(i) / mass;
  return mu;
}

Measure dirac(const Space& s, std::size_t i) {
  Measure mu;
  mu.weights.assign(s.size(), 0.0);
  mu.weights.at(i) = 1.0;
  return mu;
}

}  // namespace cdv
