#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cdv {

enum class GeodesicMode { euclidean_segment, matrix_midpoint };

struct Point {
  int id = 0;
  std::vector<double> coords;
};

struct Measure {
  std::vector<double> weights;

  double total() const;
  std::size_t size() const { return weights.size(); }
};

// A sampled geodesic. Euclidean spaces store coordinates, matrix spaces
// store point indices; `length` is d(gamma_0, gamma_1).
struct Geodesic {
  std::vector<double> times;
  std::vector<std::vector<double>> coords;
  std::vector<std::size_t> ids;
  double length = 0.0;

  std::size_t size() const { return times.size(); }
};

// Finite metric measure space. Immutable after construction.
class Space {
 public:
  static Space euclidean(std::vector<Point> points, std::vector<double> weights,
                         bool normalize = false);
  static Space from_matrix(std::vector<Point> points,
                           std::vector<std::vector<double>> distances,
                           std::vector<double> weights, bool normalize = false,
                           double triangle_tol = 1e-9);

  std::size_t size() const { return points_.size(); }
  bool is_euclidean() const { return mode_ == GeodesicMode::euclidean_segment; }
  GeodesicMode geodesic_mode() const { return mode_; }
  int dim() const { return dim_; }

  const Point& point(std::size_t i) const { return points_[i]; }
  const std::vector<Point>& points() const { return points_; }
  std::span<const double> coords(std::size_t i) const { return points_[i].coords; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

  double distance(std::size_t i, std::size_t j) const;
  // Euclidean only: distance from an arbitrary coordinate vector to point j.
  double distance_to(std::span<const double> x, std::size_t j) const;
  // Euclidean only: index of the closest point (lowest index on ties, squared
  // distances within 1e-12 (1 + diam)^2 count as ties).
  std::size_t nearest(std::span<const double> x) const;

  double nn_distance(std::size_t i) const { return nn_[i]; }
  double spacing() const { return spacing_; }
  double min_positive_distance() const { return min_pos_; }
  double diameter() const { return diameter_; }
  const std::vector<std::vector<double>>& matrix() const { return dmat_; }

  bool absolutely_continuous(const Measure& mu) const;

 private:
  Space() = default;
  void finalize(bool normalize);

  std::vector<Point> points_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> dmat_;
  std::vector<double> nn_;
  GeodesicMode mode_ = GeodesicMode::euclidean_segment;
  int dim_ = 0;
  double spacing_ = 0.0;
  double min_pos_ = 0.0;
  double diameter_ = 0.0;
};

// Polar grid on the annulus r_min <= |x| <= r_max, cell-centred radii,
// weights proportional to the cell area r dr dtheta.
Space sample_disc(int n_radial, int n_angular, double r_min, double r_max);
// Uniform cell-centred grid on [a, b] with equal weights.
Space sample_interval(int n, double a, double b);
// Cartesian lattice of spacing h restricted to the closed disc of radius R.
Space sample_lattice_disc(double h, double radius);

Geodesic geodesic_between(const Space& space, std::size_t x, std::size_t y,
                          std::span<const double> grid);
Geodesic reversed(const Geodesic& g);
// max |d(g_t, g_s) - |t - s| length| over sampled pairs.
double constant_speed_defect(const Space& space, const Geodesic& g);
// Position of a euclidean geodesic at an arbitrary time (no sampling).
std::vector<double> segment_point(std::span<const double> x, std::span<const double> y,
                                  double t);

Measure uniform_on(const Space& space, std::span<const std::size_t> support);
Measure dirac(const Space& space, std::size_t i);

}  // namespace cdv
