#pragma once

#include <limits>
#include <string>

namespace cdv {

// Real number or +inf as an explicit tag; value() refuses to hand out the
// infinite case so callers must branch on it.
class ExtendedReal {
 public:
  static ExtendedReal infinity() { return ExtendedReal(); }
  static ExtendedReal finite(double v) { return ExtendedReal(v); }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  double value() const;
  std::string str() const;

 private:
  ExtendedReal() : infinite_(true) {}
  explicit ExtendedReal(double v) : v_(v), infinite_(false) {}
  double v_ = 0.0;
  bool infinite_;
};

inline constexpr double kInfiniteDimension = std::numeric_limits<double>::infinity();

// For sigma the field N is the calligraphic dimension (N > 0, possibly infinite);
// for tau it is N >= 1.
struct DistortionParams {
  double K = 0.0;
  double N = kInfiniteDimension;
  double t = 0.0;
  double theta = 0.0;
};

ExtendedReal sigma(const DistortionParams& p);
ExtendedReal tau(const DistortionParams& p);
// pi / sqrt(K / N) for K > 0, +inf otherwise.
ExtendedReal diameter_bound(double K, double N);

}  // namespace cdv
