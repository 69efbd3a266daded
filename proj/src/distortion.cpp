#include "cdv/distortion.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cdv/error.hpp"

namespace cdv {

namespace {

constexpr const char* kModule = "distortion";
// Below this |theta sqrt(|K|/N)| the quotient is evaluated by its series.
constexpr double kSeriesCutoff = 1e-4;

void validate_common(const DistortionParams& p) {
  if (!(p.t >= 0.0 && p.t <= 1.0)) throw Error(kModule, "t must lie in [0,1]");
  if (!(p.theta >= 0.0)) throw Error(kModule, "theta must be >= 0");
  if (std::isnan(p.K)) throw Error(kModule, "K is NaN");
}

// sin(t x)/sin(x) (or sinh) as a series in u = K theta^2 / N.
double quotient_series(double t, double u) {
  const double a = 1.0 - t * t;
  const double t2 = t * t;
  return t * (1.0 + a * u / 6.0 + a * (7.0 - 3.0 * t2) * u * u / 360.0 +
              a * (3.0 * t2 * t2 - 18.0 * t2 + 31.0) * u * u * u / 15120.0);
}

}  // namespace

double ExtendedReal::value() const {
  if (infinite_) throw Error(kModule, "value() called on +inf");
  return v_;
}

std::string ExtendedReal::str() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os.precision(12);
  os << v_;
  return os.str();
}

ExtendedReal diameter_bound(double K, double N) {
  if (K <= 0.0 || std::isinf(N)) return ExtendedReal::infinity();
  return ExtendedReal::finite(std::numbers::pi / std::sqrt(K / N));
}

ExtendedReal sigma(const DistortionParams& p) {
  validate_common(p);
  if (!(p.N > 0.0)) throw Error(kModule, "sigma needs N > 0");
  const double t = p.t;
  if (p.K == 0.0 || std::isinf(p.N) || p.theta == 0.0) return ExtendedReal::finite(t);
  const double x = p.theta * std::sqrt(std::abs(p.K) / p.N);
  if (p.K > 0.0) {
    if (x >= std::numbers::pi) return ExtendedReal::infinity();
    if (x < kSeriesCutoff) return ExtendedReal::finite(quotient_series(t, x * x));
    return ExtendedReal::finite(std::sin(t * x) / std::sin(x));
  }
  if (x < kSeriesCutoff) return ExtendedReal::finite(quotient_series(t, -x * x));
  // sinh(tx)/sinh(x) overflows for large x; use the exponential form there.
  if (x > 20.0) return ExtendedReal::finite(std::exp((t - 1.0) * x) *
                                            (1.0 - std::exp(-2.0 * t * x)) /
                                            (1.0 - std::exp(-2.0 * x)));
  return ExtendedReal::finite(std::sinh(t * x) / std::sinh(x));
}

ExtendedReal tau(const DistortionParams& p) {
  validate_common(p);
  if (!(p.N >= 1.0)) throw Error(kModule, "tau needs N >= 1");
  const double t = p.t;
  if (p.N == 1.0) {
    if (p.K <= 0.0 || p.theta == 0.0) return ExtendedReal::finite(t);
    return ExtendedReal::infinity();
  }
  if (std::isinf(p.N) || p.K == 0.0 || p.theta == 0.0) return ExtendedReal::finite(t);
  DistortionParams q = p;
  q.N = p.N - 1.0;
  ExtendedReal s = sigma(q);
  if (s.is_infinite()) return s;
  return ExtendedReal::finite(std::pow(t, 1.0 / p.N) * std::pow(s.value(), 1.0 - 1.0 / p.N));
}

}  // namespace cdv
