#include "cdv/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cdv/error.hpp"

namespace cdv::oracle {

namespace {

constexpr const char* kModule = "oracles";

void need(bool ok, const std::string& what) {
  if (!ok) throw Error(kModule, what);
}

void check_time(double t) { need(t > 0.0 && t < 1.0, "time must lie in (0,1)"); }
void check_ell(double ell) { need(ell >= 0.0 && ell <= 1.0, "ell must lie in [0,1]"); }

}  // namespace

double Radial::omega() const {
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

double Radial::phi(double r) const {
  need(r >= 0.0, "radius must be nonnegative");
  return -std::pow(2.0, q - 1.0) * r;
}

double Radial::phi_t(double r, double t) const {
  need(r >= 0.0, "radius must be nonnegative");
  need(t > 0.0 && t <= 1.0, "time must lie in (0,1]");
  if (r <= 2.0 * t) return -std::pow(r, q) / (q * std::pow(t, q - 1.0));
  const double qp = q / (q - 1.0);
  return -std::pow(2.0, q - 1.0) * (r - 2.0 * t / qp);
}

double Radial::phi_c(double r) const {
  need(r >= 2.0, "conjugate closed form needs |y| >= 2");
  const double qp = q / (q - 1.0);
  return std::pow(2.0, q - 1.0) * (r - 2.0 / qp);
}

double Radial::transport_cost() const { return std::pow(2.0, q); }

double Radial::rho_t(double r0, double t) const {
  need(r0 >= 1.0 && r0 <= 2.0, "source radius must lie in [1,2]");
  need(t >= 0.0 && t <= 1.0, "time must lie in [0,1]");
  return 1.0 / (omega() * std::pow(r0 + 2.0 * t, n - 1));
}

double Radial::density(double r, double t) const {
  need(t >= 0.0 && t <= 1.0, "time must lie in [0,1]");
  if (r < 1.0 + 2.0 * t || r > 2.0 + 2.0 * t) return 0.0;
  return 1.0 / (omega() * std::pow(r, n - 1));
}

double Radial::Phi(double r, double s, double t) const {
  check_time(s);
  check_time(t);
  need(r > 2.0 * t, "Phi closed form needs |x| > 2t");
  return -std::pow(2.0, q - 1.0) * (r - 2.0 * t + 2.0 * s / q);
}

double Radial::dPhi() const { return std::pow(2.0, q); }

double Radial::level(double ell, double s) const {
  check_ell(ell);
  check_time(s);
  return -std::pow(2.0, q - 1.0) * (1.0 + ell + 2.0 * s / q);
}

double Radial::h(double ell, double s, double t) const {
  check_ell(ell);
  check_time(s);
  need(t >= 0.0 && t <= 1.0, "time must lie in [0,1]");
  return std::pow((1.0 + ell + 2.0 * t) / (1.0 + ell + 2.0 * s), n - 1);
}

double Radial::ratio(double ell, double s, double t) const {
  check_ell(ell);
  check_time(s);
  check_time(t);
  return std::pow((1.0 + ell + 2.0 * s) / (1.0 + ell + 2.0 * t), n - 1);
}

double Radial::z(double ell, double t) const {
  check_ell(ell);
  check_time(t);
  return 0.0;
}

std::vector<std::string> radial_quantities() {
  return {"phi", "phi_t", "phi_c", "cost", "T", "T_t", "rho_t", "density",
          "Phi", "dPhi", "level", "h", "ratio", "z"};
}

double radial_eval(const Radial& o, const std::string& quantity, std::span<const double> a) {
  need(o.n >= 1, "dimension must be at least 1");
  need(o.q > 1.0, "exponent q must exceed 1");
  auto arity = [&](std::size_t k) {
    if (a.size() != k) {
      std::ostringstream os;
      os << "quantity '" << quantity << "' takes " << k << " argument(s), got " << a.size();
      throw Error(kModule, os.str());
    }
  };
  if (quantity == "phi") return arity(1), o.phi(a[0]);
  if (quantity == "phi_t") return arity(2), o.phi_t(a[0], a[1]);
  if (quantity == "phi_c") return arity(1), o.phi_c(a[0]);
  if (quantity == "cost") return arity(0), o.transport_cost();
  if (quantity == "T") return arity(1), need(a[0] > 0.0, "radius must be positive"), o.T(a[0]);
  if (quantity == "T_t")
    return arity(2), need(a[0] > 0.0, "radius must be positive"), o.T_t(a[0], a[1]);
  if (quantity == "rho_t") return arity(2), o.rho_t(a[0], a[1]);
  if (quantity == "density") return arity(2), o.density(a[0], a[1]);
  if (quantity == "Phi") return arity(3), o.Phi(a[0], a[1], a[2]);
  if (quantity == "dPhi") return arity(0), o.dPhi();
  if (quantity == "level") return arity(2), o.level(a[0], a[1]);
  if (quantity == "h") return arity(3), o.h(a[0], a[1], a[2]);
  if (quantity == "ratio") return arity(3), o.ratio(a[0], a[1], a[2]);
  if (quantity == "z") return arity(2), o.z(a[0], a[1]);
  throw Error(kModule, "unknown radial quantity '" + quantity + "'");
}

LineInterpolant line_transport(const Block& b, double t) {
  need(b.b0 > b.a0 && b.b1 > b.a1, "blocks must have positive length");
  need(t >= 0.0 && t <= 1.0, "time must lie in [0,1]");
  LineInterpolant r;
  r.lo = line_map(b, b.a0, t);
  r.hi = line_map(b, b.b0, t);
  r.density = 1.0 / (r.hi - r.lo);
  return r;
}

double line_map(const Block& b, double x, double t) {
  need(b.b0 > b.a0 && b.b1 > b.a1, "blocks must have positive length");
  const double T = b.a1 + (x - b.a0) * (b.b1 - b.a1) / (b.b0 - b.a0);
  return (1.0 - t) * x + t * T;
}

double brute_force_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  need(n >= 1 && n <= 8, "brute force is limited to 1..8 atoms");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += cost[i][perm[i]];
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double monotone_rearrangement_cost(std::vector<double> xs, std::vector<double> ys, double p) {
  need(xs.size() == ys.size() && !xs.empty(), "need equally many atoms on both sides");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double c = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) c += std::pow(std::abs(xs[i] - ys[i]), p);
  return c / double(xs.size());
}

}  // namespace cdv::oracle
