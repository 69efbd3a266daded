#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

#include "cdv/cdcheck.hpp"
#include "cdv/distortion.hpp"
#include "cdv/error.hpp"
#include "cdv/hopflax.hpp"
#include "cdv/oracles.hpp"
#include "cdv/pipeline.hpp"
#include "cdv/transport.hpp"

namespace py = pybind11;

namespace {

double as_float(const cdv::ExtendedReal& v) {
  return v.is_infinite() ? std::numeric_limits<double>::infinity() : v.value();
}

cdv::Space cloud(const std::vector<std::vector<double>>& coords) {
  std::vector<cdv::Point> pts;
  for (std::size_t i = 0; i < coords.size(); ++i) pts.push_back({int(i), coords[i]});
  return cdv::Space::euclidean(std::move(pts), std::vector<double>(coords.size(), 1.0), true);
}

py::dict wasserstein(const std::vector<std::vector<double>>& coords, std::vector<double> mu0,
                     std::vector<double> mu1, double p) {
  const auto space = cloud(coords);
  const auto r = cdv::solve_wp(space, {std::move(mu0)}, {std::move(mu1)}, p);
  py::list atoms;
  for (const auto& a : r.plan.atoms) atoms.append(py::make_tuple(a.source, a.target, a.mass));
  py::dict d;
  d["cost"] = r.plan.total_cost;
  d["wasserstein"] = r.plan.wasserstein();
  d["gap"] = r.gap;
  d["atoms"] = atoms;
  d["phi"] = r.potentials.phi;
  d["phi_c"] = r.potentials.phi_c;
  return d;
}

std::vector<double> hopf_lax(const std::vector<std::vector<double>>& coords,
                             const std::vector<double>& f, double t, double p) {
  const auto space = cloud(coords);
  return cdv::HopfLax(space, p).values(f, t);
}

py::dict density_1d(std::vector<double> grid, std::vector<double> h, double K0, double N,
                    double tol) {
  const auto r = cdv::check_density_1d({std::move(grid), std::move(h), K0, N}, tol);
  py::dict d;
  d["pass"] = r.pass;
  d["worst"] = r.worst;
  d["witness"] = r.witness;
  return d;
}

py::tuple verify_all(std::uint64_t seed, double tol) {
  cdv::VerifyConfig cfg;
  cfg.seed = seed;
  cfg.tol = tol;
  py::gil_scoped_release release;
  auto s = cdv::verify_all(cfg);
  py::gil_scoped_acquire acquire;
  return py::make_tuple(s.pass, s.report.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Optimal transport and curvature-dimension checks on finite metric measure spaces";
  py::register_exception<cdv::Error>(m, "CdvError", PyExc_ValueError);

  m.def("sigma", [](double K, double N, double t, double theta) {
    return as_float(cdv::sigma({K, N, t, theta}));
  }, py::arg("K"), py::arg("N"), py::arg("t"), py::arg("theta"));
  m.def("tau", [](double K, double N, double t, double theta) {
    return as_float(cdv::tau({K, N, t, theta}));
  }, py::arg("K"), py::arg("N"), py::arg("t"), py::arg("theta"));

  m.def("wasserstein", &wasserstein, py::arg("points"), py::arg("mu0"), py::arg("mu1"),
        py::arg("p") = 2.0, "Exact W_p between two measures on a euclidean point cloud.");
  m.def("hopf_lax", &hopf_lax, py::arg("points"), py::arg("f"), py::arg("t"),
        py::arg("p") = 2.0, "Q_t f on a euclidean point cloud.");
  m.def("check_density_1d", &density_1d, py::arg("grid"), py::arg("h"), py::arg("K0"),
        py::arg("N"), py::arg("tol") = 1e-9);
  m.def("radial_oracle", [](const std::string& quantity, const std::vector<double>& args, int n,
                            double q) {
    return cdv::oracle::radial_eval(cdv::oracle::Radial{n, q}, quantity, args);
  }, py::arg("quantity"), py::arg("args") = std::vector<double>{}, py::arg("n") = 2,
        py::arg("q") = 2.0);
  m.def("verify_all", &verify_all, py::arg("seed") = 0, py::arg("tol") = 1e-6,
        "Runs the full verification corpus; returns (pass, csv).");
  m.attr("__version__") = CDV_VERSION;
}
