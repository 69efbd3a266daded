#include "cdv/io.hpp"

#include <fstream>
#include <json.hpp>

#include "cdv/error.hpp"

namespace cdv {

namespace {

constexpr const char* kModule = "mms";
using json = nlohmann::json;

json read_json(const std::string& path, const char* module) {
  std::ifstream in(path);
  if (!in) throw Error(module, "cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(module, "parse failure in " + path + ": " + e.what());
  }
}

void write_json(const json& j, const std::string& path, const char* module) {
  std::ofstream out(path);
  if (!out) throw Error(module, "cannot write file: " + path);
  out << j.dump(1) << "\n";
}

std::vector<double> numbers(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(kModule, what + " must be an array of numbers");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw Error(kModule, what + " contains a non-number");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

Space load_space(const std::string& path) {
  json j = read_json(path, kModule);
  try {
    std::vector<Point> pts;
    for (const auto& p : j.at("points")) {
      Point pt;
      pt.id = p.at("id").get<int>();
      if (p.contains("coords")) pt.coords = numbers(p["coords"], "coords");
      pts.push_back(std::move(pt));
    }
    std::vector<double> w = numbers(j.at("measure"), "measure");
    bool normalize = j.value("normalize", false);
    const json& metric = j.at("metric");
    if (metric.is_string()) {
      if (metric.get<std::string>() != "euclidean")
        throw Error(kModule, "unknown metric '" + metric.get<std::string>() + "'");
      if (j.value("geodesic_mode", "euclidean-segment") != "euclidean-segment")
        throw Error(kModule, "euclidean metric requires euclidean-segment geodesics");
      return Space::euclidean(std::move(pts), std::move(w), normalize);
    }
    std::vector<std::vector<double>> d;
    for (const auto& row : metric.at("matrix")) d.push_back(numbers(row, "matrix row"));
    if (j.value("geodesic_mode", "matrix-midpoint") != "matrix-midpoint")
      throw Error(kModule, "matrix metric requires matrix-midpoint geodesics");
    return Space::from_matrix(std::move(pts), std::move(d), std::move(w), normalize);
  } catch (const json::exception& e) {
    throw Error(kModule, "schema error in " + path + ": " + e.what());
  }
}

void save_space(const Space& space, const std::string& path) {
  json j;
  j["points"] = json::array();
  for (const auto& p : space.points()) {
    json pj = {{"id", p.id}};
    if (!p.coords.empty()) pj["coords"] = p.coords;
    j["points"].push_back(pj);
  }
  if (space.is_euclidean()) {
    j["metric"] = "euclidean";
    j["geodesic_mode"] = "euclidean-segment";
  } else {
    j["metric"] = {{"matrix", space.matrix()}};
    j["geodesic_mode"] = "matrix-midpoint";
  }
  j["measure"] = space.weights();
  write_json(j, path, kModule);
}

Measure load_measure(const std::string& path, const Space& space) {
  json j = read_json(path, kModule);
  Measure mu;
  bool normalize = false;
  if (j.is_array()) {
    mu.weights = numbers(j, "measure");
  } else if (j.contains("weights")) {
    mu.weights = numbers(j["weights"], "weights");
    normalize = j.value("normalize", false);
  } else if (j.contains("support")) {
    std::vector<std::size_t> s;
    for (const auto& x : j["support"]) s.push_back(x.get<std::size_t>());
    for (std::size_t i : s)
      if (i >= space.size()) throw Error(kModule, "support index out of range in " + path);
    return uniform_on(space, s);
  } else {
    throw Error(kModule, "measure file " + path + " has neither weights nor support");
  }
  if (mu.size() != space.size())
    throw Error(kModule, "measure " + path + " does not match the space size");
  if (normalize) {
    double m = mu.total();
    if (m <= 0.0) throw Error(kModule, "cannot normalize a zero measure");
    for (double& w : mu.weights) w /= m;
  }
  return mu;
}

void save_measure(const Measure& mu, const std::string& path) {
  write_json(json{{"weights", mu.weights}}, path, kModule);
}

std::vector<double> load_field(const std::string& path, const Space& space) {
  json j = read_json(path, kModule);
  std::vector<double> f = j.is_array() ? numbers(j, "field") : numbers(j.at("values"), "values");
  if (f.size() != space.size())
    throw Error(kModule, "field " + path + " does not match the space size");
  return f;
}

void save_field(const std::vector<double>& f, const std::string& path) {
  write_json(json{{"values", f}}, path, kModule);
}

void save_plan(const PlanFile& pf, const std::string& path) {
  json j;
  j["p"] = pf.plan.p;
  j["degenerate"] = pf.plan.degenerate;
  j["atoms"] = json::array();
  for (const auto& a : pf.plan.atoms) j["atoms"].push_back({a.source, a.target, a.mass});
  j["phi"] = pf.potentials.phi;
  j["phi_c"] = pf.potentials.phi_c;
  write_json(j, path, "transport");
}

PlanFile load_plan(const std::string& path, const Space& space) {
  json j = read_json(path, "transport");
  PlanFile pf;
  try {
    pf.plan.p = j.at("p").get<double>();
    pf.plan.degenerate = j.value("degenerate", false);
    for (const auto& a : j.at("atoms")) {
      PlanAtom at{a.at(0).get<std::size_t>(), a.at(1).get<std::size_t>(), a.at(2).get<double>()};
      if (at.source >= space.size() || at.target >= space.size())
        throw Error("transport", "plan atom outside the space in " + path);
      pf.plan.atoms.push_back(at);
    }
    pf.potentials.p = pf.plan.p;
    pf.potentials.phi = j.at("phi").get<std::vector<double>>();
    pf.potentials.phi_c = j.at("phi_c").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error("transport", "schema error in " + path + ": " + e.what());
  }
  if (pf.potentials.phi.size() != space.size() || pf.potentials.phi_c.size() != space.size())
    throw Error("transport", "plan potentials do not match the space size");
  pf.plan.total_cost = plan_cost(space, pf.plan);
  return pf;
}

}  // namespace cdv
