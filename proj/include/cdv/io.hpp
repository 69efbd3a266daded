#pragma once

#include <string>
#include <vector>

#include "cdv/mms.hpp"
#include "cdv/transport.hpp"

namespace cdv {

// JSON documents:
//   space:   {"points":[{"id":0,"coords":[..]}], "metric":"euclidean" | {"matrix":[[..]]},
//             "measure":[..], "geodesic_mode":"euclidean-segment"|"matrix-midpoint",
//             "normalize":false}
//   measure: [..] or {"weights":[..]} or {"support":[ids]} (uniform on the support
//            w.r.t. the reference measure); "normalize": true rescales weights.
//   field:   [..] or {"values":[..]}
//   plan:    {"p":..,"atoms":[[i,j,mass],..],"phi":[..],"phi_c":[..],"degenerate":..}
Space load_space(const std::string& path);
void save_space(const Space& space, const std::string& path);
Measure load_measure(const std::string& path, const Space& space);
void save_measure(const Measure& mu, const std::string& path);
std::vector<double> load_field(const std::string& path, const Space& space);
void save_field(const std::vector<double>& f, const std::string& path);

struct PlanFile {
  TransportPlan plan;
  PotentialField potentials;
};
void save_plan(const PlanFile& plan, const std::string& path);
PlanFile load_plan(const std::string& path, const Space& space);

}  // namespace cdv
