#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cdv/cdcheck.hpp"
#include "cdv/changevar.hpp"
#include "cdv/distortion.hpp"
#include "cdv/error.hpp"
#include "cdv/hopflax.hpp"
#include "cdv/io.hpp"
#include "cdv/needle.hpp"
#include "cdv/oracles.hpp"
#include "cdv/pipeline.hpp"
#include "cdv/report.hpp"
#include "cdv/transport.hpp"

namespace {

using namespace cdv;

struct Global {
  double tol = 1e-6;
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string space;
};

Space need_space(const Global& g) {
  if (g.space.empty()) throw Error("cli", "--space is required for this subcommand");
  return load_space(g.space);
}

void echo(CsvReport& rep, const Global& g) {
  rep.config("tol", fmt(g.tol));
  if (!g.space.empty()) rep.config("space", g.space);
}

std::vector<double> uniform_grid(int steps) {
  if (steps < 2) throw Error("cli", "--grid needs at least 2 steps");
  std::vector<double> t;
  for (int k = 0; k <= steps; ++k) t.push_back(double(k) / steps);
  return t;
}


int verdict_code(bool pass) { return pass ? 0 : 1; }

// Problem from files (space, mu0, mu1) or a built-in instance.
Problem problem_from(const Global& g, const std::string& instance, const std::string& mu0,
                     const std::string& mu1, double p, int steps) {
  if (!instance.empty()) {
    if (instance == "radial") return radial_problem(50, 64, p);
    if (instance == "translation") return translation_problem(p);
    if (instance == "stretch") return stretch_problem(p);
    throw Error("cli", "unknown instance '" + instance + "' (radial, translation, stretch)");
  }
  if (mu0.empty() || mu1.empty()) throw Error("cli", "--mu0 and --mu1 are required");
  Problem prob{"files", need_space(g), {}, {}, p, uniform_grid(steps), {}, {}};
  prob.mu0 = load_measure(mu0, prob.space);
  prob.mu1 = load_measure(mu1, prob.space);
  for (double s : {0.3, 0.6}) {
    const auto k = std::lround(s * steps);
    prob.s_list.push_back(prob.grid.at(std::size_t(k)));
  }
  return prob;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cdv: optimal transport and curvature-dimension verification"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--tol", g.tol, "numerical tolerance")->capture_default_str();
  app.add_option("--seed", g.seed, "seed for randomized corpora")->capture_default_str();
  app.add_option("--out", g.out, "output CSV path ('-' for stdout)")->capture_default_str();
  app.add_option("--space", g.space, "space JSON file");

  int code = 0;

  // distortion
  double dK = 0.0, dN = 2.0, dt = 0.5, dtheta = 1.0;
  auto* dist = app.add_subcommand("distortion", "sigma and tau distortion coefficients");
  dist->add_option("--K", dK, "curvature")->required();
  dist->add_option("--N", dN, "dimension")->required();
  dist->add_option("--t", dt, "interpolation parameter")->required();
  dist->add_option("--theta", dtheta, "distance")->required();
  dist->callback([&] {
    CsvReport rep("distortion", g.seed);
    echo(rep, g);
    rep.config("K", fmt(dK));
    rep.config("N", fmt(dN));
    rep.config("t", fmt(dt));
    rep.config("theta", fmt(dtheta));
    rep.columns({"coefficient", "value"});
    rep.row({"sigma", sigma({dK, dN, dt, dtheta}).str()});
    if (dN >= 1.0) rep.row({"tau", tau({dK, dN, dt, dtheta}).str()});
    rep.write(g.out);
  });

  // wasserstein
  std::string mu0, mu1, plan_out;
  double wp = 2.0;
  auto* was = app.add_subcommand("wasserstein", "exact p-Wasserstein distance");
  was->add_option("--mu0", mu0, "source measure")->required();
  was->add_option("--mu1", mu1, "target measure")->required();
  was->add_option("--p", wp, "exponent p > 1")->capture_default_str();
  was->add_option("--plan-out", plan_out, "write the plan and potentials as JSON");
  was->callback([&] {
    const Space space = need_space(g);
    const Measure a = load_measure(mu0, space), b = load_measure(mu1, space);
    SolveOptions so;
    so.seed = g.seed;
    const auto res = solve_wp(space, a, b, wp, so);
    CsvReport rep("wasserstein", g.seed);
    echo(rep, g);
    rep.config("mu0", mu0);
    rep.config("mu1", mu1);
    rep.config("p", fmt(wp));
    rep.columns({"cost", "W_p", "gap", "n_atoms"});
    rep.row({fmt(res.plan.total_cost), fmt(res.plan.wasserstein()), fmt(res.gap),
             fmt(res.plan.atoms.size())});
    if (res.plan.degenerate) rep.note("degenerate: plan support moved under perturbation");
    rep.write(g.out);
    if (!plan_out.empty()) save_plan({res.plan, res.potentials}, plan_out);
  });

  // hopflax
  std::string field;
  double ht = 0.5, hp = 2.0;
  bool negative = false;
  auto* hop = app.add_subcommand("hopflax", "Hopf-Lax semigroup Q_t f");
  hop->add_option("--field", field, "field f")->required();
  hop->add_option("--t", ht, "time")->required();
  hop->add_option("--p", hp, "exponent p > 1")->capture_default_str();
  hop->add_flag("--negative", negative, "evaluate Q_{-t} f = -Q_t(-f)");
  hop->callback([&] {
    const Space space = need_space(g);
    const auto f = load_field(field, space);
    const auto ev = negative ? hopflax_negative(space, f, -ht, hp) : hopflax(space, f, ht, hp);
    CsvReport rep("hopflax", g.seed);
    echo(rep, g);
    rep.config("field", field);
    rep.config("t", fmt(negative ? -ht : ht));
    rep.config("p", fmt(hp));
    rep.columns({"point", "value", "d_plus", "d_minus"});
    for (std::size_t i = 0; i < ev.size(); ++i)
      rep.row({std::to_string(space.point(i).id), fmt(ev[i].value), fmt(ev[i].d_plus),
               fmt(ev[i].d_minus)});
    rep.write(g.out);
  });

  // hj-diagnose
  std::string plan_file;
  int hj_grid = 20;
  std::size_t hj_geo = std::numeric_limits<std::size_t>::max();
  auto* hj = app.add_subcommand("hj-diagnose", "second/third-order Hopf-Lax diagnostics along a geodesic");
  hj->add_option("--plan", plan_file, "plan JSON from wasserstein --plan-out")->required();
  hj->add_option("--grid", hj_grid, "number of time steps")->capture_default_str();
  hj->add_option("--geodesic", hj_geo, "atom index (default: heaviest)");
  hj->callback([&] {
    const Space space = need_space(g);
    const auto pf = load_plan(plan_file, space);
    const double p = pf.potentials.p;
    if (pf.plan.atoms.empty()) throw Error("cli", "plan has no atoms");
    std::size_t a = hj_geo;
    if (a == std::numeric_limits<std::size_t>::max()) {
      a = 0;
      for (std::size_t i = 1; i < pf.plan.atoms.size(); ++i)
        if (pf.plan.atoms[i].mass > pf.plan.atoms[a].mass) a = i;
    }
    if (a >= pf.plan.atoms.size()) throw Error("cli", "--geodesic out of range");
    const auto grid = uniform_grid(hj_grid);
    const auto geo = geodesic_between(space, pf.plan.atoms[a].source, pf.plan.atoms[a].target, grid);
    HopfLax hl(space, p);
    const double h = 0.25 / hj_grid;
    std::vector<double> ts, zs;
    std::vector<SecondOrderSample> smp;
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
      const std::size_t x = bin_of(space, geo, k);
      smp.push_back(second_order_diagnostics(hl, pf.potentials, x, grid[k], h, g.tol));
      ts.push_back(grid[k]);
      zs.push_back(smp.back().z);
    }
    const auto third = third_order_check(ts, zs, p, geo.length);
    CsvReport rep("hj-diagnose", g.seed);
    echo(rep, g);
    rep.config("plan", plan_file);
    rep.config("grid", std::to_string(hj_grid));
    rep.config("geodesic", std::to_string(a));
    rep.columns({"t", "q_minus", "q_plus", "r_minus", "r_plus", "z", "margin_geomean", "margin_ode"});
    for (std::size_t i = 0; i < smp.size(); ++i)
      rep.row({fmt(smp[i].t), fmt(smp[i].q_minus), fmt(smp[i].q_plus), fmt(smp[i].r_minus),
               fmt(smp[i].r_plus), fmt(smp[i].z), fmt(third.margin_geomean[i]),
               fmt(third.margin_ode[i])});
    rep.write(g.out);
  });

  // needle
  std::string ufield;
  bool sdist = false;
  double level = 0.0;
  std::size_t bins = 32;
  auto* ndl = app.add_subcommand("needle", "L1 transport rays and disintegration of a 1-Lipschitz u");
  ndl->add_option("--u-from-field", ufield, "field defining u")->required();
  ndl->add_flag("--signed-distance", sdist, "use u = signed distance to {field = level}");
  ndl->add_option("--level", level, "level for --signed-distance")->capture_default_str();
  ndl->add_option("--bins", bins, "arclength bins per ray")->capture_default_str();
  ndl->callback([&] {
    const Space space = need_space(g);
    auto f = load_field(ufield, space);
    std::vector<double> u = f;
    if (sdist) {
      for (double& v : f) v -= level;
      u = signed_distance(space, f, 1e-9 * (1.0 + space.diameter())).values;
    }
    const auto st = build_transport_structure(space, u);
    auto rd = extract_rays(space, st);
    disintegrate(space, rd, bins);
    CsvReport rep("needle", g.seed);
    echo(rep, g);
    rep.config("u", ufield);
    rep.config("signed_distance", sdist ? "true" : "false");
    rep.config("level", fmt(level));
    rep.config("bins", fmt(bins));
    rep.note("transport_mass=" + fmt(st.transport_mass) + " branch_mass=" + fmt(st.branch_mass) +
             " remainder_mass=" + fmt(rd.remainder_mass) +
             " reconstruction=" + fmt(reconstruction_residual(space, st, rd)));
    rep.columns({"ray_id", "arclength", "h_value", "q_weight"});
    for (std::size_t r = 0; r < rd.rays.size(); ++r) {
      const auto& ray = rd.rays[r];
      const double w = ray.bin_width();
      for (std::size_t b = 0; b < ray.h.size(); ++b)
        rep.row({fmt(r), fmt((double(b) + 0.5) * w), fmt(ray.h[b]), fmt(ray.q)});
    }
    rep.write(g.out);
    CsvReport rem("needle-remainder", g.seed);
    echo(rem, g);
    rem.columns({"point", "mass"});
    for (std::size_t x : rd.remainder) rem.row({std::to_string(space.point(x).id), fmt(space.weight(x))});
    if (g.out != "-") {
      std::filesystem::path path(g.out);
      path.replace_extension(".remainder.csv");
      rem.write(path.string());
    }
  });

  // cd-check
  std::string instance;
  double cp = 2.0, cK = 0.0, cN = 2.0;
  int steps = 50;
  auto* cd = app.add_subcommand("cd-check", "CD_p(K,N) along the optimal interpolation");
  cd->add_option("--mu0", mu0, "source measure");
  cd->add_option("--mu1", mu1, "target measure");
  cd->add_option("--instance", instance, "built-in instance instead of files");
  cd->add_option("--p", cp, "exponent p > 1")->capture_default_str();
  cd->add_option("--K", cK, "curvature")->capture_default_str();
  cd->add_option("--N", cN, "dimension")->capture_default_str();
  cd->add_option("--grid", steps, "time steps")->capture_default_str();
  cd->callback([&] {
    const auto prob = problem_from(g, instance, mu0, mu1, cp, steps);
    SolveOptions so;
    so.seed = g.seed;
    const auto res = solve_wp(prob.space, prob.mu0, prob.mu1, cp, so);
    const auto nu = dynamical_plan(prob.space, res.plan, prob.grid);
    const double tol = std::max(g.tol, cd_tolerance(prob.space.spacing(), prob.grid[1] - prob.grid[0]));
    const auto np = nprime_ladder(cN);
    const auto r = check_cdp(prob.space, nu, cK, cN, np, tol, res.plan.degenerate);
    CsvReport rep("cd-check", g.seed);
    echo(rep, g);
    rep.config("instance", instance.empty() ? "files" : instance);
    rep.config("p", fmt(cp));
    rep.config("K", fmt(cK));
    rep.config("N", fmt(cN));
    rep.config("grid", std::to_string(steps));
    rep.note("verdict=" + r.verdict() + " worst=" + fmt(r.worst) + " check_tol=" + fmt(tol));
    rep.columns({"condition", "t", "Nprime", "margin", "witness"});
    for (const auto& row : r.rows)
      rep.row({r.condition, fmt(row.t), fmt(row.Nprime), fmt(row.margin), row.witness});
    rep.write(g.out);
    code = (r.pass || r.inconclusive) ? 0 : 1;
  });

  // ly-decompose
  double lq = 2.0, lK = 0.0, lN = 2.0;
  auto* ly = app.add_subcommand("ly-decompose", "L*Y factorisation of the Jacobian along geodesics");
  ly->add_option("--mu0", mu0, "source measure");
  ly->add_option("--mu1", mu1, "target measure");
  ly->add_option("--instance", instance, "radial, translation, stretch or synthetic");
  ly->add_option("--q", lq, "exponent q > 1")->capture_default_str();
  ly->add_option("--K", lK, "curvature")->capture_default_str();
  ly->add_option("--N", lN, "dimension")->capture_default_str();
  ly->add_option("--grid", steps, "time steps (file instances)")->capture_default_str();
  ly->callback([&] {
    CsvReport rep("ly-decompose", g.seed);
    echo(rep, g);
    rep.config("instance", instance.empty() ? "files" : instance);
    rep.config("q", fmt(lq));
    rep.config("K", fmt(lK));
    rep.config("N", fmt(lN));
    rep.columns({"geodesic_id", "t", "rho", "h", "z", "L", "Y", "margin_L_concavity", "margin_Y_cd"});
    bool pass = true;
    auto emit = [&](std::size_t id, const std::vector<double>& t, const std::vector<double>& rho,
                    const std::vector<double>& h, const std::vector<double>& z,
                    const LYFactorization& f) {
      std::size_t j = 0;
      for (std::size_t k = 0; k < t.size(); ++k) {
        if (!(t[k] > 0.0 && t[k] < 1.0)) continue;
        double yl = std::numeric_limits<double>::quiet_NaN();
        for (const auto& row : f.y_report.rows)
          if (row.t == t[k]) yl = row.margin;
        rep.row({fmt(id), fmt(t[k]), fmt(rho[k]), fmt(h.empty() ? 1.0 : h[k]), fmt(z[k]),
                 fmt(f.L[j]), fmt(f.Y[j]), fmt(f.concavity_margin), fmt(yl)});
        ++j;
      }
      pass = pass && f.concavity_margin >= -1e-6 * f.scale && f.y_report.pass &&
             f.product_defect <= 1e-9;
    };
    if (instance == "synthetic") {
      const auto s = synthetic_stretch(0.125, lq, std::size_t(steps), lK, lN);
      emit(0, s.t, s.rho, {}, s.z, s.ly);
    } else {
      const auto prob = problem_from(g, instance, mu0, mu1, lq, steps);
      InstanceOptions o;
      o.K = lK;
      o.N = lN;
      o.tol = g.tol;
      o.seed = g.seed;
      if (instance == "radial") o.grid_tol = 0.02;
      const auto R = run_instance(prob, o);
      std::size_t skipped = 0;
      for (const auto& A : R.analyses) {
        if (!A.z_ok) {
          ++skipped;
          continue;
        }
        const auto& h = A.h.begin()->second;
        emit(A.geodesic, A.t, A.rho, h, A.z, A.ly);
      }
      rep.note("geodesics=" + fmt(R.analyses.size()) + " z_inconsistent=" + fmt(skipped));
    }
    rep.write(g.out);
    code = verdict_code(pass);
  });

  // radial-oracle
  int rn = 2;
  double rq = 2.0;
  std::string quantity;
  std::vector<double> rargs;
  auto* ro = app.add_subcommand("radial-oracle", "closed forms of the radial annulus example");
  ro->add_option("--n", rn, "dimension")->capture_default_str();
  ro->add_option("--q", rq, "exponent")->capture_default_str();
  ro->add_option("--quantity", quantity, "quantity id")->required();
  ro->add_option("--args", rargs, "arguments");
  ro->callback([&] {
    const oracle::Radial o{rn, rq};
    const double v = oracle::radial_eval(o, quantity, rargs);
    CsvReport rep("radial-oracle", g.seed);
    echo(rep, g);
    rep.config("n", std::to_string(rn));
    rep.config("q", fmt(rq));
    rep.config("quantity", quantity);
    std::string a;
    for (double x : rargs) a += (a.empty() ? "" : " ") + fmt(x);
    rep.config("args", a);
    rep.columns({"quantity", "value"});
    rep.row({quantity, fmt(v)});
    rep.write(g.out);
  });

  // verify-all
  auto* va = app.add_subcommand("verify-all", "run every instance and emit a summary verdict");
  va->callback([&] {
    VerifyConfig cfg;
    cfg.seed = g.seed;
    cfg.tol = g.tol;
    const auto s = verify_all(cfg);
    s.report.write(g.out);
    code = verdict_code(s.pass);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return code;
}
