// Experiment driver: orthogonality sweep, 2D/3D convergence studies, and
// single projections from a JSON config, with CSV/JSON outputs.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hodgefsi/csv.hpp"
#include "hodgefsi/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hodgefsi;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  bool dump_fields = false;
  bool dump_operator = false;
  bool check = false;
  bool huge = false;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

json solve_report_json(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"final_relative_residual", r.final_relative_residual},
          {"compatibility_defect", r.compatibility_defect},
          {"warnings", r.warnings}};
}

json convergence_rows_json(const std::vector<ConvergenceRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json j = {{"resolution", r.resolution}, {"h", r.h}, {"error", r.error}};
    if (r.has_order) j["order"] = r.order;
    out.push_back(j);
  }
  return out;
}

SolverOptions solver_from_json(const json& cfg) {
  SolverOptions s;
  if (!cfg.contains("solver")) return s;
  const json& j = cfg["solver"];
  s.tol = j.value("tol", s.tol);
  s.maxiter = j.value("maxiter", s.maxiter);
  s.jacobi = j.value("jacobi", s.jacobi);
  return s;
}

template <int D>
void dump_fields_csv(const fs::path& path, const MacGrid<D>& g,
                     const FaceField<D>& H, const FaceField<D>& U,
                     const CellField& p) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "field,family";
  for (int a = 0; a < D; ++a) os << ",i" << a;
  os << ",x,y" << (D == 3 ? ",z" : "") << ",value\n";
  auto face_rows = [&](const char* name, const FaceField<D>& f) {
    for (int a = 0; a < D; ++a) {
      for (std::size_t fi = 0; fi < f.comp[a].size(); ++fi) {
        const auto i = g.face_coords(a, fi);
        const Vec<D> x = g.face_pos(a, i);
        os << name << "," << a;
        for (int b = 0; b < D; ++b) os << "," << i[b];
        for (int b = 0; b < D; ++b) os << "," << x[b];
        os << "," << f.comp[a][fi] << "\n";
      }
    }
  };
  face_rows("H", H);
  face_rows("U", U);
  for (std::size_t node = 0; node < p.size(); ++node) {
    const auto i = g.node_coords(node);
    const Vec<D> x = g.node_pos(i);
    os << "p,-1";
    for (int b = 0; b < D; ++b) os << "," << i[b];
    for (int b = 0; b < D; ++b) os << "," << x[b];
    os << "," << p[node] << "\n";
  }
  write_file(path, os.str());
}

template <int D>
void dump_operator_csv(const fs::path& path, const MonolithicOperator<D>& op) {
  const std::size_t n = op.grid().node_count();
  if (n > 2000) {
    std::cerr << "operator dump skipped: " << n << " nodes exceeds 2000\n";
    return;
  }
  std::ostringstream os;
  os << std::setprecision(17);
  CellField e(n, 0.0);
  std::vector<CellField> cols(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    cols[j] = op.apply(e);
    e[j] = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      os << (j ? "," : "") << cols[j][i];
    os << "\n";
  }
  write_file(path, os.str());
}

// Reference error values used when --check runs on the default
// configurations. kTable1 rows follow the grids 20^2..640^2; kTable3 rows
// follow the refinement pairs (16,32), (32,64), (64,128) and carry the value
// reported for the finer grid of each pair.
const std::vector<double> kTable1 = {3.14e-2, 5.01e-3, 3.42e-3,
                                     5.70e-4, 4.17e-4, 6.99e-5};
const std::vector<double> kTable3 = {1.62e-2, 4.31e-3, 1.26e-3};

int run_orthogonality(const Options& opt, const json& cfg) {
  SweepConfig sc;
  sc.solver = solver_from_json(cfg);
  sc.samples = cfg.value("samples", sc.samples);
  auto rows = run_orthogonality_sweep(sc);
  write_file(fs::path(opt.out) / "results.csv", emit_orthogonality_csv(rows));

  json report = {{"experiment", "orthogonality"},
                 {"samples", sc.samples},
                 {"rows", json::array()}};
  for (const auto& r : rows)
    report["rows"].push_back({{"theta", r.theta},
                              {"energy_before", r.energy_before},
                              {"energy_after", r.energy_after},
                              {"inner_product", r.inner_product}});

  bool ok = true;
  for (const auto& r : rows) {
    if (r.energy_after > r.energy_before * (1 + 1e-12)) ok = false;
    if (std::abs(r.inner_product) > 1e-10 * r.energy_before) ok = false;
  }
  report["check"] = {{"passed", ok}};
  write_file(fs::path(opt.out) / "report.json", report.dump(2));
  if (opt.check && !ok) {
    std::cerr << "orthogonality check failed\n";
    return 2;
  }
  return 0;
}

int run_conv2d(const Options& opt, const json& cfg) {
  Conv2dConfig cc;
  cc.solver = solver_from_json(cfg);
  if (cfg.contains("levels")) cc.levels = cfg["levels"].get<std::vector<int>>();
  if (opt.huge) cc.levels.push_back(640);
  auto res = run_convergence_2d(cc);

  std::string csv = "resolution,h,error,order,error_u,order_u,error_v,order_v,"
                    "error_w,order_w\n";
  for (std::size_t k = 0; k < res.combined.size(); ++k) {
    std::ostringstream os;
    os << std::setprecision(17);
    const auto& c = res.combined[k];
    os << c.resolution << "," << c.h << "," << c.error << ",";
    auto cell = [&](const ConvergenceRow& r) {
      os << r.error << ",";
      if (r.has_order) os << r.order;
    };
    if (c.has_order) os << c.order;
    os << ",";
    cell(res.u_l2[k]);
    os << ",";
    cell(res.v_abs[k]);
    os << ",";
    cell(res.w_abs[k]);
    os << "\n";
    csv += os.str();
  }
  write_file(fs::path(opt.out) / "results.csv", csv);

  json report = {{"experiment", "conv2d"},
                 {"levels", cc.levels},
                 {"combined", convergence_rows_json(res.combined)},
                 {"u_l2", convergence_rows_json(res.u_l2)},
                 {"v_abs", convergence_rows_json(res.v_abs)},
                 {"w_abs", convergence_rows_json(res.w_abs)},
                 {"fitted_order_combined", res.fitted_order_combined},
                 {"fitted_order_u", res.fitted_order_u},
                 {"fitted_order_v", res.fitted_order_v},
                 {"fitted_order_w", res.fitted_order_w},
                 {"solves", json::array()}};
  for (const auto& s : res.solves) report["solves"].push_back(solve_report_json(s));

  bool ok = res.fitted_order_combined >= 1.3 && res.fitted_order_combined <= 1.9;
  const bool default_levels = cc.levels.size() >= 5 && cc.levels[0] == 20;
  if (default_levels) {
    for (std::size_t k = 0; k < kTable1.size() && k < res.combined.size(); ++k) {
      const double ratio = res.combined[k].error / kTable1[k];
      if (ratio > 3.0 || ratio < 1.0 / 3.0) ok = false;
    }
  }
  report["check"] = {{"passed", ok}};
  write_file(fs::path(opt.out) / "report.json", report.dump(2));

  if (opt.dump_fields || opt.dump_operator) {
    auto g = conv2d_grid(cc.levels.front());
    auto op = make_operator(g, conv2d_domain(), conv2d_body(), 1.0);
    auto star = build_2d_test_inputs(g, op.heaviside());
    auto pr = project(op, star, cc.solver);
    if (opt.dump_fields)
      dump_fields_csv(fs::path(opt.out) / "fields.csv", g, op.heaviside(),
                      pr.projected.U, pr.p);
    if (opt.dump_operator)
      dump_operator_csv(fs::path(opt.out) / "operator.csv", op);
  }
  if (opt.check && !ok) {
    std::cerr << "conv2d check failed\n";
    return 2;
  }
  return 0;
}

int run_conv3d(const Options& opt, const json& cfg) {
  Conv3dConfig cc;
  cc.solver = solver_from_json(cfg);
  if (cfg.contains("levels")) cc.levels = cfg["levels"].get<std::vector<int>>();
  if (opt.huge) cc.levels.push_back(128);
  auto res = run_convergence_3d(cc);

  std::string csv = "resolution,h,error,order,error_u,order_u,error_body,"
                    "order_body\n";
  for (std::size_t k = 0; k < res.combined.size(); ++k) {
    std::ostringstream os;
    os << std::setprecision(17);
    const auto& c = res.combined[k];
    os << c.resolution << "," << c.h << "," << c.error << ",";
    if (c.has_order) os << c.order;
    os << "," << res.u_l2[k].error << ",";
    if (res.u_l2[k].has_order) os << res.u_l2[k].order;
    os << "," << res.body[k].error << ",";
    if (res.body[k].has_order) os << res.body[k].order;
    os << "\n";
    csv += os.str();
  }
  write_file(fs::path(opt.out) / "results.csv", csv);

  json report = {{"experiment", "conv3d"},
                 {"levels", cc.levels},
                 {"combined", convergence_rows_json(res.combined)},
                 {"u_l2", convergence_rows_json(res.u_l2)},
                 {"body", convergence_rows_json(res.body)},
                 {"difference_norm_grid", "coarse"},
                 {"solves", json::array()}};
  for (const auto& s : res.solves) report["solves"].push_back(solve_report_json(s));

  bool ok = true;
  for (const auto& r : res.combined)
    if (r.has_order && (r.order < 1.6 || r.order > 2.2)) ok = false;
  for (const auto& r : res.body)
    if (r.has_order && (r.order < 1.7 || r.order > 2.3)) ok = false;
  const bool default_levels = cc.levels.size() >= 3 && cc.levels[0] == 16;
  if (default_levels) {
    for (std::size_t k = 0; k < kTable3.size() && k < res.combined.size(); ++k) {
      const double ratio = res.combined[k].error / kTable3[k];
      if (ratio > 3.0 || ratio < 1.0 / 3.0) ok = false;
    }
  }
  report["check"] = {{"passed", ok}};
  write_file(fs::path(opt.out) / "report.json", report.dump(2));
  if (opt.check && !ok) {
    std::cerr << "conv3d check failed\n";
    return 2;
  }
  return 0;
}

LevelSetDomain<2> domain_from_json(const json& j) {
  const std::string kind = j.value("kind", "ball_exterior");
  if (kind == "cos_blob") return LevelSetDomain<2>::cos_blob();
  if (kind == "all_fluid") return LevelSetDomain<2>::all_fluid();
  Vec2 c = {j["center"][0].get<double>(), j["center"][1].get<double>()};
  const double r = j["radius"].get<double>();
  if (kind == "ball_interior") return LevelSetDomain<2>::ball_interior(c, r);
  return LevelSetDomain<2>::ball_exterior(c, r);
}

int run_single(const Options& opt, const json& cfg) {
  const json& box = cfg.at("box");
  Vec2 lo = {box["lo"][0].get<double>(), box["lo"][1].get<double>()};
  Vec2 hi = {box["hi"][0].get<double>(), box["hi"][1].get<double>()};
  std::array<int, 2> n = {cfg.at("resolution")[0].get<int>(),
                          cfg.at("resolution")[1].get<int>()};
  std::array<Topology, 2> topo;
  for (int a = 0; a < 2; ++a) {
    const std::string t = cfg.at("topology")[a].get<std::string>();
    if (t != "periodic" && t != "wall")
      throw std::runtime_error("topology must be periodic or wall");
    topo[a] = t == "periodic" ? Topology::Periodic : Topology::Wall;
  }
  auto g = build_grid<2>(lo, hi, n, topo);
  auto dom = domain_from_json(cfg.at("domain"));
  const json& bj = cfg.at("body");
  RigidBody<2> body(bj.at("mass").get<double>(),
                    bj.at("inertia").get<double>(),
                    {bj.at("center")[0].get<double>(),
                     bj.at("center")[1].get<double>()});
  const double rho = cfg.value("rho", 1.0);
  auto op = make_operator(g, dom, body, rho);

  CoupledState<2> star;
  const Vec2 ustar = {cfg.at("ustar")[0].get<double>(),
                      cfg.at("ustar")[1].get<double>()};
  star.U = sample_face_field<2>(
      g, op.heaviside(),
      {[&](const Vec2&) { return ustar[0]; },
       [&](const Vec2&) { return ustar[1]; }});
  star.v = {cfg.at("vstar")[0].get<double>(), cfg.at("vstar")[1].get<double>()};
  star.omega = cfg.value("wstar", 0.0);

  auto res = project(op, star, solver_from_json(cfg));

  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "quantity,value\n"
      << "energy_before," << res.diagnostics.energy_before << "\n"
      << "energy_after," << res.diagnostics.energy_after << "\n"
      << "orthogonality," << res.diagnostics.orthogonality << "\n"
      << "post_divergence_residual,"
      << res.diagnostics.post_divergence_residual << "\n"
      << "v_x," << res.projected.v[0] << "\n"
      << "v_y," << res.projected.v[1] << "\n"
      << "omega," << res.projected.omega << "\n";
  write_file(fs::path(opt.out) / "results.csv", csv.str());

  json report = {{"experiment", "single-projection"},
                 {"energy_before", res.diagnostics.energy_before},
                 {"energy_after", res.diagnostics.energy_after},
                 {"orthogonality", res.diagnostics.orthogonality},
                 {"post_divergence_residual",
                  res.diagnostics.post_divergence_residual},
                 {"v", {res.projected.v[0], res.projected.v[1]}},
                 {"omega", res.projected.omega},
                 {"solve", solve_report_json(res.diagnostics.solve_report)}};
  write_file(fs::path(opt.out) / "report.json", report.dump(2));

  if (opt.dump_fields)
    dump_fields_csv(fs::path(opt.out) / "fields.csv", g, op.heaviside(),
                    res.projected.U, res.p);
  if (opt.dump_operator)
    dump_operator_csv(fs::path(opt.out) / "operator.csv", op);
  return 0;
}

int dispatch(const Options& opt, const json& cfg) {
  fs::create_directories(opt.out);
  const std::string kind = cfg.value("experiment", "single-projection");
  if (kind == "orthogonality") return run_orthogonality(opt, cfg);
  if (kind == "conv2d") return run_conv2d(opt, cfg);
  if (kind == "conv3d") return run_conv3d(opt, cfg);
  if (kind == "single-projection") return run_single(opt, cfg);
  throw std::runtime_error("unknown experiment kind: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Augmented Hodge projection experiments"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out, "output directory");
    sub->add_flag("--dump-fields", opt.dump_fields, "write fields.csv");
    sub->add_flag("--dump-operator", opt.dump_operator,
                  "write dense operator.csv (<= 2000 nodes)");
    sub->add_flag("--check", opt.check,
                  "exit 2 when acceptance thresholds are violated");
    sub->add_flag("--huge", opt.huge, "include the largest grid level");
  };

  CLI::App* run = app.add_subcommand("run", "run an experiment from a config");
  run->add_option("--config", opt.config, "JSON config file")->required();
  add_common(run);
  CLI::App* orth =
      app.add_subcommand("orthogonality", "energy-orthogonality sweep");
  add_common(orth);
  CLI::App* c2 = app.add_subcommand("conv2d", "2D convergence study");
  add_common(c2);
  CLI::App* c3 = app.add_subcommand("conv3d", "3D convergence study");
  add_common(c3);

  CLI11_PARSE(app, argc, argv);

  try {
    json cfg;
    if (run->parsed()) {
      std::ifstream f(opt.config);
      if (!f) throw std::runtime_error("cannot open config " + opt.config);
      cfg = json::parse(f);
    } else if (orth->parsed()) {
      cfg = {{"experiment", "orthogonality"}};
    } else if (c2->parsed()) {
      cfg = {{"experiment", "conv2d"}};
    } else {
      cfg = {{"experiment", "conv3d"}};
    }
    return dispatch(opt, cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
