#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hodgefsi/field_ops.hpp"
#include "oracles.hpp"

using namespace hodgefsi;

namespace {

MacGrid<2> sweep_grid() {
  return build_grid<2>({-2, -4}, {2, 4}, {40, 80},
                       {Topology::Periodic, Topology::Periodic});
}

template <int D>
FaceField<D> random_face_field(const MacGrid<D>& g) {
  FaceField<D> f = g.make_face_field();
  for (int a = 0; a < D; ++a)
    for (auto& v : f.comp[a]) v = oracles::uniform(-1, 1);
  return f;
}

CellField random_cell_field(const MacGrid<2>& g) {
  CellField p = g.make_cell_field();
  for (auto& v : p) v = oracles::uniform(-1, 1);
  return p;
}

}  // namespace

TEST_CASE("gradient: constants and linear fields") {
  auto g = build_grid<2>({0, 0}, {1, 1}, {8, 8},
                         {Topology::Wall, Topology::Wall});
  CellField ones(g.node_count(), 3.7);
  auto gp = gradient(g, ones);
  for (int a = 0; a < 2; ++a)
    for (double v : gp.comp[a]) CHECK(v == 0.0);

  CellField lin = g.make_cell_field();
  for (std::size_t k = 0; k < g.node_count(); ++k)
    lin[k] = g.node_pos(g.node_coords(k))[0];
  auto gl = gradient(g, lin);
  for (std::size_t f = 0; f < g.face_count(0); ++f) {
    const auto i = g.face_coords(0, f);
    if (g.is_boundary_face(0, i))
      CHECK(gl.comp[0][f] == 0.0);
    else
      CHECK(gl.comp[0][f] == doctest::Approx(1.0).epsilon(1e-13));
  }
  for (double v : gl.comp[1]) CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("divergence: uniform field is divergence-free on a torus") {
  auto g = sweep_grid();
  auto U = g.make_face_field();
  U.fill(2.5);
  auto d = divergence(g, U);
  for (double v : d) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("divergence telescopes to zero total") {
  auto g = sweep_grid();
  auto U = random_face_field(g);
  auto d = divergence(g, U);
  double total = 0;
  for (double v : d) total += v;
  CHECK(std::abs(total) < 1e-11);

  // wall: interior fluxes cancel; boundary fluxes are absent by construction
  auto w = build_grid<2>({0, 0}, {1, 1}, {10, 10},
                         {Topology::Wall, Topology::Wall});
  auto V = random_face_field(w);
  auto dw = divergence(w, V);
  double tw = 0;
  for (double v : dw) tw += v;
  // total = sum of boundary fluxes, which divergence treats as zero
  CHECK(std::abs(tw) < 1e-12);
}

TEST_CASE("adjointness: <DV, p> = -<V, Gp> on periodic and wall grids") {
  auto check_grid = [](auto g) {
    auto V = random_face_field(g);
    auto p = random_cell_field(g);
    const double hd = g.cell_measure();
    auto dv = divergence(g, V);
    auto gp = gradient(g, p);
    double lhs = 0;
    for (std::size_t k = 0; k < p.size(); ++k) lhs += dv[k] * p[k] * hd;
    double rhs = 0;
    for (int a = 0; a < 2; ++a)
      for (std::size_t f = 0; f < V.comp[a].size(); ++f)
        rhs -= V.comp[a][f] * gp.comp[a][f] * hd;
    double scale = 0;
    for (std::size_t k = 0; k < p.size(); ++k) scale += std::abs(p[k]) * hd;
    CHECK(std::abs(lhs - rhs) < 1e-13 * std::max(1.0, scale));
  };
  check_grid(sweep_grid());
  check_grid(build_grid<2>({0, 0}, {1, 1}, {16, 16},
                           {Topology::Wall, Topology::Wall}));
  check_grid(build_grid<2>({0, 0}, {1, 2}, {8, 16},
                           {Topology::Wall, Topology::Periodic}));
}

TEST_CASE("adjointness holds in 3D") {
  auto g = build_grid<3>({0, 0, 0}, {1, 1, 1}, {6, 6, 6},
                         {Topology::Wall, Topology::Wall, Topology::Periodic});
  auto V = random_face_field(g);
  CellField p = g.make_cell_field();
  for (auto& v : p) v = oracles::uniform(-1, 1);
  const double hd = g.cell_measure();
  auto dv = divergence(g, V);
  auto gp = gradient(g, p);
  double lhs = 0, rhs = 0;
  for (std::size_t k = 0; k < p.size(); ++k) lhs += dv[k] * p[k] * hd;
  for (int a = 0; a < 3; ++a)
    for (std::size_t f = 0; f < V.comp[a].size(); ++f)
      rhs -= V.comp[a][f] * gp.comp[a][f] * hd;
  CHECK(std::abs(lhs - rhs) < 1e-13);
}

TEST_CASE("grad_heaviside: planar interface recovers the normal measure") {
  auto g = build_grid<2>({0, 0}, {1, 1}, {10, 10},
                         {Topology::Wall, Topology::Wall});
  LevelSetDomain<2> plane;
  plane.phi = [](const Vec2& x) { return x[0] - 0.47; };
  auto H = compute_heaviside(g, plane);
  auto GH = grad_heaviside(g, H);
  Vec2 total = {0, 0};
  for (const auto& v : GH.val) total += g.cell_measure() * v;
  // sum GH h^2 = -int_Gamma n dS; n = (-1, 0) outward of fluid, |Gamma| = 1
  CHECK(total[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(total[1]) < 1e-13);
}

TEST_CASE("grad_heaviside: closed interface sums to zero exactly") {
  auto g = sweep_grid();
  auto dom = LevelSetDomain<2>::ball_exterior({0, 0}, 1.0);
  auto H = compute_heaviside(g, dom);
  auto GH = grad_heaviside(g, H);
  Vec2 total = {0, 0};
  Vec2 torque_ref = {0, 0};
  double torque = 0;
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    total += g.cell_measure() * GH.val[node];
    const Vec2 x = g.node_pos(g.node_coords(node));
    torque += g.cell_measure() * cross(x, GH.val[node]);
  }
  (void)torque_ref;
  CHECK(std::abs(total[0]) < 1e-13);
  CHECK(std::abs(total[1]) < 1e-13);
  CHECK(std::abs(torque) < 1e-13);
}

TEST_CASE("cell-by-cell normal identity against exact circle fractions") {
  // With exact segment/disk fractions, -GH h^2 equals the arc integral of the
  // outward-of-fluid normal over Gamma within each cell, exactly.
  auto g = sweep_grid();
  const Vec2 ctr = {0, 0};
  const double R = 1.0;
  auto exact_H = g.make_face_field();
  for (int a = 0; a < 2; ++a)
    for (std::size_t f = 0; f < g.face_count(a); ++f) {
      const auto i = g.face_coords(a, f);
      const Vec2 c = g.face_pos(a, i);
      Vec2 p0 = c, p1 = c;
      p0[1 - a] -= 0.5 * g.h;
      p1[1 - a] += 0.5 * g.h;
      exact_H.comp[a][f] =
          1.0 - oracles::segment_disk_length(p0, p1, ctr, R) / g.h;
    }
  auto GH = grad_heaviside(g, exact_H);
  int cut_cells = 0;
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const Vec2 x = g.node_pos(g.node_coords(node));
    if (std::abs(norm(x) - R) > 2 * g.h) continue;
    const Vec2 lhs = -g.cell_measure() * GH.val[node];
    const Vec2 rhs = oracles::circle_normal_integral(
        ctr, R, x[0] - 0.5 * g.h, x[0] + 0.5 * g.h, x[1] - 0.5 * g.h,
        x[1] + 0.5 * g.h, /*fluid_outside=*/true);
    CHECK(std::abs(lhs[0] - rhs[0]) < 1e-3 * g.h * g.h);
    CHECK(std::abs(lhs[1] - rhs[1]) < 1e-3 * g.h * g.h);
    if (norm(GH.val[node]) > 0) ++cut_cells;
  }
  CHECK(cut_cells > 30);
}

TEST_CASE("interface points exist exactly at cut cells of the sweep geometry") {
  auto g = sweep_grid();
  auto dom = LevelSetDomain<2>::ball_exterior({0, 0}, 1.0);
  auto H = compute_heaviside(g, dom);
  auto cls = classify_nodes(g, H, dom);
  auto pts = compute_interface_points(g, dom, cls);
  auto GH = grad_heaviside(g, H);
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    // skip grazing contacts where GH is pure roundoff (corner on the circle)
    if (norm(GH.val[node]) < 1e-10 / g.h) continue;
    CHECK(pts[node].present);
    CHECK_FALSE(pts[node].under_resolved);
    // the midpoint of the roots lies within O(h) of the circle
    CHECK(std::abs(norm(pts[node].position) - 1.0) < g.h);
  }
}

TEST_CASE("j_field: torque density matches the arc integral per cell") {
  auto g = sweep_grid();
  auto dom = LevelSetDomain<2>::ball_exterior({0, 0}, 1.0);
  RigidBody<2> body(4.0, 2.0, {0, 0});
  auto H = compute_heaviside(g, dom);
  auto cls = classify_nodes(g, H, dom);
  auto pts = compute_interface_points(g, dom, cls);
  auto GH = grad_heaviside(g, H);
  auto J = j_field(g, GH, pts, body);
  auto one = [](const Vec2&) { return 1.0; };
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    if (norm(GH.val[node]) == 0.0) {
      CHECK(J[node] == 0.0);
      continue;
    }
    const Vec2 x = g.node_pos(g.node_coords(node));
    const double lhs = J[node] * g.cell_measure();
    const double rhs = -oracles::circle_weighted_torque_integral(
        {0, 0}, 1.0, x[0] - 0.5 * g.h, x[0] + 0.5 * g.h, x[1] - 0.5 * g.h,
        x[1] + 0.5 * g.h, /*fluid_outside=*/true, body.c, one);
    // J h^2 = (x~-c) x (GH h^2) approximates -int (x-c) x n dS at O(h^2)
    CHECK(std::abs(lhs - rhs) < 5.0 * g.h * g.h * g.h);
  }
}

TEST_CASE("j_field: total torque of a closed interface vanishes exactly") {
  auto g = sweep_grid();
  // off-center body reference point exercises the (x~ - c) shift
  auto dom = LevelSetDomain<2>::ball_exterior({0.13, -0.31}, 1.0);
  RigidBody<2> body(4.0, 2.0, {0.13, -0.31});
  auto H = compute_heaviside(g, dom);
  auto cls = classify_nodes(g, H, dom);
  auto pts = compute_interface_points(g, dom, cls);
  auto GH = grad_heaviside(g, H);
  auto J = j_field(g, GH, pts, body);
  double total = 0;
  for (std::size_t node = 0; node < g.node_count(); ++node)
    total += J[node] * g.cell_measure();
  CHECK(std::abs(total) < 1e-13);
}

TEST_CASE("SymMat3: solve inverts mul; non-SPD rejected") {
  SymMat3 m;
  m.a = {4, 1, 0, 1, 3, 1, 0, 1, 2};
  const Vec3 x = {0.3, -1.2, 0.7};
  const Vec3 b = m.mul(x);
  const Vec3 y = m.solve(b);
  for (int i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-12));

  SymMat3 bad = SymMat3::identity(-1.0);
  CHECK_THROWS(bad.llt());
  SymMat3 asym;
  asym.a = {1, 2, 0, 0, 1, 0, 0, 0, 1};
  CHECK_THROWS(asym.llt());
}

TEST_CASE("RigidBody: validation") {
  CHECK_THROWS(RigidBody<2>(-1.0, 1.0, {0, 0}));
  CHECK_THROWS(RigidBody<2>(1.0, 0.0, {0, 0}));
  CHECK_THROWS(RigidBody<3>(1.0, SymMat3::identity(-2.0), {0, 0, 0}));
  RigidBody<3> ok(8 * M_PI / 3, SymMat3::identity(16 * M_PI / 15), {0, 0, 0});
  const Vec3 w = {0.1, 0.2, -0.3};
  const Vec3 back = ok.inertia_solve(ok.inertia_mul(w));
  for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(w[i]).epsilon(1e-13));
}

TEST_CASE("E_h inner product: hand value, symmetry, bilinearity") {
  auto g = build_grid<2>({0, 0}, {1, 1}, {4, 4},
                         {Topology::Periodic, Topology::Periodic});
  auto H = g.make_face_field();
  H.fill(1.0);
  RigidBody<2> body(2.0, 3.0, {0, 0});
  CoupledState<2> s = CoupledState<2>::zero(g);
  s.U.fill(1.0);
  s.v = {1.0, 0.0};
  s.omega = 2.0;
  // fluid: 1/2 * rho * 32 faces * 1 * h^2 = 1/2*32/16 = 1; body: 1/2*2*1 = 1;
  // angular: 1/2*3*4 = 6
  const double e = inner_product_Eh(g, H, 1.0, body, s, s);
  CHECK(e == doctest::Approx(8.0).epsilon(1e-14));

  CoupledState<2> a = CoupledState<2>::zero(g), b = CoupledState<2>::zero(g);
  for (int ax = 0; ax < 2; ++ax)
    for (std::size_t f = 0; f < a.U.comp[ax].size(); ++f) {
      a.U.comp[ax][f] = oracles::uniform(-1, 1);
      b.U.comp[ax][f] = oracles::uniform(-1, 1);
    }
  a.v = {0.2, -0.7};
  b.v = {1.1, 0.4};
  a.omega = -0.3;
  b.omega = 0.9;
  const double ab = inner_product_Eh(g, H, 1.0, body, a, b);
  const double ba = inner_product_Eh(g, H, 1.0, body, b, a);
  CHECK(ab == doctest::Approx(ba).epsilon(1e-14));
  CHECK(energy_norm(g, H, 1.0, body, a) ==
        doctest::Approx(std::sqrt(inner_product_Eh(g, H, 1.0, body, a, a)))
            .epsilon(1e-14));
}

TEST_CASE("state_sub subtracts all components") {
  auto g = build_grid<2>({0, 0}, {1, 1}, {3, 3},
                         {Topology::Periodic, Topology::Periodic});
  auto a = CoupledState<2>::zero(g);
  auto b = CoupledState<2>::zero(g);
  a.U.fill(2.0);
  b.U.fill(0.5);
  a.v = {1, 2};
  b.v = {0.5, 0.5};
  a.omega = 3;
  b.omega = 1;
  auto d = state_sub(a, b);
  CHECK(d.U.comp[0][0] == 1.5);
  CHECK(d.v[0] == 0.5);
  CHECK(d.v[1] == 1.5);
  CHECK(d.omega == 2.0);
}
