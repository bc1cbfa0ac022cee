#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hodgefsi/grid.hpp"
#include "oracles.hpp"

using namespace hodgefsi;

namespace {

MacGrid<2> sweep_grid() {
  return build_grid<2>({-2, -4}, {2, 4}, {40, 80},
                       {Topology::Periodic, Topology::Periodic});
}

}  // namespace

TEST_CASE("build_grid: spacing and counts") {
  auto g = sweep_grid();
  CHECK(g.h == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(g.node_count() == 3200);
  CHECK(g.face_count(0) == 3200);  // periodic: n faces per axis
  CHECK(g.face_count(1) == 3200);

  auto w = build_grid<2>({0, 0}, {1, 2}, {4, 8}, {Topology::Wall, Topology::Wall});
  CHECK(w.h == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(w.face_count(0) == 5 * 8);
  CHECK(w.face_count(1) == 4 * 9);

  auto g3 = build_grid<3>({-2, -2, -4}, {2, 2, 4}, {4, 4, 8},
                          {Topology::Wall, Topology::Wall, Topology::Wall});
  CHECK(g3.node_count() == 128);
  CHECK(g3.face_count(2) == 4 * 4 * 9);
  CHECK(g3.cell_measure() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("build_grid: rejects bad inputs") {
  CHECK_THROWS(build_grid<2>({0, 0}, {1, 1}, {1, 4},
                             {Topology::Wall, Topology::Wall}));
  CHECK_THROWS(build_grid<2>({0, 0}, {-1, 1}, {4, 4},
                             {Topology::Wall, Topology::Wall}));
  // non-square cells
  CHECK_THROWS(build_grid<2>({0, 0}, {1, 1}, {4, 8},
                             {Topology::Wall, Topology::Wall}));
}

TEST_CASE("index round-trips and positions") {
  auto g = build_grid<2>({0, 0}, {1, 1}, {5, 5},
                         {Topology::Wall, Topology::Periodic});
  for (std::size_t k = 0; k < g.node_count(); ++k)
    CHECK(g.node_index(g.node_coords(k)) == k);
  for (int a = 0; a < 2; ++a)
    for (std::size_t k = 0; k < g.face_count(a); ++k)
      CHECK(g.face_index(a, g.face_coords(a, k)) == k);

  // node centers and face planes
  auto x = g.node_pos({0, 0});
  CHECK(x[0] == doctest::Approx(0.1).epsilon(1e-14));
  auto f = g.face_pos(0, {1, 0});
  CHECK(f[0] == doctest::Approx(0.2).epsilon(1e-14));  // on a grid plane
  CHECK(f[1] == doctest::Approx(0.1).epsilon(1e-14));  // at a cell center
}

TEST_CASE("node_face: neighbors share a face; periodic wraps") {
  auto g = build_grid<2>({0, 0}, {1, 1}, {4, 4},
                         {Topology::Periodic, Topology::Periodic});
  CHECK(g.node_face(0, {1, 2}, 1) == g.node_face(0, {2, 2}, 0));
  CHECK(g.node_face(0, {3, 2}, 1) == g.node_face(0, {0, 2}, 0));  // wrap

  auto w = build_grid<2>({0, 0}, {1, 1}, {4, 4},
                         {Topology::Wall, Topology::Wall});
  CHECK(w.is_boundary_face(0, {0, 1}));
  CHECK(w.is_boundary_face(0, {4, 1}));
  CHECK_FALSE(w.is_boundary_face(0, {2, 1}));
}

TEST_CASE("heaviside: partition of unity and range") {
  auto g = sweep_grid();
  auto dom = LevelSetDomain<2>::ball_exterior({0, 0}, 1.0);
  auto H = compute_heaviside(g, dom);
  auto Hn = compute_heaviside(g, dom.negated());
  for (int a = 0; a < 2; ++a)
    for (std::size_t f = 0; f < g.face_count(a); ++f) {
      CHECK(H.comp[a][f] >= 0.0);
      CHECK(H.comp[a][f] <= 1.0);
      CHECK(H.comp[a][f] + Hn.comp[a][f] == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("heaviside: cut-face count scales with the perimeter") {
  auto g = sweep_grid();
  auto dom = LevelSetDomain<2>::ball_exterior({0, 0}, 1.0);
  auto H = compute_heaviside(g, dom);
  int cut = 0;
  for (int a = 0; a < 2; ++a)
    for (std::size_t f = 0; f < g.face_count(a); ++f)
      if (H.comp[a][f] > 0.0 && H.comp[a][f] < 1.0) ++cut;
  // circle of radius 1 at h = 0.1: on the order of 2*pi/h ~ 63 cut faces.
  // The generic-position count is reduced because the circle passes through
  // 12 lattice points exactly ((+-0.6,+-0.8), (+-0.8,+-0.6), (0,+-1),
  // (+-1,0)), each collapsing two crossings to exact 0/1 fractions: 56.
  CHECK(cut == 56);
  CHECK(cut >= 2 * M_PI * 10 - 12 * 2);
  CHECK(cut <= 4 * 2 * M_PI * 10);
}

TEST_CASE("heaviside: fractions match the exact disk geometry to O(h)") {
  auto g = sweep_grid();
  auto dom = LevelSetDomain<2>::ball_exterior({0, 0}, 1.0);
  auto H = compute_heaviside(g, dom);
  for (std::size_t f = 0; f < g.face_count(0); ++f) {
    const auto i = g.face_coords(0, f);
    const Vec2 c = g.face_pos(0, i);
    Vec2 a = c, b = c;
    a[1] -= 0.5 * g.h;
    b[1] += 0.5 * g.h;
    const double solid = oracles::segment_disk_length(a, b, {0, 0}, 1.0);
    const double exact = 1.0 - solid / g.h;
    CHECK(std::abs(H.comp[0][f] - exact) < 0.15);
  }
}

TEST_CASE("classification: partition and distance oracle") {
  auto g = sweep_grid();
  auto dom = LevelSetDomain<2>::ball_exterior({0, 0}, 1.0);
  auto H = compute_heaviside(g, dom);
  auto cls = classify_nodes(g, H, dom);
  CHECK(cls.interior.size() + cls.near_boundary.size() + cls.excluded.size() ==
        g.node_count());
  CHECK(cls.included_count() == cls.interior.size() + cls.near_boundary.size());
  CHECK(!cls.near_boundary.empty());

  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const double r = norm(g.node_pos(g.node_coords(node)));
    // cells strictly inside the solid must be excluded, and vice versa
    if (r < 1.0 - g.h) CHECK(cls.kind[node] == NodeKind::Excluded);
    if (r > 1.0 + g.h) CHECK(cls.kind[node] == NodeKind::Interior);
    // definition check against the incident fractions
    bool all_one = true, all_zero = true;
    const auto i = g.node_coords(node);
    for (int a = 0; a < 2; ++a)
      for (int side = 0; side < 2; ++side) {
        const double v = H.comp[a][g.node_face(a, i, side)];
        all_one = all_one && v == 1.0;
        all_zero = all_zero && v == 0.0;
      }
    if (cls.kind[node] == NodeKind::Interior) CHECK(all_one);
    if (cls.kind[node] == NodeKind::Excluded) {
      CHECK(all_zero);
      CHECK_FALSE(is_fluid(dom(g.node_pos(i))));
    }
  }
}

TEST_CASE("classification: all-fluid and all-solid") {
  auto g = build_grid<2>({0, 0}, {1, 1}, {4, 4},
                         {Topology::Wall, Topology::Wall});
  auto fluid = LevelSetDomain<2>::all_fluid();
  auto Hf = compute_heaviside(g, fluid);
  auto cf = classify_nodes(g, Hf, fluid);
  CHECK(cf.interior.size() == g.node_count());

  auto solid = LevelSetDomain<2>::all_solid();
  auto Hs = compute_heaviside(g, solid);
  auto cs = classify_nodes(g, Hs, solid);
  CHECK(cs.excluded.size() == g.node_count());
  CHECK_THROWS_WITH_AS(check_connectivity(g, Hs, cs), "grid: no fluid nodes",
                       std::runtime_error);
}

TEST_CASE("connectivity: two strips separated by a solid band") {
  auto g = build_grid<2>({-2, -2}, {2, 2}, {20, 20},
                         {Topology::Wall, Topology::Wall});
  LevelSetDomain<2> strips;
  strips.phi = [](const Vec2& x) { return std::abs(x[1]) - 1.0; };
  auto H = compute_heaviside(g, strips);
  auto cls = classify_nodes(g, H, strips);
  CHECK_THROWS_WITH_AS(check_connectivity(g, H, cls),
                       "grid: fluid region is disconnected",
                       std::runtime_error);
}

TEST_CASE("connectivity: sweep geometry is connected") {
  auto g = sweep_grid();
  auto dom = LevelSetDomain<2>::ball_exterior({0, 0}, 1.0);
  auto H = compute_heaviside(g, dom);
  auto cls = classify_nodes(g, H, dom);
  CHECK_NOTHROW(check_connectivity(g, H, cls));
}

TEST_CASE("3D heaviside and classification around a ball") {
  auto g = build_grid<3>({-2, -2, -4}, {2, 2, 4}, {16, 16, 32},
                         {Topology::Wall, Topology::Wall, Topology::Wall});
  auto dom = LevelSetDomain<3>::ball_exterior({0, 0, 0}, 1.0);
  auto H = compute_heaviside(g, dom);
  auto cls = classify_nodes(g, H, dom);
  CHECK(!cls.excluded.empty());
  CHECK(!cls.near_boundary.empty());
  CHECK_NOTHROW(check_connectivity(g, H, cls));
  // excluded volume approximates the ball volume 4pi/3
  const double vol = cls.excluded.size() * g.cell_measure();
  CHECK(vol < 4.0 * M_PI / 3.0);
  CHECK(vol > 0.5 * 4.0 * M_PI / 3.0);
}
