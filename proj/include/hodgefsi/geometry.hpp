#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hodgefsi/vec.hpp"

namespace hodgefsi {

// Signed description of the fluid region: phi > 0 means fluid, phi <= ... ;
// phi == 0 is classified as fluid (closed fluid region).
template <int D>
struct LevelSetDomain {
  std::function<double(const Vec<D>&)> phi;
  std::string kind;

  double operator()(const Vec<D>& x) const { return phi(x); }

  // Fluid fills the space outside a ball. phi = |x-c|^2 - r^2.
  static LevelSetDomain ball_exterior(const Vec<D>& center, double radius) {
    LevelSetDomain d;
    d.kind = "ball_exterior";
    d.phi = [center, radius](const Vec<D>& x) {
      double s = 0;
      for (int i = 0; i < D; ++i) s += (x[i] - center[i]) * (x[i] - center[i]);
      return s - radius * radius;
    };
    return d;
  }

  // Fluid is the interior of a ball.
  static LevelSetDomain ball_interior(const Vec<D>& center, double radius) {
    LevelSetDomain d;
    d.kind = "ball_interior";
    d.phi = [center, radius](const Vec<D>& x) {
      double s = 0;
      for (int i = 0; i < D; ++i) s += (x[i] - center[i]) * (x[i] - center[i]);
      return radius * radius - s;
    };
    return d;
  }

  // Central blob fluid region { cos x cos y > sqrt(3)/2 } (2D only).
  static LevelSetDomain cos_blob() {
    static_assert(D == 2, "cos_blob is a planar level set");
    LevelSetDomain d;
    d.kind = "cos_blob";
    d.phi = [](const Vec<D>& x) {
      return std::cos(x[0]) * std::cos(x[1]) - std::sqrt(3.0) / 2.0;
    };
    return d;
  }

  // Everything is fluid.
  static LevelSetDomain all_fluid() {
    LevelSetDomain d;
    d.kind = "all_fluid";
    d.phi = [](const Vec<D>&) { return 1.0; };
    return d;
  }

  static LevelSetDomain all_solid() {
    LevelSetDomain d;
    d.kind = "all_solid";
    d.phi = [](const Vec<D>&) { return -1.0; };
    return d;
  }

  // Complement of this region.
  LevelSetDomain negated() const {
    LevelSetDomain d;
    d.kind = "not_" + kind;
    auto f = phi;
    d.phi = [f](const Vec<D>& x) { return -f(x); };
    return d;
  }

  // Intersection with the box [lo, hi]; keeps the level-set composable.
  LevelSetDomain clipped_to_box(const Vec<D>& lo, const Vec<D>& hi) const {
    LevelSetDomain d;
    d.kind = kind + "_boxclip";
    auto f = phi;
    d.phi = [f, lo, hi](const Vec<D>& x) {
      double v = f(x);
      for (int i = 0; i < D; ++i) {
        v = std::min(v, x[i] - lo[i]);
        v = std::min(v, hi[i] - x[i]);
      }
      return v;
    };
    return d;
  }
};

// Representative point of Gamma within a control volume.
template <int D>
struct InterfacePoint {
  Vec<D> position{};
  bool present = false;
  bool under_resolved = false;  // more than two boundary roots (2D)
};

inline bool is_fluid(double phi) { return phi >= 0.0; }

// Fluid fraction of the segment [a,b] by the single linear root rule on
// phi(a), phi(b).
template <int D>
double edge_fluid_fraction(const LevelSetDomain<D>& domain, const Vec<D>& a,
                           const Vec<D>& b) {
  const double pa = domain(a);
  const double pb = domain(b);
  if (is_fluid(pa) && is_fluid(pb)) return 1.0;
  if (!is_fluid(pa) && !is_fluid(pb)) return 0.0;
  const double t = pa / (pa - pb);  // root location in [0,1]
  return is_fluid(pa) ? t : 1.0 - t;
}

namespace detail {

// Area fraction of triangle (v0,v1,v2) where the linear interpolant of
// (p0,p1,p2) is nonnegative. Exact for affine data.
inline double triangle_positive_fraction(const Vec2& v0, const Vec2& v1,
                                         const Vec2& v2, double p0, double p1,
                                         double p2) {
  const Vec2 vs[3] = {v0, v1, v2};
  const double ps[3] = {p0, p1, p2};
  // uncut triangles are exact by construction
  if (is_fluid(p0) && is_fluid(p1) && is_fluid(p2)) return 1.0;
  if (!is_fluid(p0) && !is_fluid(p1) && !is_fluid(p2)) return 0.0;
  Vec2 poly[7];
  int np = 0;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    if (is_fluid(ps[i])) poly[np++] = vs[i];
    if (is_fluid(ps[i]) != is_fluid(ps[j])) {
      const double t = ps[i] / (ps[i] - ps[j]);
      poly[np++] = {vs[i][0] + t * (vs[j][0] - vs[i][0]),
                    vs[i][1] + t * (vs[j][1] - vs[i][1])};
    }
  }
  double area2 = 0;
  for (int i = 0; i < np; ++i) {
    const int j = (i + 1) % np;
    area2 += cross(poly[i], poly[j]);
  }
  double tri2 = cross(v1 - v0, v2 - v0);
  if (tri2 == 0.0) return 0.0;
  return std::clamp(area2 / tri2, 0.0, 1.0);
}

// Positive-area fraction of a quad from its corner values: fan of four
// triangles about the center, whose bilinear value is the corner mean.
inline double quad_positive_fraction(const Vec2 c[4], const double p[4]) {
  const Vec2 mid = {0.25 * (c[0][0] + c[1][0] + c[2][0] + c[3][0]),
                    0.25 * (c[0][1] + c[1][1] + c[2][1] + c[3][1])};
  const double pm = 0.25 * (p[0] + p[1] + p[2] + p[3]);
  double frac = 0;
  for (int i = 0; i < 4; ++i) {
    const int j = (i + 1) % 4;
    frac += 0.25 * triangle_positive_fraction(c[i], c[j], mid, p[i], p[j], pm);
  }
  return std::clamp(frac, 0.0, 1.0);
}

}  // namespace detail

// Axis-aligned rectangle embedded in R^3: corner, two spanning axes, extents.
struct Rect3 {
  Vec3 origin;
  int axis_u = 0;
  int axis_v = 1;
  double len_u = 0;
  double len_v = 0;
};

// Fluid-area fraction of a 3D axis-aligned rectangle from the bilinear
// interpolant of phi at its corners.
inline double face_fluid_fraction(const LevelSetDomain<3>& domain,
                                  const Rect3& rect) {
  if (rect.len_u <= 0 || rect.len_v <= 0)
    throw std::invalid_argument("face_fluid_fraction: degenerate rectangle");
  Vec3 corner[4] = {rect.origin, rect.origin, rect.origin, rect.origin};
  corner[1][rect.axis_u] += rect.len_u;
  corner[2][rect.axis_u] += rect.len_u;
  corner[2][rect.axis_v] += rect.len_v;
  corner[3][rect.axis_v] += rect.len_v;
  Vec2 c2[4];
  double p[4];
  for (int i = 0; i < 4; ++i) {
    c2[i] = {corner[i][rect.axis_u], corner[i][rect.axis_v]};
    p[i] = domain(corner[i]);
  }
  return detail::quad_positive_fraction(c2, p);
}

// 2D: midpoint of the boundary roots of phi along the four cell edges.
inline InterfacePoint<2> interface_point(const LevelSetDomain<2>& domain,
                                         const Vec2& lo, const Vec2& hi) {
  const Vec2 corner[4] = {{lo[0], lo[1]}, {hi[0], lo[1]}, {hi[0], hi[1]},
                          {lo[0], hi[1]}};
  double p[4];
  for (int i = 0; i < 4; ++i) p[i] = domain(corner[i]);

  std::vector<Vec2> roots;
  for (int i = 0; i < 4; ++i) {
    const int j = (i + 1) % 4;
    if (is_fluid(p[i]) != is_fluid(p[j])) {
      const double t = p[i] / (p[i] - p[j]);
      roots.push_back({corner[i][0] + t * (corner[j][0] - corner[i][0]),
                       corner[i][1] + t * (corner[j][1] - corner[i][1])});
    }
  }

  InterfacePoint<2> ip;
  if (roots.empty()) return ip;
  ip.present = true;
  ip.under_resolved = roots.size() > 2;
  Vec2 s = {0, 0};
  for (const auto& r : roots) s += r;
  ip.position = (1.0 / static_cast<double>(roots.size())) * s;
  return ip;
}

// 3D: the cell center stands in for the interface point; present whenever a
// face of the cell is cut.
inline InterfacePoint<3> interface_point(const LevelSetDomain<3>& domain,
                                         const Vec3& lo, const Vec3& hi) {
  InterfacePoint<3> ip;
  ip.position = {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]),
                 0.5 * (lo[2] + hi[2])};
  for (int a = 0; a < 3 && !ip.present; ++a) {
    const int u = (a + 1) % 3, v = (a + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      Rect3 r;
      r.origin = lo;
      r.origin[a] = side == 0 ? lo[a] : hi[a];
      r.axis_u = u;
      r.axis_v = v;
      r.len_u = hi[u] - lo[u];
      r.len_v = hi[v] - lo[v];
      const double f = face_fluid_fraction(domain, r);
      if (f > 0.0 && f < 1.0) {
        ip.present = true;
        break;
      }
    }
  }
  return ip;
}

}  // namespace hodgefsi
