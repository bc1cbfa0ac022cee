#pragma once

#include <array>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "hodgefsi/geometry.hpp"
#include "hodgefsi/vec.hpp"

namespace hodgefsi {

enum class Topology { Periodic, Wall };

// One scalar per staggered face, one array per axis family.
template <int D>
struct FaceField {
  std::array<std::vector<double>, D> comp;

  void fill(double v) {
    for (auto& c : comp) std::fill(c.begin(), c.end(), v);
  }
};

using CellField = std::vector<double>;

// Per-node vector quantity; in 2D the torque field is scalar-valued and is
// stored separately (see field_ops).
template <int D>
struct CellVectorField {
  std::vector<Vec<D>> val;
};

enum class NodeKind : std::uint8_t { Interior, NearBoundary, Excluded };

struct NodeClassification {
  std::vector<NodeKind> kind;
  std::vector<std::size_t> interior;
  std::vector<std::size_t> near_boundary;
  std::vector<std::size_t> excluded;

  bool included(std::size_t node) const {
    return kind[node] != NodeKind::Excluded;
  }
  std::size_t included_count() const {
    return interior.size() + near_boundary.size();
  }
};

// Uniform staggered MAC grid over a box. Nodes sit at cell centers
// lo + (i+1/2)h; family-a faces sit on the planes lo_a + k h. With Wall
// topology the boundary faces k=0 and k=n_a exist; with Periodic they wrap.
template <int D>
struct MacGrid {
  Vec<D> lo{}, hi{};
  std::array<int, D> n{};
  double h = 0;
  std::array<Topology, D> topo{};

  std::size_t node_count() const {
    std::size_t c = 1;
    for (int a = 0; a < D; ++a) c *= static_cast<std::size_t>(n[a]);
    return c;
  }

  double cell_measure() const {
    double m = 1;
    for (int a = 0; a < D; ++a) m *= h;
    return m;
  }

  // Number of faces of family a along axis `axis`.
  int face_extent(int family, int axis) const {
    if (axis != family) return n[axis];
    return topo[family] == Topology::Periodic ? n[family] : n[family] + 1;
  }

  std::size_t face_count(int family) const {
    std::size_t c = 1;
    for (int a = 0; a < D; ++a) c *= static_cast<std::size_t>(face_extent(family, a));
    return c;
  }

  std::size_t node_index(const std::array<int, D>& i) const {
    std::size_t idx = 0;
    for (int a = D - 1; a >= 0; --a) idx = idx * n[a] + i[a];
    return idx;
  }

  std::array<int, D> node_coords(std::size_t idx) const {
    std::array<int, D> i{};
    for (int a = 0; a < D; ++a) {
      i[a] = static_cast<int>(idx % n[a]);
      idx /= n[a];
    }
    return i;
  }

  Vec<D> node_pos(const std::array<int, D>& i) const {
    Vec<D> x{};
    for (int a = 0; a < D; ++a) x[a] = lo[a] + (i[a] + 0.5) * h;
    return x;
  }

  std::size_t face_index(int family, const std::array<int, D>& i) const {
    std::size_t idx = 0;
    for (int a = D - 1; a >= 0; --a)
      idx = idx * face_extent(family, a) + i[a];
    return idx;
  }

  std::array<int, D> face_coords(int family, std::size_t idx) const {
    std::array<int, D> i{};
    for (int a = 0; a < D; ++a) {
      const int e = face_extent(family, a);
      i[a] = static_cast<int>(idx % e);
      idx /= e;
    }
    return i;
  }

  Vec<D> face_pos(int family, const std::array<int, D>& i) const {
    Vec<D> x{};
    for (int a = 0; a < D; ++a)
      x[a] = a == family ? lo[a] + i[a] * h : lo[a] + (i[a] + 0.5) * h;
    return x;
  }

  bool is_boundary_face(int family, const std::array<int, D>& i) const {
    return topo[family] == Topology::Wall &&
           (i[family] == 0 || i[family] == n[family]);
  }

  // Face of family a bounding node i from below/above along axis a.
  std::size_t node_face(int family, std::array<int, D> i, int side) const {
    i[family] += side;  // side 0: lower face, 1: upper face
    if (topo[family] == Topology::Periodic && i[family] == n[family])
      i[family] = 0;
    return face_index(family, i);
  }

  FaceField<D> make_face_field() const {
    FaceField<D> f;
    for (int a = 0; a < D; ++a) f.comp[a].assign(face_count(a), 0.0);
    return f;
  }

  CellField make_cell_field() const { return CellField(node_count(), 0.0); }
};

template <int D>
MacGrid<D> build_grid(const Vec<D>& lo, const Vec<D>& hi,
                      const std::array<int, D>& n,
                      const std::array<Topology, D>& topo) {
  MacGrid<D> g;
  g.lo = lo;
  g.hi = hi;
  g.n = n;
  g.topo = topo;
  for (int a = 0; a < D; ++a) {
    if (n[a] < 2) throw std::invalid_argument("build_grid: need n >= 2 per axis");
    if (hi[a] <= lo[a])
      throw std::invalid_argument("build_grid: box extents must be positive");
  }
  g.h = (hi[0] - lo[0]) / n[0];
  for (int a = 1; a < D; ++a) {
    const double ha = (hi[a] - lo[a]) / n[a];
    if (std::abs(ha - g.h) > 1e-12 * g.h)
      throw std::invalid_argument("build_grid: cells must be square/cubic");
  }
  return g;
}

namespace detail {

inline double face_fraction_on_grid(const MacGrid<2>& g,
                                    const LevelSetDomain<2>& dom, int family,
                                    const std::array<int, 2>& i) {
  // A 2D face is an edge perpendicular to `family`.
  const Vec2 c = g.face_pos(family, i);
  const int t = 1 - family;
  Vec2 a = c, b = c;
  a[t] -= 0.5 * g.h;
  b[t] += 0.5 * g.h;
  return edge_fluid_fraction(dom, a, b);
}

inline double face_fraction_on_grid(const MacGrid<3>& g,
                                    const LevelSetDomain<3>& dom, int family,
                                    const std::array<int, 3>& i) {
  const Vec3 c = g.face_pos(family, i);
  const int u = (family + 1) % 3, v = (family + 2) % 3;
  Rect3 r;
  r.origin = c;
  r.origin[u] -= 0.5 * g.h;
  r.origin[v] -= 0.5 * g.h;
  r.axis_u = u;
  r.axis_v = v;
  r.len_u = g.h;
  r.len_v = g.h;
  return face_fluid_fraction(dom, r);
}

}  // namespace detail

// Per-face fluid fraction. Walls do not reduce H; boundary faces carry the
// fraction induced by the solid level set alone. Fractions within roundoff of
// 0 or 1 are snapped exactly: grazing contacts otherwise leave faces with
// H ~ 1e-15 whose pressure coupling is pure noise.
template <int D>
FaceField<D> compute_heaviside(const MacGrid<D>& g,
                               const LevelSetDomain<D>& dom) {
  constexpr double snap = 1e-12;
  FaceField<D> H = g.make_face_field();
  for (int a = 0; a < D; ++a) {
    const std::size_t nf = g.face_count(a);
    for (std::size_t f = 0; f < nf; ++f) {
      const auto i = g.face_coords(a, f);
      double v = detail::face_fraction_on_grid(g, dom, a, i);
      if (v < snap) v = 0.0;
      if (v > 1.0 - snap) v = 1.0;
      H.comp[a][f] = v;
    }
  }
  return H;
}

// Interior nodes have every incident face fraction equal to 1; excluded nodes
// have all incident fractions 0 and a solid cell center; the rest are
// near-boundary.
template <int D>
NodeClassification classify_nodes(const MacGrid<D>& g, const FaceField<D>& H,
                                  const LevelSetDomain<D>& dom) {
  NodeClassification cls;
  const std::size_t nn = g.node_count();
  cls.kind.resize(nn);
  for (std::size_t node = 0; node < nn; ++node) {
    const auto i = g.node_coords(node);
    bool all_one = true, all_zero = true;
    for (int a = 0; a < D; ++a) {
      for (int side = 0; side < 2; ++side) {
        const double v = H.comp[a][g.node_face(a, i, side)];
        all_one = all_one && v == 1.0;
        all_zero = all_zero && v == 0.0;
      }
    }
    if (all_one) {
      cls.kind[node] = NodeKind::Interior;
      cls.interior.push_back(node);
    } else if (all_zero && !is_fluid(dom(g.node_pos(i)))) {
      cls.kind[node] = NodeKind::Excluded;
      cls.excluded.push_back(node);
    } else {
      cls.kind[node] = NodeKind::NearBoundary;
      cls.near_boundary.push_back(node);
    }
  }
  return cls;
}

// The included nodes must form one component of the H>0 face graph; a
// disconnected fluid region breaks the constant-kernel structure of the
// operator.
template <int D>
void check_connectivity(const MacGrid<D>& g, const FaceField<D>& H,
                        const NodeClassification& cls) {
  const std::size_t nn = g.node_count();
  if (cls.included_count() == 0)
    throw std::runtime_error("grid: no fluid nodes");
  std::vector<char> seen(nn, 0);
  std::queue<std::size_t> q;
  std::size_t start = cls.interior.empty() ? cls.near_boundary.front()
                                           : cls.interior.front();
  q.push(start);
  seen[start] = 1;
  std::size_t visited = 1;
  while (!q.empty()) {
    const std::size_t node = q.front();
    q.pop();
    const auto i = g.node_coords(node);
    for (int a = 0; a < D; ++a) {
      for (int side = 0; side < 2; ++side) {
        std::array<int, D> j = i;
        if (side == 0) {
          if (i[a] == 0 && g.topo[a] == Topology::Wall) continue;
          j[a] = (i[a] + g.n[a] - 1) % g.n[a];
        } else {
          if (i[a] == g.n[a] - 1 && g.topo[a] == Topology::Wall) continue;
          j[a] = (i[a] + 1) % g.n[a];
        }
        if (H.comp[a][g.node_face(a, i, side)] <= 0.0) continue;
        const std::size_t nj = g.node_index(j);
        if (!seen[nj] && cls.included(nj)) {
          seen[nj] = 1;
          ++visited;
          q.push(nj);
        }
      }
    }
  }
  if (visited != cls.included_count())
    throw std::runtime_error("grid: fluid region is disconnected");
}

}  // namespace hodgefsi
