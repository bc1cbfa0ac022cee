#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "hodgefsi/grid.hpp"
#include "hodgefsi/vec.hpp"

namespace hodgefsi {

// Symmetric 3x3 matrix with Cholesky solve; used for the inertia tensor.
struct SymMat3 {
  // row-major, full storage
  std::array<double, 9> a{};

  static SymMat3 identity(double s = 1.0) {
    SymMat3 m;
    m.a = {s, 0, 0, 0, s, 0, 0, 0, s};
    return m;
  }

  double operator()(int i, int j) const { return a[3 * i + j]; }
  double& operator()(int i, int j) { return a[3 * i + j]; }

  Vec3 mul(const Vec3& x) const {
    return {a[0] * x[0] + a[1] * x[1] + a[2] * x[2],
            a[3] * x[0] + a[4] * x[1] + a[5] * x[2],
            a[6] * x[0] + a[7] * x[1] + a[8] * x[2]};
  }

  // Cholesky factor; throws unless symmetric positive definite.
  std::array<double, 6> llt() const {
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (std::abs((*this)(i, j) - (*this)(j, i)) >
            1e-12 * (std::abs((*this)(i, j)) + 1))
          throw std::invalid_argument("inertia tensor must be symmetric");
    std::array<double, 6> L{};  // packed lower triangle
    auto idx = [](int i, int j) { return i * (i + 1) / 2 + j; };
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = (*this)(i, j);
        for (int k = 0; k < j; ++k) s -= L[idx(i, k)] * L[idx(j, k)];
        if (i == j) {
          if (s <= 0)
            throw std::invalid_argument(
                "inertia tensor must be positive definite");
          L[idx(i, i)] = std::sqrt(s);
        } else {
          L[idx(i, j)] = s / L[idx(j, j)];
        }
      }
    }
    return L;
  }

  Vec3 solve(const Vec3& b) const {
    const auto L = llt();
    auto idx = [](int i, int j) { return i * (i + 1) / 2 + j; };
    Vec3 y{};
    for (int i = 0; i < 3; ++i) {
      double s = b[i];
      for (int k = 0; k < i; ++k) s -= L[idx(i, k)] * y[k];
      y[i] = s / L[idx(i, i)];
    }
    Vec3 x{};
    for (int i = 2; i >= 0; --i) {
      double s = y[i];
      for (int k = i + 1; k < 3; ++k) s -= L[idx(k, i)] * x[k];
      x[i] = s / L[idx(i, i)];
    }
    return x;
  }
};

// Angular quantities are scalar in 2D (omega = (0,0,w)) and vectors in 3D.
template <int D>
using AngVec = std::conditional_t<D == 2, double, Vec3>;

template <int D>
using Inertia = std::conditional_t<D == 2, double, SymMat3>;

inline double ang_dot(double a, double b) { return a * b; }
inline double ang_dot(const Vec3& a, const Vec3& b) { return dot(a, b); }

template <int D>
inline AngVec<D> ang_zero() {
  if constexpr (D == 2)
    return 0.0;
  else
    return Vec3{0, 0, 0};
}

template <int D>
struct RigidBody {
  double m = 1;
  Inertia<D> inertia{};
  Vec<D> c{};

  RigidBody(double mass, const Inertia<D>& I, const Vec<D>& center)
      : m(mass), inertia(I), c(center) {
    if (m <= 0) throw std::invalid_argument("rigid body mass must be positive");
    if constexpr (D == 2) {
      if (inertia <= 0)
        throw std::invalid_argument("inertia must be positive");
    } else {
      inertia.llt();  // SPD check
    }
  }

  AngVec<D> inertia_mul(const AngVec<D>& w) const {
    if constexpr (D == 2)
      return inertia * w;
    else
      return inertia.mul(w);
  }

  AngVec<D> inertia_solve(const AngVec<D>& b) const {
    if constexpr (D == 2)
      return b / inertia;
    else
      return inertia.solve(b);
  }
};

// Fluid face velocities plus body linear/angular velocities.
template <int D>
struct CoupledState {
  FaceField<D> U;
  Vec<D> v{};
  AngVec<D> omega = ang_zero<D>();

  static CoupledState zero(const MacGrid<D>& g) {
    CoupledState s;
    s.U = g.make_face_field();
    return s;
  }
};

template <int D>
CoupledState<D> state_sub(const CoupledState<D>& a, const CoupledState<D>& b) {
  CoupledState<D> r = a;
  for (int ax = 0; ax < D; ++ax)
    for (std::size_t f = 0; f < r.U.comp[ax].size(); ++f)
      r.U.comp[ax][f] -= b.U.comp[ax][f];
  for (int i = 0; i < D; ++i) r.v[i] -= b.v[i];
  if constexpr (D == 2)
    r.omega -= b.omega;
  else
    for (int i = 0; i < 3; ++i) r.omega[i] -= b.omega[i];
  return r;
}

// (G p)_{face} = (p_up - p_lo)/h; wall boundary faces carry no entry.
template <int D>
FaceField<D> gradient(const MacGrid<D>& g, const CellField& p) {
  FaceField<D> out = g.make_face_field();
  for (int a = 0; a < D; ++a) {
    const std::size_t nf = g.face_count(a);
    for (std::size_t f = 0; f < nf; ++f) {
      const auto i = g.face_coords(a, f);
      if (g.is_boundary_face(a, i)) continue;
      std::array<int, D> up = i;
      std::array<int, D> lo = i;
      lo[a] = (i[a] + g.n[a] - 1) % g.n[a];
      if (g.topo[a] == Topology::Wall) lo[a] = i[a] - 1;
      up[a] = i[a] % g.n[a];
      out.comp[a][f] = (p[g.node_index(up)] - p[g.node_index(lo)]) / g.h;
    }
  }
  return out;
}

// (D V)_node = sum_a (V_up - V_lo)/h; fluxes across wall boundaries are
// absent.
template <int D>
CellField divergence(const MacGrid<D>& g, const FaceField<D>& V) {
  CellField out = g.make_cell_field();
  const std::size_t nn = g.node_count();
  for (std::size_t node = 0; node < nn; ++node) {
    const auto i = g.node_coords(node);
    double d = 0;
    for (int a = 0; a < D; ++a) {
      double up = 0, lo = 0;
      if (!(g.topo[a] == Topology::Wall && i[a] == g.n[a] - 1))
        up = V.comp[a][g.node_face(a, i, 1)];
      else
        up = 0;  // wall
      if (!(g.topo[a] == Topology::Wall && i[a] == 0))
        lo = V.comp[a][g.node_face(a, i, 0)];
      else
        lo = 0;  // wall
      d += (up - lo) / g.h;
    }
    out[node] = d;
  }
  return out;
}

// Centered difference of the face fractions; nonzero only near the interface.
template <int D>
CellVectorField<D> grad_heaviside(const MacGrid<D>& g, const FaceField<D>& H) {
  CellVectorField<D> out;
  out.val.assign(g.node_count(), Vec<D>{});
  const std::size_t nn = g.node_count();
  for (std::size_t node = 0; node < nn; ++node) {
    const auto i = g.node_coords(node);
    for (int a = 0; a < D; ++a) {
      const double up = H.comp[a][g.node_face(a, i, 1)];
      const double lo = H.comp[a][g.node_face(a, i, 0)];
      out.val[node][a] = (up - lo) / g.h;
    }
  }
  return out;
}

// Interface representative point per node; evaluated only at cut cells.
template <int D>
std::vector<InterfacePoint<D>> compute_interface_points(
    const MacGrid<D>& g, const LevelSetDomain<D>& dom,
    const NodeClassification& cls) {
  std::vector<InterfacePoint<D>> pts(g.node_count());
  for (std::size_t node : cls.near_boundary) {
    const auto i = g.node_coords(node);
    const Vec<D> x = g.node_pos(i);
    Vec<D> lo = x, hi = x;
    for (int a = 0; a < D; ++a) {
      lo[a] -= 0.5 * g.h;
      hi[a] += 0.5 * g.h;
    }
    pts[node] = interface_point(dom, lo, hi);
  }
  return pts;
}

template <int D>
using TorqueField = std::vector<AngVec<D>>;

// J^h = (x~ - c) x GH, with the interface midpoint in 2D and the cell center
// in 3D.
template <int D>
TorqueField<D> j_field(const MacGrid<D>& g, const CellVectorField<D>& GH,
                       const std::vector<InterfacePoint<D>>& pts,
                       const RigidBody<D>& body) {
  TorqueField<D> out(g.node_count(), ang_zero<D>());
  const std::size_t nn = g.node_count();
  for (std::size_t node = 0; node < nn; ++node) {
    const Vec<D>& gh = GH.val[node];
    bool zero = true;
    for (int a = 0; a < D; ++a) zero = zero && gh[a] == 0.0;
    if (zero) continue;
    Vec<D> x = g.node_pos(g.node_coords(node));
    if constexpr (D == 2) {
      if (node < pts.size() && pts[node].present) x = pts[node].position;
      out[node] = cross(x - body.c, gh);
    } else {
      out[node] = cross(x - body.c, gh);
    }
  }
  return out;
}

// 1/2 int rho H U1.U2 dOmega^h + 1/2 m v1.v2 + 1/2 w1.I w2
template <int D>
double inner_product_Eh(const MacGrid<D>& g, const FaceField<D>& H, double rho,
                        const RigidBody<D>& body, const CoupledState<D>& s1,
                        const CoupledState<D>& s2) {
  const double hd = g.cell_measure();
  double fluid = 0;
  for (int a = 0; a < D; ++a) {
    const std::size_t nf = g.face_count(a);
    for (std::size_t f = 0; f < nf; ++f)
      fluid += rho * H.comp[a][f] * s1.U.comp[a][f] * s2.U.comp[a][f];
  }
  fluid *= 0.5 * hd;
  const double body_lin = 0.5 * body.m * dot(s1.v, s2.v);
  const double body_ang = 0.5 * ang_dot(s1.omega, body.inertia_mul(s2.omega));
  return fluid + body_lin + body_ang;
}

template <int D>
double energy_norm(const MacGrid<D>& g, const FaceField<D>& H, double rho,
                   const RigidBody<D>& body, const CoupledState<D>& s) {
  return std::sqrt(std::max(0.0, inner_product_Eh(g, H, rho, body, s, s)));
}

}  // namespace hodgefsi
