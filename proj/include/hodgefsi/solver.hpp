#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hodgefsi/field_ops.hpp"
#include "hodgefsi/grid.hpp"

namespace hodgefsi {

struct SolveReport {
  std::size_t iterations = 0;
  double final_relative_residual = 0;
  double compatibility_defect = 0;
  std::vector<std::string> warnings;
};

struct SolverOptions {
  double tol = 1e-10;
  std::size_t maxiter = 0;  // 0: 10 * N
  bool jacobi = false;
};

struct SolveError : std::runtime_error {
  SolveReport report;
  SolveError(const std::string& what, SolveReport r)
      : std::runtime_error(what), report(std::move(r)) {}
};

// Matrix-free L^h: the cut-cell Laplacian plus two low-rank nonlocal momentum
// couplings. Immutable after construction.
template <int D>
class MonolithicOperator {
 public:
  MonolithicOperator(const MacGrid<D>& grid, FaceField<D> H, double rho,
                     CellVectorField<D> GH, TorqueField<D> Jh,
                     RigidBody<D> body, NodeClassification cls)
      : grid_(&grid),
        H_(std::move(H)),
        rho_(rho),
        GH_(std::move(GH)),
        Jh_(std::move(Jh)),
        body_(std::move(body)),
        cls_(std::move(cls)) {
    if (rho_ <= 0) throw std::invalid_argument("density must be positive");
  }

  const MacGrid<D>& grid() const { return *grid_; }
  const FaceField<D>& heaviside() const { return H_; }
  double rho() const { return rho_; }
  const CellVectorField<D>& grad_H() const { return GH_; }
  const TorqueField<D>& j_h() const { return Jh_; }
  const RigidBody<D>& body() const { return body_; }
  const NodeClassification& classification() const { return cls_; }

  // L p = -D((H/rho) G p) + GH (1/m) sum(p GH h^d) + J^h I^{-1} sum(p J^h h^d)
  CellField apply(const CellField& p) const {
    const MacGrid<D>& g = *grid_;
    if (p.size() != g.node_count())
      throw std::invalid_argument("apply_L: field shape mismatch");
    const double hd = g.cell_measure();

    FaceField<D> flux = gradient(g, p);
    for (int a = 0; a < D; ++a)
      for (std::size_t f = 0; f < flux.comp[a].size(); ++f)
        flux.comp[a][f] *= H_.comp[a][f] / rho_;
    CellField out = divergence(g, flux);
    for (auto& v : out) v = -v;

    Vec<D> mom{};
    AngVec<D> ang = ang_zero<D>();
    for (std::size_t node = 0; node < p.size(); ++node) {
      if (!cls_.included(node)) continue;
      mom += p[node] * hd * GH_.val[node];
      if constexpr (D == 2)
        ang += p[node] * hd * Jh_[node];
      else
        ang += p[node] * hd * Jh_[node];
    }
    mom = (1.0 / body_.m) * mom;
    const AngVec<D> iang = body_.inertia_solve(ang);

    for (std::size_t node = 0; node < p.size(); ++node) {
      if (!cls_.included(node)) {
        out[node] = 0;
        continue;
      }
      out[node] += dot(GH_.val[node], mom) + ang_dot(Jh_[node], iang);
    }
    return out;
  }

  // Diagonal of L^h, including the low-rank terms' diagonal contribution.
  CellField diagonal() const {
    const MacGrid<D>& g = *grid_;
    const double hd = g.cell_measure();
    CellField diag = g.make_cell_field();
    const std::size_t nn = g.node_count();
    for (std::size_t node = 0; node < nn; ++node) {
      if (!cls_.included(node)) continue;
      const auto i = g.node_coords(node);
      double d = 0;
      for (int a = 0; a < D; ++a) {
        for (int side = 0; side < 2; ++side) {
          std::array<int, D> fi = i;
          fi[a] += side;
          if (g.topo[a] == Topology::Periodic && fi[a] == g.n[a]) fi[a] = 0;
          if (g.is_boundary_face(a, fi)) continue;
          d += H_.comp[a][g.face_index(a, fi)] / (rho_ * g.h * g.h);
        }
      }
      d += dot(GH_.val[node], GH_.val[node]) * hd / body_.m;
      d += ang_dot(Jh_[node], body_.inertia_solve(Jh_[node])) * hd;
      diag[node] = d;
    }
    return diag;
  }

 private:
  const MacGrid<D>* grid_;
  FaceField<D> H_;
  double rho_;
  CellVectorField<D> GH_;
  TorqueField<D> Jh_;
  RigidBody<D> body_;
  NodeClassification cls_;
};

template <int D>
MonolithicOperator<D> make_operator(const MacGrid<D>& g,
                                    const LevelSetDomain<D>& dom,
                                    const RigidBody<D>& body, double rho) {
  FaceField<D> H = compute_heaviside(g, dom);
  NodeClassification cls = classify_nodes(g, H, dom);
  check_connectivity(g, H, cls);
  CellVectorField<D> GH = grad_heaviside(g, H);
  auto pts = compute_interface_points(g, dom, cls);
  TorqueField<D> Jh = j_field(g, GH, pts, body);
  return MonolithicOperator<D>(g, std::move(H), rho, std::move(GH),
                               std::move(Jh), body, std::move(cls));
}

// f = -D(H U*) + v*.GH + w*.J^h
template <int D>
CellField assemble_rhs(const MonolithicOperator<D>& op,
                       const CoupledState<D>& s) {
  const MacGrid<D>& g = op.grid();
  FaceField<D> hu = s.U;
  for (int a = 0; a < D; ++a)
    for (std::size_t f = 0; f < hu.comp[a].size(); ++f)
      hu.comp[a][f] *= op.heaviside().comp[a][f];
  CellField out = divergence(g, hu);
  const std::size_t nn = g.node_count();
  for (std::size_t node = 0; node < nn; ++node) {
    if (!op.classification().included(node)) {
      out[node] = 0;
      continue;
    }
    out[node] = -out[node] + dot(s.v, op.grad_H().val[node]) +
                ang_dot(s.omega, op.j_h()[node]);
  }
  return out;
}

// Removes the mean over included nodes; a large defect signals a wiring bug
// rather than a property of the scheme.
template <int D>
std::pair<CellField, double> check_and_fix_compatibility(
    const MonolithicOperator<D>& op, CellField f,
    std::vector<std::string>* warnings = nullptr) {
  double sum = 0, l1 = 0;
  std::size_t count = 0;
  for (std::size_t node = 0; node < f.size(); ++node) {
    if (!op.classification().included(node)) continue;
    sum += f[node];
    l1 += std::abs(f[node]);
    ++count;
  }
  const double defect = std::abs(sum) / std::max(1.0, l1);
  if (defect > 1e-3)
    throw std::runtime_error(
        "compatibility defect " + std::to_string(defect) +
        " exceeds 1e-3; right-hand side is inconsistent");
  if (defect > 1e-8 && warnings)
    warnings->push_back("compatibility defect " + std::to_string(defect));
  const double mean = count ? sum / static_cast<double>(count) : 0.0;
  for (std::size_t node = 0; node < f.size(); ++node)
    f[node] = op.classification().included(node) ? f[node] - mean : 0.0;
  return {std::move(f), defect};
}

namespace detail {

template <int D>
void project_mean_zero(const MonolithicOperator<D>& op, CellField& p) {
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t node = 0; node < p.size(); ++node) {
    if (!op.classification().included(node)) continue;
    sum += p[node];
    ++count;
  }
  const double mean = count ? sum / static_cast<double>(count) : 0.0;
  for (std::size_t node = 0; node < p.size(); ++node)
    p[node] = op.classification().included(node) ? p[node] - mean : 0.0;
}

template <int D>
double dot_included(const MonolithicOperator<D>& op, const CellField& a,
                    const CellField& b) {
  double s = 0;
  for (std::size_t node = 0; node < a.size(); ++node)
    if (op.classification().included(node)) s += a[node] * b[node];
  return s;
}

}  // namespace detail

// Conjugate gradients restricted to the mean-zero subspace, where L^h is
// symmetric positive definite.
template <int D>
std::pair<CellField, SolveReport> solve_pressure(const MonolithicOperator<D>& op,
                                                 const CellField& f,
                                                 SolverOptions opt = {}) {
  const std::size_t n = op.grid().node_count();
  SolveReport report;
  CellField p(n, 0.0);

  CellField b = f;
  detail::project_mean_zero(op, b);
  const double bnorm = std::sqrt(detail::dot_included(op, b, b));
  if (bnorm == 0) return {std::move(p), report};

  const std::size_t maxiter =
      opt.maxiter ? opt.maxiter : 10 * op.classification().included_count();

  CellField diag;
  if (opt.jacobi) diag = op.diagonal();
  auto precond = [&](const CellField& r) {
    if (!opt.jacobi) return r;
    CellField z = r;
    for (std::size_t i = 0; i < z.size(); ++i)
      if (diag[i] > 0) z[i] /= diag[i];
    detail::project_mean_zero(op, z);
    return z;
  };

  CellField r = b;
  CellField z = precond(r);
  CellField d = z;
  double rz = detail::dot_included(op, r, z);
  double rnorm = std::sqrt(detail::dot_included(op, r, r));

  for (std::size_t it = 0; it < maxiter; ++it) {
    if (rnorm <= opt.tol * bnorm) break;
    CellField Ld = op.apply(d);
    detail::project_mean_zero(op, Ld);
    const double dLd = detail::dot_included(op, d, Ld);
    if (!(dLd > 0)) {
      report.iterations = it;
      report.final_relative_residual = rnorm / bnorm;
      throw SolveError("CG curvature breakdown", report);
    }
    const double alpha = rz / dLd;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] += alpha * d[i];
      r[i] -= alpha * Ld[i];
    }
    z = precond(r);
    const double rz_new = detail::dot_included(op, r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) d[i] = z[i] + beta * d[i];
    rnorm = std::sqrt(detail::dot_included(op, r, r));
    if (!std::isfinite(rnorm)) {
      report.iterations = it + 1;
      report.final_relative_residual = std::numeric_limits<double>::quiet_NaN();
      throw SolveError("CG produced non-finite residual", report);
    }
    report.iterations = it + 1;
  }

  detail::project_mean_zero(op, p);
  report.final_relative_residual = rnorm / bnorm;
  if (report.final_relative_residual > opt.tol)
    throw SolveError("CG failed to converge in " +
                         std::to_string(report.iterations) + " iterations",
                     report);
  return {std::move(p), report};
}

}  // namespace hodgefsi
