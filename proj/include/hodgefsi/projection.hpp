#pragma once

#include <cmath>
#include <utility>

#include "hodgefsi/solver.hpp"

namespace hodgefsi {

template <int D>
struct ProjectionDiagnostics {
  double energy_before = 0;
  double energy_after = 0;
  double orthogonality = 0;
  double post_divergence_residual = 0;
  SolveReport solve_report;
};

template <int D>
struct ProjectionResult {
  CoupledState<D> projected;
  CellField p;
  CoupledState<D> gradient_part;
  ProjectionDiagnostics<D> diagnostics;
};

// The augmented Hodge projection: solve L^h p = -D(H U*) + v*.GH + w*.J^h and
// peel off the gradient component from fluid and body velocities at once.
template <int D>
ProjectionResult<D> project(const MonolithicOperator<D>& op,
                            const CoupledState<D>& star,
                            SolverOptions opt = {}) {
  const MacGrid<D>& g = op.grid();
  const double hd = g.cell_measure();

  CellField f = assemble_rhs(op, star);
  SolveReport pre;
  auto [rhs, defect] = check_and_fix_compatibility(op, std::move(f),
                                                   &pre.warnings);
  auto [p, report] = solve_pressure(op, rhs, opt);
  report.compatibility_defect = defect;
  report.warnings.insert(report.warnings.end(), pre.warnings.begin(),
                         pre.warnings.end());

  ProjectionResult<D> res;
  res.p = p;

  // gradient part: ((1/rho) G p, (1/m) sum p GH h^d, I^{-1} sum p J^h h^d)
  res.gradient_part = CoupledState<D>::zero(g);
  FaceField<D> gp = gradient(g, p);
  for (int a = 0; a < D; ++a)
    for (std::size_t fi = 0; fi < gp.comp[a].size(); ++fi)
      res.gradient_part.U.comp[a][fi] =
          op.heaviside().comp[a][fi] > 0.0 ? gp.comp[a][fi] / op.rho() : 0.0;
  Vec<D> mom{};
  AngVec<D> ang = ang_zero<D>();
  for (std::size_t node = 0; node < p.size(); ++node) {
    if (!op.classification().included(node)) continue;
    mom += p[node] * hd * op.grad_H().val[node];
    ang += p[node] * hd * op.j_h()[node];
  }
  res.gradient_part.v = (1.0 / op.body().m) * mom;
  res.gradient_part.omega = op.body().inertia_solve(ang);

  res.projected = state_sub(star, res.gradient_part);
  // Faces outside the fluid carry no velocity.
  for (int a = 0; a < D; ++a)
    for (std::size_t fi = 0; fi < res.projected.U.comp[a].size(); ++fi)
      if (op.heaviside().comp[a][fi] == 0.0) res.projected.U.comp[a][fi] = 0.0;

  auto& diag = res.diagnostics;
  diag.solve_report = report;
  diag.energy_before =
      inner_product_Eh(g, op.heaviside(), op.rho(), op.body(), star, star);
  diag.energy_after = inner_product_Eh(g, op.heaviside(), op.rho(), op.body(),
                                       res.projected, res.projected);
  diag.orthogonality = inner_product_Eh(g, op.heaviside(), op.rho(), op.body(),
                                        res.projected, res.gradient_part);
  CellField residual = assemble_rhs(op, res.projected);
  double maxres = 0;
  for (std::size_t node = 0; node < residual.size(); ++node)
    if (op.classification().included(node))
      maxres = std::max(maxres, std::abs(residual[node]));
  diag.post_divergence_residual = maxres;
  return res;
}

template <int D>
ProjectionResult<D> project(const MacGrid<D>& g, const LevelSetDomain<D>& dom,
                            const RigidBody<D>& body, double rho,
                            const CoupledState<D>& star,
                            SolverOptions opt = {}) {
  MonolithicOperator<D> op = make_operator(g, dom, body, rho);
  return project(op, star, opt);
}

// c^h = L^h applied to a sampled exact state: -D(H U) + v.GH + w.J^h.
// Interior nodes of a divergence-free non-penetrating state see O(h^2).
template <int D>
CellField measure_consistency(const MonolithicOperator<D>& op,
                              const CoupledState<D>& exact) {
  return assemble_rhs(op, exact);
}

}  // namespace hodgefsi
