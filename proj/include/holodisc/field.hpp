#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "holodisc/kahler.hpp"
#include "holodisc/lagrangian.hpp"
#include "holodisc/mesh.hpp"

namespace holo {

// Piecewise-linear map from the disc mesh into the model, one ambient point
// per node (canonical representatives for ProjectiveFS).
struct MapField {
  KahlerModel model;
  std::shared_ptr<const DiscMesh> mesh;
  MatC values;  // ambient_dim x node count

  static MapField constant(const KahlerModel& model,
                           std::shared_ptr<const DiscMesh> mesh,
                           const VecC& point);

  int node_count() const { return int(values.cols()); }
  VecC value(int node) const { return values.col(node); }
  // Structural checks: sizes and (ProjectiveFS) unit representatives.
  void validate() const;

  void write_csv(std::ostream& os) const;
  static MapField read_csv(const KahlerModel& model,
                           std::shared_ptr<const DiscMesh> mesh,
                           std::istream& is);
};

struct EnergyReport {
  double dirichlet = 0.0;
  double area = 0.0;
  double conformality_defect = 0.0;
  double dbar_residual = 0.0;
  double perpendicularity_defect = 0.0;
  int iterations = 0;
  bool converged = false;
  // Diagnostics carried alongside the headline numbers.
  double grad_norm = 0.0;
  double max_constraint_violation = 0.0;
};

// Dirichlet integral of the piecewise-linear map,
// 1/2 int g(u_s,u_s) + g(u_t,u_t).
double dirichlet_energy(const MapField& u);

// int sqrt(det(Du^T Du)) evaluated on the degree-2 interior rule.
double area(const MapField& u);

// L2 norm of the Hopf density pair (g(u_s,u_s)-g(u_t,u_t), 2 g(u_s,u_t)).
// corner_exclusion_radius > 0 drops triangles within that domain distance of
// a marked corner; the default 0 integrates over the whole disc. The
// restriction exists because at a transversal corner the map is only Hoelder
// and the quadratic Hopf density of the nodal interpolant does not vanish
// with h there, while it does on any fixed corner-free region.
double conformality_defect(const MapField& u,
                           double corner_exclusion_radius = 0.0);

// L2 norm of the antiholomorphic derivative coefficient (u_s + J u_t)/2.
double dbar_residual(const MapField& u);

// Max over boundary quadrature points, excluding a radius around the marked
// corners, of |g(outward normal derivative, e)| over the arc's Lagrangian
// frame vectors e at the projected field value. exclusion_radius <= 0 uses
// the default of twice the mesh's build target_h (held fixed under
// refinement, since the corner singularity never becomes regular).
double perpendicularity_defect(const MapField& u,
                               const std::vector<LagrangianChart>& charts,
                               double exclusion_radius = -1.0);

// Riemannian gradient of the Dirichlet energy with respect to the lumped
// node metric; one tangent vector per node, unconstrained at the boundary.
MatC energy_gradient(const MapField& u);

}  // namespace holo
