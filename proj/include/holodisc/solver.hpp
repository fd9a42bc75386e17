#pragma once

#include "holodisc/field.hpp"

namespace holo {

struct OptimizerSettings {
  int max_iterations = 2000;
  // Convergence when the projected gradient norm drops below
  // grad_tol * (1 + initial energy).
  double grad_tol = 1e-6;
  double armijo_slope = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 60;
  double initial_step = 1.0;
  bool barzilai_borwein = true;
};

// Boundary data of a scenario: charts[k-1] is the Lagrangian of arc k, and
// marked_points[k] pins the marked node at angle 2*pi*k/n (k = 0 is the
// output point at 1).
struct BoundaryConditions {
  std::vector<LagrangianChart> charts;
  std::vector<VecC> marked_points;
};

struct TraceRow {
  int iter;
  double energy;
  double grad_norm;
  double max_constraint_violation;
};

struct SolveOutcome {
  MapField field;
  EnergyReport report;
  std::vector<TraceRow> trace;
};

// Checks chart/marked-point counts against the mesh and that every marked
// point lies on both adjacent arcs' Lagrangians. Throws domain_error.
void validate_boundary_conditions(const KahlerModel& model,
                                  const BoundaryConditions& bc, int n_marks);

// Projects every boundary node onto its arc's Lagrangian and pins the marked
// nodes to their prescribed points (bitwise).
void enforce_constraints(MapField& u, const BoundaryConditions& bc);

// Max over boundary nodes of the representative-space distance to the
// constraint set (phase-aligned for ProjectiveFS).
double max_constraint_violation(const MapField& u,
                                const BoundaryConditions& bc);

// Combinatorial winding data of the boundary trace, one entry per arc:
// swept chart angle on 1-dimensional real projective charts, orientation
// parity on higher-dimensional ones, 0 for linear planes. Small steps of the
// optimizer cannot change it; used to assert the homotopy data is preserved.
std::vector<double> boundary_winding_signature(const MapField& u,
                                               const BoundaryConditions& bc);

MapField constant_field(const KahlerModel& model,
                        std::shared_ptr<const DiscMesh> mesh,
                        const VecC& point);

// Explicit holomorphic wedge between the two marked points for two-arc
// projective scenarios: follows the geodesic cone from the point at angle 0
// whose boundary rays run along the two Lagrangians.
MapField geodesic_lune_field(const KahlerModel& model,
                             std::shared_ptr<const DiscMesh> mesh,
                             const BoundaryConditions& bc);

// Componentwise discrete-harmonic extension of prescribed boundary values
// (columns of boundary_values at boundary node indices; interior ignored).
MapField harmonic_trace_field(const KahlerModel& model,
                              std::shared_ptr<const DiscMesh> mesh,
                              const MatC& boundary_values);

// Transfers a field to the refinement of its mesh: inherited nodes copy
// their value, edge-split nodes take the geodesic midpoint of their parents.
// Used to warm-start refinement sweeps.
MapField prolong_field(const MapField& coarse,
                       std::shared_ptr<const DiscMesh> fine);

// Projected Riemannian gradient descent with Barzilai-Borwein step guesses
// and Armijo backtracking. Boundary nodes are re-projected after every step;
// marked nodes never move. Returns converged=false when the iteration or
// line-search budget runs out. Throws domain_error if the initial field
// grossly violates the constraints.
SolveOutcome minimize(const MapField& initial, const BoundaryConditions& bc,
                      const OptimizerSettings& opt = {});

}  // namespace holo
