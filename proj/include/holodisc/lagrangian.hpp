#pragma once

#include <vector>

#include "holodisc/kahler.hpp"

namespace holo {

enum class LagrangianKind { LinearPlane, RealProjective };

// Totally geodesic Lagrangian submanifolds. In FlatCm a LinearPlane is A*R^m
// for a unitary A (columns = real orthonormal frame of the plane). In
// ProjectiveFS a RealProjective chart is U*RP^m for a unitary U of size m+1.
class LagrangianChart {
 public:
  static LagrangianChart linear_plane(const KahlerModel& model, MatC frame);
  static LagrangianChart real_projective(const KahlerModel& model, MatC frame);

  LagrangianKind kind() const { return kind_; }
  const MatC& frame() const { return frame_; }

  // Boundary-condition label 1..n, assigned by the scenario.
  int label = 0;

  bool contains(const KahlerModel& model, const VecC& p,
                double tol = 1e-8) const;
  // Distance from p to the submanifold (exact for both kinds).
  double chart_distance(const KahlerModel& model, const VecC& p) const;
  // Nearest point on the submanifold. For RealProjective this is ill posed
  // far from the chart; throws numeric_error (reporting the distance margin)
  // when the distance exceeds fs_scale * pi/8.
  VecC project(const KahlerModel& model, const VecC& p) const;
  // Deterministic g-orthonormal frame of the tangent space of the Lagrangian
  // at a point p of the chart (columns, horizontal for ProjectiveFS).
  MatC tangent_frame(const KahlerModel& model, const VecC& p) const;
  // RealProjective only: the real unit coordinate vector r of a point on the
  // chart (p ~ e^{i phi} U r), sign fixed by the first significant entry.
  VecR real_coordinates(const KahlerModel& model, const VecC& p) const;

 private:
  LagrangianChart(LagrangianKind k, MatC f) : kind_(k), frame_(std::move(f)) {}
  LagrangianKind kind_;
  MatC frame_;
};

struct IntersectionPoint {
  VecC point;
  bool transversal = false;
};

// All intersection points of two Lagrangian charts, each tagged by whether
// the tangent spaces meet transversally there. Throws numeric_error when the
// intersection is not a discrete set (identical or otherwise degenerate
// pairs).
std::vector<IntersectionPoint> transversal_intersections(
    const KahlerModel& model, const LagrangianChart& a,
    const LagrangianChart& b);

}  // namespace holo
