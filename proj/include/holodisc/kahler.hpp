#pragma once

#include "holodisc/types.hpp"

namespace holo {

enum class ModelKind { FlatCm, ProjectiveFS };

// Target geometry. FlatCm is C^m with the standard flat metric. ProjectiveFS
// is CP^m with the Fubini-Study metric, points stored as unit homogeneous
// (m+1)-vectors up to phase, tangent vectors as horizontal lifts (complex-
// orthogonal to the base point), so the complex structure acts as
// multiplication by i in both models.
//
// fs_scale is the length normalization of the Fubini-Study metric: the affine
// chart metric is fs_scale^2 |dz|^2 / (1+|z|^2)^2. The default 2.0 makes CP^1
// the round 2-sphere of radius 1.
class KahlerModel {
 public:
  static KahlerModel flat(int m);
  static KahlerModel projective(int m, double fs_scale = 2.0);

  ModelKind kind() const { return kind_; }
  int m() const { return m_; }
  double fs_scale() const { return fs_scale_; }
  // Number of complex entries in a stored point / tangent vector.
  int ambient_dim() const { return kind_ == ModelKind::FlatCm ? m_ : m_ + 1; }

  // Validates size (and unit norm for ProjectiveFS). Throws domain_error.
  void check_point(const VecC& p) const;
  // Throws domain_error naming the violated orthogonality (v not orthogonal
  // to p, or not orthogonal to i*p) for non-horizontal vectors.
  void check_tangent(const VecC& p, const VecC& v) const;

  // Unit norm and canonical phase gauge: first nonzero coordinate real > 0.
  VecC normalize_point(VecC p) const;
  bool same_point(const VecC& p, const VecC& q, double tol = 1e-9) const;

  double metric(const VecC& p, const VecC& v, const VecC& w) const;
  VecC complex_structure(const VecC& p, const VecC& v) const;
  double omega(const VecC& p, const VecC& v, const VecC& w) const;

  double distance(const VecC& p, const VecC& q) const;
  // Orthogonal projection onto the tangent (horizontal) space at p.
  VecC tangent_project(const VecC& p, const VecC& v) const;
  // Geodesic retraction. For ProjectiveFS, v is measured in the horizontal
  // lift; the result is re-normalized but NOT re-gauged.
  VecC retract(const VecC& p, const VecC& v) const;
  // Inverse of retract: log_p(q), horizontal at p, with retract(p,log(p,q))
  // projectively equal to q. Euclidean norm equals the sphere angle, so the
  // g-norm equals distance(p,q).
  VecC log(const VecC& p, const VecC& q) const;
  // Parallel transport of tangent v along the geodesic from p to q; the
  // result is horizontal at the representative q as given.
  VecC transport(const VecC& p, const VecC& q, const VecC& v) const;

  // Affine chart helpers (FlatCm: identity). chart_point(z) = [1 : z]
  // normalized; chart_tangent is the horizontal lift of the differential.
  VecC chart_point(const VecC& z) const;
  VecC chart_tangent(const VecC& z, const VecC& dz) const;

 private:
  KahlerModel(ModelKind k, int m, double s) : kind_(k), m_(m), fs_scale_(s) {}
  ModelKind kind_;
  int m_;
  double fs_scale_;
};

}  // namespace holo
