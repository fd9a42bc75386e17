#pragma once

#include <Eigen/Sparse>
#include <memory>

#include "holodisc/field.hpp"

namespace holo::detail {

// Assembled discretization shared by the energy routines and the optimizer.
//
// Fields are handled through an isometric embedding with a scaled Euclidean
// metric alpha * Re<.,.>: FlatCm embeds as itself (alpha = 1); ProjectiveFS
// embeds a point p as the projection matrix P = p p^dag, flattened
// column-major (alpha = fs_scale^2 / 2), under which tangent vectors v
// correspond to v p^dag + p v^dag and J acts as A -> i[A, P]. The Dirichlet
// energy of the piecewise-linear interpolant is then the standard stiffness
// quadratic form of the embedded nodal values.
class EnergyContext {
 public:
  EnergyContext(const KahlerModel& model, std::shared_ptr<const DiscMesh> mesh);

  const KahlerModel& model() const { return model_; }
  const DiscMesh& mesh() const { return *mesh_; }
  int embed_dim() const { return de_; }
  double alpha() const { return alpha_; }
  const VecR& lumped_mass() const { return mass_; }

  // de x V embedded nodal values.
  MatC embed(const MatC& values) const;
  // Dirichlet energy from embedded values.
  double dirichlet(const MatC& emb) const;
  // Embedded stiffness image B = emb * K (columns indexed by node).
  MatC stiffness_apply(const MatC& emb) const;
  // Riemannian gradient w.r.t. the lumped node metric: tangent vector per
  // node (ambient_dim x V), from the stiffness image.
  MatC gradient_from_stiffness(const MatC& values, const MatC& b) const;

  // Per-triangle embedded derivatives U_s, U_t (each de x F).
  void derivatives(const MatC& emb, MatC& us, MatC& ut) const;

  const Eigen::SparseMatrix<cxd>& stiffness() const { return stiffness_; }

 private:
  KahlerModel model_;
  std::shared_ptr<const DiscMesh> mesh_;
  int de_;
  double alpha_;
  Eigen::SparseMatrix<cxd> stiffness_;
  VecR mass_;
  // Per-triangle barycentric gradients and areas.
  std::vector<std::array<Vec2, 3>> grads_;
  std::vector<double> areas_;
};

// Projection of a Hermitian matrix onto the tangent space at the projection
// matrix P (off-diagonal blocks of the P-splitting).
MatC tangent_block(const MatC& h, const MatC& p);

}  // namespace holo::detail
