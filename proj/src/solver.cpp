#include "holodisc/solver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "energy_internal.hpp"

namespace holo {

using detail::EnergyContext;

namespace {

// Initializers farther than this from the constraint set are rejected;
// anything closer is snapped by projection.
constexpr double kAdmissibleTol = 1e-3;

// Representative-space distance from p to its projection q, phase-aligned
// for ProjectiveFS so the gauge does not register as violation. Stays
// meaningful well below the arccos resolution floor of the metric distance.
double rep_distance(const KahlerModel& model, const VecC& p, const VecC& q) {
  if (model.kind() == ModelKind::FlatCm) return (p - q).norm();
  const cxd z = inner(p, q);
  const double a = std::abs(z);
  if (a < 1e-12) return (p - q).norm();
  return (p - q * (z / a)).norm();
}

// g-orthogonal projection of an ambient tangent vector v at p onto the
// tangent space of the chart.
VecC project_to_chart_tangent(const KahlerModel& model,
                              const LagrangianChart& chart, const VecC& p,
                              const VecC& v) {
  if (chart.kind() == LagrangianKind::LinearPlane)
    return chart.frame() * (chart.frame().adjoint() * v).real();
  const MatC frame = chart.tangent_frame(model, p);
  VecC out = VecC::Zero(v.size());
  for (int j = 0; j < frame.cols(); ++j)
    out += model.metric(p, v, frame.col(j)) * frame.col(j);
  return out;
}

}  // namespace

void validate_boundary_conditions(const KahlerModel& model,
                                  const BoundaryConditions& bc, int n_marks) {
  const int n = n_marks;
  if (int(bc.charts.size()) != n)
    throw domain_error("scenario needs one Lagrangian per boundary arc");
  if (int(bc.marked_points.size()) != n)
    throw domain_error("scenario needs one marked point per corner");
  for (int k = 0; k < n; ++k) {
    model.check_point(bc.marked_points[k]);
    // Marked node k closes arc k (cyclically n for k = 0) and opens arc k+1.
    const int closing = (k == 0) ? n : k;
    const int opening = k + 1;
    const auto& x = bc.marked_points[k];
    if (!bc.charts[closing - 1].contains(model, x, 1e-7) ||
        !bc.charts[opening - 1].contains(model, x, 1e-7)) {
      std::ostringstream os;
      os << "marked point " << k
         << " does not lie on both adjacent Lagrangians (arcs " << closing
         << " and " << opening << ")";
      throw domain_error(os.str());
    }
  }
}

void enforce_constraints(MapField& u, const BoundaryConditions& bc) {
  const DiscMesh& mesh = *u.mesh;
  for (int i = 0; i < u.node_count(); ++i) {
    const MeshNode& node = mesh.nodes[i];
    if (node.marked_k >= 0) {
      u.values.col(i) = bc.marked_points[node.marked_k];
    } else if (node.arc_label > 0) {
      u.values.col(i) =
          bc.charts[node.arc_label - 1].project(u.model, u.values.col(i));
    }
  }
}

double max_constraint_violation(const MapField& u,
                                const BoundaryConditions& bc) {
  const DiscMesh& mesh = *u.mesh;
  double worst = 0.0;
  for (int i = 0; i < u.node_count(); ++i) {
    const MeshNode& node = mesh.nodes[i];
    const VecC p = u.values.col(i);
    if (node.marked_k >= 0) {
      worst = std::max(
          worst, rep_distance(u.model, p, bc.marked_points[node.marked_k]));
    } else if (node.arc_label > 0) {
      const VecC q = bc.charts[node.arc_label - 1].project(u.model, p);
      worst = std::max(worst, rep_distance(u.model, p, q));
    }
  }
  return worst;
}

std::vector<double> boundary_winding_signature(const MapField& u,
                                               const BoundaryConditions& bc) {
  const DiscMesh& mesh = *u.mesh;
  const int n = mesh.n_marks;
  // Nodes of arc k+1 in boundary order, both corner endpoints included.
  std::vector<std::vector<int>> arcs(n);
  for (int id : mesh.boundary_cycle) {
    const MeshNode& node = mesh.nodes[id];
    if (node.marked_k >= 0) {
      arcs[(node.marked_k + n - 1) % n].push_back(id);  // closes this arc
      arcs[node.marked_k].push_back(id);                // opens the next
    } else {
      arcs[node.arc_label - 1].push_back(id);
    }
  }
  for (int k = 0; k < n; ++k) {
    auto& a = arcs[k];
    auto it = std::find(a.begin(), a.end(), mesh.marked[k]);
    if (it != a.end()) std::rotate(a.begin(), it, a.end());
  }

  std::vector<double> sig(n, 0.0);
  for (int k = 0; k < n; ++k) {
    const LagrangianChart& chart = bc.charts[k];
    if (chart.kind() != LagrangianKind::RealProjective) continue;
    const auto& ids = arcs[k];
    if (ids.size() < 2) continue;
    if (u.model.m() == 1) {
      // Swept chart angle, lifted through the projective identification.
      VecR r0 = chart.real_coordinates(u.model, u.values.col(ids[0]));
      double prev = std::atan2(r0[1], r0[0]);
      double swept = 0.0;
      for (size_t j = 1; j < ids.size(); ++j) {
        const VecR r = chart.real_coordinates(u.model, u.values.col(ids[j]));
        double d = std::atan2(r[1], r[0]) - prev;
        while (d > 0.5 * kPi) d -= kPi;
        while (d <= -0.5 * kPi) d += kPi;
        swept += d;
        prev += d;
      }
      sig[k] = swept;
    } else {
      // Orientation parity of the lifted path through the sphere cover.
      VecR prev = chart.real_coordinates(u.model, u.values.col(ids[0]));
      double flip = 1.0;
      for (size_t j = 1; j < ids.size(); ++j) {
        VecR r = chart.real_coordinates(u.model, u.values.col(ids[j]));
        if (r.dot(prev) < 0.0) {
          r = -r;
          flip = -flip;
        }
        prev = r;
      }
      sig[k] = flip;
    }
  }
  return sig;
}

MapField constant_field(const KahlerModel& model,
                        std::shared_ptr<const DiscMesh> mesh,
                        const VecC& point) {
  return MapField::constant(model, std::move(mesh), point);
}

MapField geodesic_lune_field(const KahlerModel& model,
                             std::shared_ptr<const DiscMesh> mesh,
                             const BoundaryConditions& bc) {
  if (model.kind() != ModelKind::ProjectiveFS)
    throw domain_error("the wedge initializer requires the projective model");
  if (mesh->n_marks != 2)
    throw domain_error("the wedge initializer requires exactly two arcs");
  validate_boundary_conditions(model, bc, mesh->n_marks);

  const VecC a = model.normalize_point(bc.marked_points[0]);
  const VecC b = model.normalize_point(bc.marked_points[1]);
  if (std::abs(inner(b, a)) > 1e-8)
    throw domain_error(
        "the wedge initializer needs antipodal corners in their geodesic "
        "plane (orthogonal homogeneous representatives)");
  // Unit representative of b orthogonalized against a; spans the corner
  // plane together with a.
  const VecC chat = model.tangent_project(a, b).normalized();

  const double c = model.fs_scale();
  // The tangent space of a chart is a REAL span of its frame, so the
  // direction it shares with the complex corner line C*chat is the real
  // null vector of the off-line components of the frame.
  auto in_plane_direction = [&](const LagrangianChart& chart) {
    const MatC frame = chart.tangent_frame(model, a);
    const int cols = int(frame.cols());
    MatR off(2 * frame.rows(), cols);
    for (int j = 0; j < cols; ++j) {
      const VecC e = frame.col(j);
      const VecC r = e - inner(e, chat) * chat;
      off.col(j) << r.real(), r.imag();
    }
    Eigen::SelfAdjointEigenSolver<MatR> es(off.transpose() * off);
    if (es.eigenvalues()[0] > 1e-10)
      throw domain_error(
          "the wedge initializer found no Lagrangian tangent direction in "
          "the corner plane");
    VecR t = es.eigenvectors().col(0);
    int big = 0;
    t.cwiseAbs().maxCoeff(&big);
    if (t[big] < 0.0) t = -t;
    VecC v = frame * t.cast<cxd>();
    const double norm = std::sqrt(model.metric(a, v, v));
    if (norm < 1e-8)
      throw domain_error(
          "the wedge initializer found no Lagrangian tangent direction in "
          "the corner plane");
    v /= norm;
    if ((v - inner(v, chat) * chat).norm() > 1e-4 / c)
      throw domain_error(
          "the wedge initializer requires Lagrangians whose tangents at the "
          "first corner lie in the corner plane");
    return v;
  };

  const VecC v1 = in_plane_direction(bc.charts[0]);
  VecC v2 = in_plane_direction(bc.charts[1]);
  double beta = std::arg(inner(v2, v1));
  if (beta < 0.0) {
    v2 = -v2;
    beta += kPi;
  }
  if (beta < 1e-8 || beta > kPi - 1e-8)
    throw domain_error("the wedge initializer requires transversal corners");

  // Euclidean-unit chart direction along arc 1; the second arc leaves the
  // corner along e^{i beta} vhat.
  const VecC vhat = c * v1;
  const double power = beta / kPi;

  MapField u{model, std::move(mesh), {}};
  u.values.resize(model.ambient_dim(), u.mesh->nodes.size());
  for (int i = 0; i < int(u.mesh->nodes.size()); ++i) {
    const MeshNode& node = u.mesh->nodes[i];
    if (node.marked_k == 0) {
      u.values.col(i) = a;
      continue;
    }
    if (node.marked_k == 1) {
      u.values.col(i) = b;
      continue;
    }
    cxd zeta;
    if (node.arc_label > 0) {
      // Half-plane coordinate of the boundary point, exactly real.
      zeta = cxd(std::tan(0.5 * node.angle), 0.0);
    } else {
      const cxd z(node.pos.x(), node.pos.y());
      zeta = cxd(0, 1) * (1.0 - z) / (1.0 + z);
    }
    const cxd w = std::pow(zeta, power);
    u.values.col(i) = model.normalize_point(a + w * vhat);
  }
  enforce_constraints(u, bc);
  return u;
}

MapField harmonic_trace_field(const KahlerModel& model,
                              std::shared_ptr<const DiscMesh> mesh,
                              const MatC& boundary_values) {
  const int v = int(mesh->nodes.size());
  const int dim = model.ambient_dim();
  if (boundary_values.rows() != dim || boundary_values.cols() != v)
    throw domain_error("boundary trace has wrong dimensions");

  EnergyContext ctx(model, mesh);
  std::vector<int> slot(v, -1);
  int n_int = 0;
  for (int i = 0; i < v; ++i)
    if (mesh->nodes[i].arc_label == 0) slot[i] = n_int++;

  const auto& k = ctx.stiffness();
  std::vector<Eigen::Triplet<cxd>> trips;
  MatC rhs = MatC::Zero(n_int, dim);
  for (int col = 0; col < k.outerSize(); ++col) {
    for (Eigen::SparseMatrix<cxd>::InnerIterator it(k, col); it; ++it) {
      const int r = int(it.row()), s = int(it.col());
      if (slot[r] < 0) continue;
      if (slot[s] >= 0)
        trips.emplace_back(slot[r], slot[s], it.value());
      else
        rhs.row(slot[r]) -= it.value() * boundary_values.col(s).transpose();
    }
  }
  Eigen::SparseMatrix<cxd> kii(n_int, n_int);
  kii.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<cxd>> chol(kii);
  if (chol.info() != Eigen::Success)
    throw numeric_error("harmonic extension factorization failed");
  const MatC sol = chol.solve(rhs);

  MapField u{model, std::move(mesh), {}};
  u.values.resize(dim, v);
  for (int i = 0; i < v; ++i) {
    if (slot[i] >= 0)
      u.values.col(i) = sol.row(slot[i]).transpose();
    else
      u.values.col(i) = boundary_values.col(i);
  }
  if (model.kind() == ModelKind::ProjectiveFS)
    for (int i = 0; i < v; ++i) {
      if (u.values.col(i).norm() < 1e-8)
        throw numeric_error(
            "harmonic extension passed through the coordinate origin");
      u.values.col(i) = model.normalize_point(u.values.col(i));
    }
  return u;
}

MapField prolong_field(const MapField& coarse,
                       std::shared_ptr<const DiscMesh> fine) {
  coarse.validate();
  const int vc = coarse.node_count();
  const int vf = int(fine->nodes.size());
  if (vf < vc || int(fine->parent_edge.size()) != vf)
    throw domain_error("fine mesh is not a refinement of the field's mesh");
  MapField u{coarse.model, std::move(fine), {}};
  u.values.resize(coarse.model.ambient_dim(), vf);
  for (int i = 0; i < vf; ++i) {
    const auto [a, b] = u.mesh->parent_edge[i];
    if (a < 0 || a >= vc || b < 0 || b >= vc)
      throw domain_error("fine mesh is not a refinement of the field's mesh");
    if (a == b) {
      u.values.col(i) = coarse.values.col(a);
    } else if (coarse.model.kind() == ModelKind::FlatCm) {
      u.values.col(i) = 0.5 * (coarse.values.col(a) + coarse.values.col(b));
    } else {
      const VecC va = coarse.values.col(a);
      const VecC mid = coarse.model.retract(
          va, VecC(0.5 * coarse.model.log(va, coarse.values.col(b))));
      u.values.col(i) = coarse.model.normalize_point(mid);
    }
  }
  return u;
}

namespace {

// One constrained step of length sigma along -d: retraction (translation for
// FlatCm), then re-projection onto the arc's Lagrangian for boundary nodes.
// Marked nodes are copied bitwise.
MapField step_field(const MapField& u, const BoundaryConditions& bc,
                    const MatC& d, double sigma) {
  MapField out = u;
  const DiscMesh& mesh = *u.mesh;
  for (int i = 0; i < u.node_count(); ++i) {
    const MeshNode& node = mesh.nodes[i];
    if (node.marked_k >= 0) continue;
    VecC p;
    if (u.model.kind() == ModelKind::FlatCm)
      p = u.values.col(i) - sigma * d.col(i);
    else
      p = u.model.retract(u.values.col(i), VecC(-sigma * d.col(i)));
    if (node.arc_label > 0)
      p = bc.charts[node.arc_label - 1].project(u.model, p);
    out.values.col(i) = p;
  }
  return out;
}

}  // namespace

SolveOutcome minimize(const MapField& initial, const BoundaryConditions& bc,
                      const OptimizerSettings& opt) {
  initial.validate();
  validate_boundary_conditions(initial.model, bc, initial.mesh->n_marks);
  if (max_constraint_violation(initial, bc) > kAdmissibleTol)
    throw domain_error(
        "initial field grossly violates the scenario boundary conditions");

  MapField u = initial;
  enforce_constraints(u, bc);

  EnergyContext ctx(u.model, u.mesh);
  const VecR& mass = ctx.lumped_mass();
  const DiscMesh& mesh = *u.mesh;
  const int v = u.node_count();

  MatC emb = ctx.embed(u.values);
  double energy = ctx.dirichlet(emb);
  const double tol_abs = opt.grad_tol * (1.0 + energy);

  std::vector<TraceRow> trace;
  trace.reserve(size_t(opt.max_iterations) + 1);

  MatC prev_values, prev_dir;
  double sigma = opt.initial_step;
  bool converged = false;
  int iter = 0;

  while (true) {
    // Riemannian gradient, constrained: zero at marked nodes, tangent to the
    // arc's Lagrangian at boundary nodes.
    MatC d = ctx.gradient_from_stiffness(u.values, ctx.stiffness_apply(emb));
    for (int i = 0; i < v; ++i) {
      const MeshNode& node = mesh.nodes[i];
      if (node.marked_k >= 0)
        d.col(i).setZero();
      else if (node.arc_label > 0)
        d.col(i) = project_to_chart_tangent(u.model,
                                            bc.charts[node.arc_label - 1],
                                            u.values.col(i), d.col(i));
    }
    double gnorm2 = 0.0;
    for (int i = 0; i < v; ++i)
      gnorm2 += mass[i] * u.model.metric(u.values.col(i), d.col(i), d.col(i));
    const double gnorm = std::sqrt(gnorm2);

    trace.push_back({iter, energy, gnorm, max_constraint_violation(u, bc)});

    if (gnorm < tol_abs) {
      converged = true;
      break;
    }
    if (iter >= opt.max_iterations) break;

    if (opt.barzilai_borwein && prev_values.size() > 0) {
      double ss = 0.0, sy = 0.0;
      for (int i = 0; i < v; ++i) {
        const VecC s = u.values.col(i) - prev_values.col(i);
        const VecC y = d.col(i) - prev_dir.col(i);
        ss += mass[i] * u.model.metric(u.values.col(i), s, s);
        sy += mass[i] * u.model.metric(u.values.col(i), s, y);
      }
      if (sy > 0.0 && ss > 0.0)
        sigma = std::min(std::max(ss / sy, 1e-12), 1e3);
      else
        sigma = opt.initial_step;
    }
    prev_values = u.values;
    prev_dir = d;

    bool accepted = false;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
      MapField cand = step_field(u, bc, d, sigma);
      MatC cand_emb = ctx.embed(cand.values);
      const double cand_energy = ctx.dirichlet(cand_emb);
      if (cand_energy <= energy - opt.armijo_slope * sigma * gnorm2) {
        u = std::move(cand);
        emb = std::move(cand_emb);
        energy = cand_energy;
        accepted = true;
        break;
      }
      sigma *= opt.backtrack_factor;
    }
    if (!accepted) break;  // line search exhausted; report non-convergence
    ++iter;
  }

  EnergyReport report;
  report.dirichlet = energy;
  report.area = area(u);
  report.conformality_defect = conformality_defect(u);
  report.dbar_residual = dbar_residual(u);
  report.perpendicularity_defect = perpendicularity_defect(u, bc.charts);
  report.iterations = iter;
  report.converged = converged;
  report.grad_norm = trace.back().grad_norm;
  report.max_constraint_violation = max_constraint_violation(u, bc);
  return SolveOutcome{std::move(u), report, std::move(trace)};
}

}  // namespace holo
