#include "holodisc/field.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "energy_internal.hpp"

namespace holo {

using detail::EnergyContext;

MapField MapField::constant(const KahlerModel& model,
                            std::shared_ptr<const DiscMesh> mesh,
                            const VecC& point) {
  MapField u{model, std::move(mesh), {}};
  u.model.check_point(point);
  const VecC p = model.kind() == ModelKind::ProjectiveFS
                     ? model.normalize_point(point)
                     : point;
  u.values.resize(model.ambient_dim(), u.mesh->nodes.size());
  for (int i = 0; i < u.values.cols(); ++i) u.values.col(i) = p;
  return u;
}

void MapField::validate() const {
  if (!mesh) throw domain_error("map field has no mesh");
  if (values.rows() != model.ambient_dim() ||
      values.cols() != Eigen::Index(mesh->nodes.size()))
    throw domain_error("map field has wrong value dimensions");
  if (model.kind() == ModelKind::ProjectiveFS) {
    for (int i = 0; i < values.cols(); ++i)
      if (std::abs(values.col(i).norm() - 1.0) > 1e-8)
        throw domain_error("map field has a non-unit projective value");
  }
}

void MapField::write_csv(std::ostream& os) const {
  os << "id";
  for (int c = 0; c < values.rows(); ++c) os << ",re" << c << ",im" << c;
  os << "\n" << std::setprecision(17);
  for (int i = 0; i < values.cols(); ++i) {
    os << i;
    for (int c = 0; c < values.rows(); ++c)
      os << ',' << values(c, i).real() << ',' << values(c, i).imag();
    os << '\n';
  }
}

MapField MapField::read_csv(const KahlerModel& model,
                            std::shared_ptr<const DiscMesh> mesh,
                            std::istream& is) {
  MapField u{model, std::move(mesh), {}};
  const int dim = model.ambient_dim();
  u.values.resize(dim, u.mesh->nodes.size());
  u.values.setZero();
  std::vector<bool> seen(u.mesh->nodes.size(), false);
  std::string line;
  if (!std::getline(is, line))
    throw parse_error("field CSV is empty");
  size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> nums;
    while (std::getline(ls, cell, ',')) {
      try {
        nums.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw parse_error("field CSV row " + std::to_string(row) +
                          ": cannot parse '" + cell + "'");
      }
    }
    if (int(nums.size()) != 1 + 2 * dim)
      throw parse_error("field CSV row " + std::to_string(row) +
                        ": expected " + std::to_string(1 + 2 * dim) +
                        " columns");
    const int id = int(nums[0]);
    if (id < 0 || id >= int(u.mesh->nodes.size()) || nums[0] != double(id))
      throw parse_error("field CSV row " + std::to_string(row) +
                        ": invalid node id");
    for (int c = 0; c < dim; ++c)
      u.values(c, id) = cxd(nums[1 + 2 * c], nums[2 + 2 * c]);
    seen[id] = true;
  }
  for (size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw parse_error("field CSV is missing node " + std::to_string(i));
  if (model.kind() == ModelKind::ProjectiveFS)
    for (int i = 0; i < u.values.cols(); ++i)
      u.values.col(i) = model.normalize_point(u.values.col(i));
  u.validate();
  return u;
}

namespace detail {

MatC tangent_block(const MatC& h, const MatC& p) {
  MatC hp = h * p;
  MatC ph = p * h;
  return hp + ph - p * hp - ph * p;
}

EnergyContext::EnergyContext(const KahlerModel& model,
                             std::shared_ptr<const DiscMesh> mesh)
    : model_(model), mesh_(std::move(mesh)) {
  const int dim = model_.ambient_dim();
  de_ = model_.kind() == ModelKind::FlatCm ? dim : dim * dim;
  alpha_ = model_.kind() == ModelKind::FlatCm
               ? 1.0
               : 0.5 * model_.fs_scale() * model_.fs_scale();

  const auto& m = *mesh_;
  const int v = int(m.nodes.size());
  const int f = int(m.triangles.size());
  grads_.resize(f);
  areas_.resize(f);
  mass_ = VecR::Zero(v);
  std::vector<Eigen::Triplet<cxd>> trips;
  trips.reserve(size_t(f) * 9);
  for (int t = 0; t < f; ++t) {
    const auto& tr = m.triangles[t];
    const double a = m.triangle_area(t);
    areas_[t] = a;
    for (int e = 0; e < 3; ++e) {
      const Vec2 d = m.nodes[tr[(e + 2) % 3]].pos - m.nodes[tr[(e + 1) % 3]].pos;
      grads_[t][e] = Vec2(-d.y(), d.x()) / (2.0 * a);
      mass_[tr[e]] += a / 3.0;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(tr[i], tr[j],
                           cxd(a * grads_[t][i].dot(grads_[t][j]), 0.0));
  }
  stiffness_.resize(v, v);
  stiffness_.setFromTriplets(trips.begin(), trips.end());
  stiffness_.makeCompressed();
}

MatC EnergyContext::embed(const MatC& values) const {
  if (model_.kind() == ModelKind::FlatCm) return values;
  const int dim = model_.ambient_dim();
  MatC out(de_, values.cols());
  for (int i = 0; i < values.cols(); ++i) {
    const MatC p = values.col(i) * values.col(i).adjoint();
    out.col(i) = Eigen::Map<const VecC>(p.data(), de_);
  }
  return out;
}

double EnergyContext::dirichlet(const MatC& emb) const {
  const MatC b = emb * stiffness_;
  return 0.5 * alpha_ * emb.cwiseProduct(b.conjugate()).sum().real();
}

MatC EnergyContext::stiffness_apply(const MatC& emb) const {
  return emb * stiffness_;
}

MatC EnergyContext::gradient_from_stiffness(const MatC& values,
                                            const MatC& b) const {
  const int dim = model_.ambient_dim();
  MatC grad(dim, values.cols());
  if (model_.kind() == ModelKind::FlatCm) {
    for (int i = 0; i < values.cols(); ++i)
      grad.col(i) = b.col(i) / mass_[i];
    return grad;
  }
  for (int i = 0; i < values.cols(); ++i) {
    const Eigen::Map<const MatC> h(b.col(i).data(), dim, dim);
    const MatC p = values.col(i) * values.col(i).adjoint();
    const MatC a = tangent_block(h, p);
    grad.col(i) = (a * values.col(i)) / mass_[i];
  }
  return grad;
}

void EnergyContext::derivatives(const MatC& emb, MatC& us, MatC& ut) const {
  const auto& m = *mesh_;
  const int f = int(m.triangles.size());
  us.resize(de_, f);
  ut.resize(de_, f);
  us.setZero();
  ut.setZero();
  for (int t = 0; t < f; ++t) {
    const auto& tr = m.triangles[t];
    for (int e = 0; e < 3; ++e) {
      us.col(t) += grads_[t][e].x() * emb.col(tr[e]);
      ut.col(t) += grads_[t][e].y() * emb.col(tr[e]);
    }
  }
}

}  // namespace detail

double dirichlet_energy(const MapField& u) {
  u.validate();
  EnergyContext ctx(u.model, u.mesh);
  return ctx.dirichlet(ctx.embed(u.values));
}

namespace {

// Pointwise first fundamental form entries from embedded derivatives.
struct FormEntries {
  double ss, tt, st;
};

FormEntries form_at(const EnergyContext& ctx, const MatC& us, const MatC& ut,
                    int t) {
  FormEntries f;
  f.ss = ctx.alpha() * us.col(t).squaredNorm();
  f.tt = ctx.alpha() * ut.col(t).squaredNorm();
  f.st = ctx.alpha() * inner(us.col(t), ut.col(t)).real();
  return f;
}

}  // namespace

double area(const MapField& u) {
  u.validate();
  EnergyContext ctx(u.model, u.mesh);
  MatC us, ut;
  ctx.derivatives(ctx.embed(u.values), us, ut);
  double total = 0.0;
  for (size_t t = 0; t < u.mesh->triangles.size(); ++t) {
    const FormEntries f = form_at(ctx, us, ut, int(t));
    const double det = std::max(f.ss * f.tt - f.st * f.st, 0.0);
    total += u.mesh->triangle_area(int(t)) * std::sqrt(det);
  }
  return total;
}

double conformality_defect(const MapField& u, double corner_exclusion_radius) {
  u.validate();
  const DiscMesh& mesh = *u.mesh;
  EnergyContext ctx(u.model, u.mesh);
  MatC us, ut;
  ctx.derivatives(ctx.embed(u.values), us, ut);
  double total = 0.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (corner_exclusion_radius > 0.0) {
      const auto& tr = mesh.triangles[t];
      const Vec2 centroid = (mesh.nodes[tr[0]].pos + mesh.nodes[tr[1]].pos +
                             mesh.nodes[tr[2]].pos) /
                            3.0;
      double corner_d = std::numeric_limits<double>::max();
      for (int idx : mesh.marked)
        corner_d = std::min(corner_d, (centroid - mesh.nodes[idx].pos).norm());
      if (corner_d < corner_exclusion_radius) continue;
    }
    const FormEntries f = form_at(ctx, us, ut, int(t));
    const double h1 = f.ss - f.tt;
    const double h2 = 2.0 * f.st;
    total += mesh.triangle_area(int(t)) * (h1 * h1 + h2 * h2);
  }
  return std::sqrt(total);
}

double dbar_residual(const MapField& u) {
  u.validate();
  EnergyContext ctx(u.model, u.mesh);
  const MatC emb = ctx.embed(u.values);
  MatC us, ut;
  ctx.derivatives(emb, us, ut);
  const int dim = u.model.ambient_dim();
  double total = 0.0;
  if (u.model.kind() == ModelKind::FlatCm) {
    for (size_t t = 0; t < u.mesh->triangles.size(); ++t) {
      const VecC xi = 0.5 * (us.col(int(t)) + cxd(0, 1) * ut.col(int(t)));
      total += u.mesh->triangle_area(int(t)) * ctx.alpha() * xi.squaredNorm();
    }
    return std::sqrt(total);
  }
  // J depends on the base point; evaluate on the degree-2 midpoint rule with
  // the interpolated projection matrix.
  for (size_t t = 0; t < u.mesh->triangles.size(); ++t) {
    const auto& tr = u.mesh->triangles[t];
    const Eigen::Map<const MatC> ps(us.col(int(t)).data(), dim, dim);
    const Eigen::Map<const MatC> pt(ut.col(int(t)).data(), dim, dim);
    const double w = u.mesh->triangle_area(int(t)) / 3.0;
    static const double mid[3][3] = {
        {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    for (int q = 0; q < 3; ++q) {
      MatC pq = MatC::Zero(dim, dim);
      for (int e = 0; e < 3; ++e) {
        if (mid[q][e] == 0.0) continue;
        const Eigen::Map<const MatC> pe(emb.col(tr[e]).data(), dim, dim);
        pq += mid[q][e] * pe;
      }
      const MatC jdt = cxd(0, 1) * (pt * pq - pq * pt);
      const MatC xi = 0.5 * (ps + jdt);
      total += w * ctx.alpha() * xi.squaredNorm();
    }
  }
  return std::sqrt(total);
}

double perpendicularity_defect(const MapField& u,
                               const std::vector<LagrangianChart>& charts,
                               double exclusion_radius) {
  u.validate();
  const DiscMesh& mesh = *u.mesh;
  if (exclusion_radius <= 0.0) exclusion_radius = 2.0 * mesh.target_h;

  EnergyContext ctx(u.model, u.mesh);
  const MatC emb = ctx.embed(u.values);
  MatC us, ut;
  ctx.derivatives(emb, us, ut);

  // Boundary edge -> incident triangle.
  std::map<std::pair<int, int>, int> edge_tri;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      const std::pair<int, int> key = std::minmax(tr[e], tr[(e + 1) % 3]);
      auto [it, fresh] = edge_tri.emplace(key, int(t));
      if (!fresh) it->second = -1;  // interior edge, two owners
    }
  }

  const int dim = u.model.ambient_dim();
  double worst = 0.0;
  for (const auto& q : boundary_rule(mesh)) {
    double corner_d = std::numeric_limits<double>::max();
    for (int k = 0; k < mesh.n_marks; ++k) {
      const double a = 2.0 * kPi * k / mesh.n_marks;
      corner_d = std::min(corner_d,
                          (q.pos - Vec2(std::cos(a), std::sin(a))).norm());
    }
    if (corner_d < exclusion_radius) continue;

    const auto it = edge_tri.find(std::minmax(q.node_a, q.node_b));
    if (it == edge_tri.end() || it->second < 0)
      throw domain_error("boundary edge without a unique triangle");
    const int t = it->second;

    const Vec2 pa = mesh.nodes[q.node_a].pos;
    const Vec2 pb = mesh.nodes[q.node_b].pos;
    const Vec2 tangent = (pb - pa).normalized();
    const Vec2 nu(tangent.y(), -tangent.x());  // outward for a CCW boundary

    if (q.arc_label < 1 || q.arc_label > int(charts.size()))
      throw domain_error("boundary arc without a Lagrangian chart");
    const LagrangianChart& chart = charts[q.arc_label - 1];

    // Field value at the quadrature point and the normal derivative as a
    // tangent vector there.
    VecC base(dim);
    VecC deriv(dim);
    if (u.model.kind() == ModelKind::FlatCm) {
      base = q.coeff_a * u.values.col(q.node_a) +
             (1.0 - q.coeff_a) * u.values.col(q.node_b);
      deriv = nu.x() * us.col(t) + nu.y() * ut.col(t);
    } else {
      // Gauge-free value: top eigenvector of the interpolated projection.
      MatC pq(dim, dim);
      const Eigen::Map<const MatC> p1(emb.col(q.node_a).data(), dim, dim);
      const Eigen::Map<const MatC> p2(emb.col(q.node_b).data(), dim, dim);
      pq = q.coeff_a * p1 + (1.0 - q.coeff_a) * p2;
      Eigen::SelfAdjointEigenSolver<MatC> eig(pq);
      VecC top = eig.eigenvectors().col(dim - 1);
      base = u.model.normalize_point(top);
      const VecC db = nu.x() * us.col(t) + nu.y() * ut.col(t);
      const Eigen::Map<const MatC> dbm(db.data(), dim, dim);
      deriv = u.model.tangent_project(base, VecC(dbm * base));
    }
    const VecC on_chart = chart.project(u.model, u.model.kind() ==
                                                        ModelKind::FlatCm
                                                    ? base
                                                    : u.model.normalize_point(base));
    const MatC frame = chart.tangent_frame(u.model, on_chart);
    for (int j = 0; j < frame.cols(); ++j)
      worst = std::max(worst,
                       std::abs(u.model.metric(on_chart, deriv, frame.col(j))));
  }
  return worst;
}

MatC energy_gradient(const MapField& u) {
  u.validate();
  EnergyContext ctx(u.model, u.mesh);
  const MatC emb = ctx.embed(u.values);
  return ctx.gradient_from_stiffness(u.values, ctx.stiffness_apply(emb));
}

}  // namespace holo
