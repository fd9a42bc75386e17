#include "holodisc/lagrangian.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace holo {

namespace {

void require_unitary(const MatC& u, const char* what) {
  if (u.rows() != u.cols()) {
    std::ostringstream os;
    os << what << " frame must be square, got " << u.rows() << "x" << u.cols();
    throw domain_error(os.str());
  }
  MatC gram = u.adjoint() * u;
  gram -= MatC::Identity(u.cols(), u.cols());
  if (gram.norm() > 1e-10 * std::sqrt(double(u.cols()))) {
    std::ostringstream os;
    os << what << " frame is not unitary (deviation " << gram.norm() << ")";
    throw domain_error(os.str());
  }
}

// Recover (phase, real direction) from w = U^dag p for p on or near the
// chart U*RP^m: w = e^{i phi} r with r real unit, phi in (-pi/2, pi/2].
std::pair<cxd, VecR> split_phase(const VecC& w) {
  const cxd w2 = w.transpose() * w;  // e^{2 i phi} for points on the chart
  const double half = 0.5 * std::arg(w2);
  const cxd phase = std::exp(cxd(0.0, half));
  VecR r = (w * std::conj(phase)).real();
  const double n = r.norm();
  if (n < 1e-14) throw numeric_error("point has no real component in chart");
  return {phase, VecR(r / n)};
}

}  // namespace

LagrangianChart LagrangianChart::linear_plane(const KahlerModel& model,
                                              MatC frame) {
  if (model.kind() != ModelKind::FlatCm)
    throw domain_error("linear plane charts require the flat model");
  if (frame.rows() != model.m())
    throw domain_error("linear plane frame has wrong ambient dimension");
  require_unitary(frame, "linear plane");
  return LagrangianChart(LagrangianKind::LinearPlane, std::move(frame));
}

LagrangianChart LagrangianChart::real_projective(const KahlerModel& model,
                                                 MatC frame) {
  if (model.kind() != ModelKind::ProjectiveFS)
    throw domain_error("real projective charts require the projective model");
  if (frame.rows() != model.m() + 1)
    throw domain_error("real projective frame has wrong ambient dimension");
  require_unitary(frame, "real projective");
  return LagrangianChart(LagrangianKind::RealProjective, std::move(frame));
}

bool LagrangianChart::contains(const KahlerModel& model, const VecC& p,
                               double tol) const {
  return chart_distance(model, p) <= tol;
}

double LagrangianChart::chart_distance(const KahlerModel& model,
                                       const VecC& p) const {
  model.check_point(p);
  if (kind_ == LagrangianKind::LinearPlane) {
    VecC q = frame_ * (frame_.adjoint() * p).real();
    return (p - q).norm();
  }
  // Largest |<r, w>| over real unit r equals sqrt((1 + |w^T w|)/2).
  VecC w = frame_.adjoint() * p;
  const cxd w2 = w.transpose() * w;
  const double lam = 0.5 * (1.0 + std::abs(w2));
  const double c = std::min(1.0, std::sqrt(std::max(lam, 0.0)));
  return model.fs_scale() * std::acos(c);
}

VecC LagrangianChart::project(const KahlerModel& model, const VecC& p) const {
  model.check_point(p);
  if (kind_ == LagrangianKind::LinearPlane)
    return frame_ * (frame_.adjoint() * p).real();

  const double d = chart_distance(model, p);
  const double radius = model.fs_scale() * kPi / 8.0;
  if (d > radius) {
    std::ostringstream os;
    os << "nearest-point projection onto the real chart is ill posed: "
       << "distance " << d << " exceeds the well-posedness radius " << radius
       << " (margin " << d - radius << ")";
    throw numeric_error(os.str());
  }
  // Maximize (x.r)^2 + (y.r)^2 over real unit r, where conj(w) = x + i y.
  VecC w = frame_.adjoint() * p;
  VecR x = w.real();
  VecR y = (-w.imag()).eval();  // conj(w) split
  const double xx = x.squaredNorm(), yy = y.squaredNorm(), xy = x.dot(y);
  VecR r;
  const double disc = std::sqrt(std::max(0.0, (xx - yy) * (xx - yy) / 4.0 + xy * xy));
  if (disc < 1e-14) {
    // Isotropic case: every direction in span{x,y} is equally near; at
    // distance 0 the point is already real up to phase.
    r = x.norm() >= y.norm() ? x : y;
  } else {
    const double lam = 0.5 * (xx + yy) + disc;
    // Top eigenvector of the 2x2 Gram pencil in the (x, y) basis.
    double a = xy, b = lam - xx;
    if (std::abs(a) + std::abs(b) < 1e-14 * lam) {
      a = lam - yy;
      b = xy;
    }
    r = a * x + b * y;
  }
  const double rn = r.norm();
  if (rn < 1e-14)
    throw numeric_error("nearest-point projection onto the real chart is ill "
                        "posed: point is isotropic");
  r /= rn;
  return model.normalize_point(frame_ * r.cast<cxd>());
}

MatC LagrangianChart::tangent_frame(const KahlerModel& model,
                                    const VecC& p) const {
  model.check_point(p);
  if (!contains(model, p, 1e-6))
    throw domain_error("point is not on the Lagrangian chart");
  const int m = model.m();
  if (kind_ == LagrangianKind::LinearPlane) return frame_;

  VecC w = frame_.adjoint() * p;
  auto [phase, r] = split_phase(w);
  // Deterministic orthonormal completion of r in R^{m+1}: Gram-Schmidt over
  // coordinate seeds in fixed order, keeping the first m survivors.
  const int n = m + 1;
  std::vector<VecR> basis;
  basis.reserve(m);
  for (int j = 0; j < n && int(basis.size()) < m; ++j) {
    VecR cand = VecR::Zero(n);
    cand[j] = 1.0;
    cand -= cand.dot(r) * r;
    for (const VecR& q : basis) cand -= cand.dot(q) * q;
    const double cn = cand.norm();
    if (cn > 1e-6) basis.push_back(cand / cn);
  }
  if (int(basis.size()) != m)
    throw numeric_error("failed to complete a tangent frame for the chart");
  MatC out(n, m);
  const double unit = 1.0 / model.fs_scale();  // g-orthonormal columns
  for (int j = 0; j < m; ++j)
    out.col(j) = phase * unit * (frame_ * basis[j].cast<cxd>());
  return out;
}

VecR LagrangianChart::real_coordinates(const KahlerModel& model,
                                       const VecC& p) const {
  if (kind_ != LagrangianKind::RealProjective)
    throw domain_error("real coordinates require a real projective chart");
  model.check_point(p);
  auto [phase, r] = split_phase(VecC(frame_.adjoint() * p));
  (void)phase;
  for (int i = 0; i < r.size(); ++i) {
    if (std::abs(r[i]) > 1e-8) {
      if (r[i] < 0.0) r = -r;
      break;
    }
  }
  return r;
}

namespace {

// Real null space of K (columns), singular values below tol count as zero.
MatR real_null_space(const MatR& k, double tol) {
  Eigen::JacobiSVD<MatR> svd(k, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++rank;
  return svd.matrixV().rightCols(sv.size() - rank);
}

int real_span_rank(const std::vector<MatC>& frames, int rows, double tol) {
  int cols = 0;
  for (const auto& f : frames) cols += int(f.cols());
  MatR stacked(2 * rows, cols);
  int at = 0;
  for (const auto& f : frames)
    for (int j = 0; j < f.cols(); ++j, ++at) {
      stacked.col(at).head(rows) = f.col(j).real();
      stacked.col(at).tail(rows) = f.col(j).imag();
    }
  Eigen::JacobiSVD<MatR> svd(stacked);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol * sv[0]) ++rank;
  return rank;
}

}  // namespace

std::vector<IntersectionPoint> transversal_intersections(
    const KahlerModel& model, const LagrangianChart& a,
    const LagrangianChart& b) {
  const int m = model.m();

  if (model.kind() == ModelKind::FlatCm) {
    // A x = B y over real x, y: stack real and imaginary parts.
    MatR sys(2 * m, 2 * m);
    sys.topLeftCorner(m, m) = a.frame().real();
    sys.bottomLeftCorner(m, m) = a.frame().imag();
    sys.topRightCorner(m, m) = -b.frame().real();
    sys.bottomRightCorner(m, m) = -b.frame().imag();
    MatR null = real_null_space(sys, 1e-10);
    if (null.cols() > 0)
      throw numeric_error(
          "non-transverse pair: the planes meet in a positive-dimensional "
          "set");
    IntersectionPoint origin;
    origin.point = VecC::Zero(m);
    origin.transversal = true;
    return {origin};
  }

  // U_a r_a ~ U_b r_b with real unit r_a, r_b. Writing W = U_a^dag U_b =
  // Wr + i Wi, the pencil (sin psi Wr + cos psi Wi) r_b = 0 picks out the
  // candidate directions.
  const MatC w = a.frame().adjoint() * b.frame();
  const MatR wr = w.real();
  const MatR wi = w.imag();
  const int n = m + 1;

  std::vector<VecR> dirs;
  auto add_candidates = [&](const MatR& k) {
    MatR null = real_null_space(k, 1e-9);
    if (null.cols() > 1)
      throw numeric_error(
          "non-transverse pair: the charts meet in a positive-dimensional "
          "set");
    if (null.cols() == 1) dirs.push_back(null.col(0));
  };

  // cos psi = 0 branch.
  {
    Eigen::JacobiSVD<MatR> svd(wr);
    if (svd.singularValues()[0] < 1e-12) {
      // W purely imaginary: i*W is real orthogonal, the charts coincide and
      // the empty candidate list below reports the pair as non-transverse.
    } else {
      add_candidates(wr);
    }
  }
  // Finite branch: Wi r = -t Wr r.
  {
    Eigen::GeneralizedEigenSolver<MatR> ges;
    ges.compute(wi, -wr, false);
    const auto& alphas = ges.alphas();
    const auto& betas = ges.betas();
    std::vector<double> ts;
    for (int i = 0; i < alphas.size(); ++i) {
      if (std::abs(betas[i]) < 1e-12 * (1.0 + std::abs(alphas[i]))) continue;
      const cxd t = alphas[i] / betas[i];
      if (std::abs(t.imag()) > 1e-8 * (1.0 + std::abs(t.real()))) continue;
      ts.push_back(t.real());
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end(),
                         [](double u, double v) {
                           return std::abs(u - v) <= 1e-8 * (1.0 + std::abs(u));
                         }),
             ts.end());
    for (double t : ts) add_candidates(wi + t * wr);
  }

  std::vector<IntersectionPoint> out;
  for (const VecR& r : dirs) {
    VecC p = model.normalize_point(b.frame() * r.cast<cxd>());
    if (!a.contains(model, p, 1e-7) || !b.contains(model, p, 1e-7)) continue;
    bool dup = false;
    for (const auto& q : out)
      if (model.same_point(p, q.point, 1e-8)) dup = true;
    if (dup) continue;
    IntersectionPoint ip;
    ip.point = p;
    const int rank = real_span_rank({a.tangent_frame(model, p),
                                     b.tangent_frame(model, p)},
                                    n, 1e-9);
    ip.transversal = (rank == 2 * m);
    out.push_back(std::move(ip));
  }
  if (out.empty())
    throw numeric_error("non-transverse pair: no discrete intersection found");
  return out;
}

}  // namespace holo
