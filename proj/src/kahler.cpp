#include "holodisc/kahler.hpp"

#include <algorithm>
#include <cmath>

namespace holo {

namespace {
constexpr double kPointTol = 1e-8;
constexpr double kTangentTol = 1e-8;

double clamp01(double x) { return std::min(1.0, std::max(-1.0, x)); }
}  // namespace

KahlerModel KahlerModel::flat(int m) {
  if (m < 1) throw domain_error("flat model dimension must be >= 1");
  return KahlerModel(ModelKind::FlatCm, m, 0.0);
}

KahlerModel KahlerModel::projective(int m, double fs_scale) {
  if (m < 1) throw domain_error("projective model dimension must be >= 1");
  if (!(fs_scale > 0.0)) throw domain_error("fs_scale must be positive");
  return KahlerModel(ModelKind::ProjectiveFS, m, fs_scale);
}

void KahlerModel::check_point(const VecC& p) const {
  if (p.size() != ambient_dim())
    throw domain_error("point has wrong ambient dimension");
  if (kind_ == ModelKind::ProjectiveFS) {
    if (std::abs(p.norm() - 1.0) > kPointTol)
      throw domain_error("projective point representative is not unit-norm");
  }
}

void KahlerModel::check_tangent(const VecC& p, const VecC& v) const {
  check_point(p);
  if (v.size() != ambient_dim())
    throw domain_error("tangent vector has wrong ambient dimension");
  if (kind_ == ModelKind::ProjectiveFS) {
    const cxd ip = inner(v, p);
    const double scale = 1.0 + v.norm();
    if (std::abs(ip.real()) > kTangentTol * scale)
      throw domain_error(
          "vector is not tangent: not orthogonal to the base point p");
    if (std::abs(ip.imag()) > kTangentTol * scale)
      throw domain_error(
          "vector is not tangent: not orthogonal to i*p (not horizontal)");
  }
}

VecC KahlerModel::normalize_point(VecC p) const {
  if (p.size() != ambient_dim())
    throw domain_error("point has wrong ambient dimension");
  if (kind_ == ModelKind::FlatCm) return p;
  const double n = p.norm();
  if (n < 1e-14) throw domain_error("cannot normalize the zero vector");
  p /= n;
  for (int i = 0; i < p.size(); ++i) {
    const double a = std::abs(p[i]);
    if (a > 1e-12) {
      p *= std::conj(p[i]) / a;
      break;
    }
  }
  return p;
}

bool KahlerModel::same_point(const VecC& p, const VecC& q, double tol) const {
  if (kind_ == ModelKind::FlatCm) return (p - q).norm() <= tol;
  return std::abs(std::abs(inner(p, q)) - 1.0) <= tol;
}

double KahlerModel::metric(const VecC& p, const VecC& v, const VecC& w) const {
  if (kind_ == ModelKind::FlatCm) return inner(v, w).real();
  (void)p;
  return fs_scale_ * fs_scale_ * inner(v, w).real();
}

VecC KahlerModel::complex_structure(const VecC& p, const VecC& v) const {
  (void)p;
  return cxd(0.0, 1.0) * v;
}

double KahlerModel::omega(const VecC& p, const VecC& v, const VecC& w) const {
  return metric(p, complex_structure(p, v), w);
}

double KahlerModel::distance(const VecC& p, const VecC& q) const {
  if (kind_ == ModelKind::FlatCm) return (q - p).norm();
  return fs_scale_ * std::acos(clamp01(std::abs(inner(q, p))));
}

VecC KahlerModel::tangent_project(const VecC& p, const VecC& v) const {
  if (kind_ == ModelKind::FlatCm) return v;
  return v - inner(v, p) * p;
}

VecC KahlerModel::retract(const VecC& p, const VecC& v) const {
  if (kind_ == ModelKind::FlatCm) return p + v;
  const double t = v.norm();
  if (t < 1e-300) return p;
  VecC q = std::cos(t) * p + (std::sin(t) / t) * v;
  return q / q.norm();
}

VecC KahlerModel::log(const VecC& p, const VecC& q) const {
  if (kind_ == ModelKind::FlatCm) return q - p;
  const cxd z = inner(q, p);
  const double a = std::abs(z);
  if (a < 1e-12)
    throw numeric_error("log is not defined between antipodal fibers");
  // Align q's phase with p, then split off the component along p.
  VecC qa = q * (std::conj(z) / a);
  VecC w = qa - a * p;
  const double s = w.norm();
  const double theta = std::acos(clamp01(a));
  if (s < 1e-15) return VecC::Zero(p.size());
  return (theta / s) * w;
}

VecC KahlerModel::transport(const VecC& p, const VecC& q, const VecC& v) const {
  if (kind_ == ModelKind::FlatCm) return v;
  const cxd z = inner(q, p);
  const double a = std::abs(z);
  if (a < 1e-12)
    throw numeric_error("transport is not defined between antipodal fibers");
  const cxd phase = z / a;  // q = (aligned q) * phase
  VecC qa = q * std::conj(phase);
  VecC w = qa - a * p;
  const double s = w.norm();
  if (s < 1e-14) return phase * v;
  w /= s;
  const double theta = std::acos(clamp01(a));
  // Transvection along the great circle through p and qa, restricted to a
  // horizontal input: rotates the (p,w) plane by theta, fixes its complement.
  const cxd cw = inner(v, w);
  VecC out = v + (std::cos(theta) - 1.0) * cw * w - std::sin(theta) * cw * p;
  return phase * out;
}

VecC KahlerModel::chart_point(const VecC& z) const {
  if (kind_ == ModelKind::FlatCm) {
    if (z.size() != m_) throw domain_error("chart point has wrong dimension");
    return z;
  }
  if (z.size() != m_) throw domain_error("chart point has wrong dimension");
  VecC p(m_ + 1);
  p[0] = 1.0;
  p.tail(m_) = z;
  return p / p.norm();
}

VecC KahlerModel::chart_tangent(const VecC& z, const VecC& dz) const {
  if (kind_ == ModelKind::FlatCm) {
    if (dz.size() != m_) throw domain_error("chart tangent has wrong dimension");
    return dz;
  }
  if (z.size() != m_ || dz.size() != m_)
    throw domain_error("chart tangent has wrong dimension");
  VecC raw(m_ + 1);
  raw[0] = 0.0;
  raw.tail(m_) = dz;
  const double n = std::sqrt(1.0 + z.squaredNorm());
  VecC p(m_ + 1);
  p[0] = 1.0;
  p.tail(m_) = z;
  p /= n;
  // Horizontal lift of d/dt [1 : z + t dz]; the radial component of the
  // normalized curve derivative is parallel to p and projects away.
  return tangent_project(p, VecC(raw / n));
}

}  // namespace holo
