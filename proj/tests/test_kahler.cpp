#include "holodisc/kahler.hpp"

#include <cmath>

#include "doctest.h"
#include "holodisc/lagrangian.hpp"
#include "test_support.hpp"

using namespace holo;
using namespace holo::testing;

namespace {

VecC cvec(std::initializer_list<cxd> xs) {
  VecC v(Eigen::Index(xs.size()));
  Eigen::Index i = 0;
  for (const cxd& x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("flat metric is the Euclidean metric on C^m") {
  auto model = KahlerModel::flat(1);
  VecC p = cvec({0.0});
  VecC v = cvec({1.0});
  CHECK(model.metric(p, v, v) == doctest::Approx(1.0).epsilon(1e-14));

  auto m3 = KahlerModel::flat(3);
  VecC q = random_complex_vec(3);
  VecC a = random_complex_vec(3), b = random_complex_vec(3);
  CHECK(m3.metric(q, a, b) ==
        doctest::Approx(inner(a, b).real()).epsilon(1e-13));
  CHECK(m3.metric(q, a, b) == doctest::Approx(m3.metric(q, b, a)));
}

TEST_CASE("Fubini-Study chart metric values at z=0 and z=1") {
  auto model = KahlerModel::projective(1);
  VecC z0 = cvec({0.0}), dz = cvec({1.0});
  VecC p0 = model.chart_point(z0);
  VecC v0 = model.chart_tangent(z0, dz);
  // 4|dz|^2/(1+|z|^2)^2 at z=0.
  CHECK(model.metric(p0, v0, v0) == doctest::Approx(4.0).epsilon(1e-12));

  VecC z1 = cvec({1.0});
  VecC p1 = model.chart_point(z1);
  VecC v1 = model.chart_tangent(z1, dz);
  // 4/(1+1)^2 = 1, cross-checked against the homogeneous-coordinate value.
  CHECK(model.metric(p1, v1, v1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(4.0 / ((1.0 + z1.squaredNorm()) * (1.0 + z1.squaredNorm())) ==
        doctest::Approx(1.0));
}

TEST_CASE("metric, J and omega invariants on random tangent pairs") {
  for (auto model : {KahlerModel::flat(2), KahlerModel::projective(2)}) {
    for (int trial = 0; trial < 1000; ++trial) {
      VecC p = random_point(model);
      VecC v = random_tangent(model, p);
      VecC w = random_tangent(model, p);
      const double gvw = model.metric(p, v, w);
      VecC jv = model.complex_structure(p, v);
      VecC jw = model.complex_structure(p, w);
      CHECK(std::abs(model.metric(p, jv, jw) - gvw) < 1e-10);
      // J^2 = -1.
      CHECK((model.complex_structure(p, jv) + v).norm() < 1e-12);
      // omega(v,w) = g(Jv,w), antisymmetric.
      CHECK(std::abs(model.omega(p, v, w) + model.omega(p, w, v)) < 1e-10);
      // Positivity.
      if (v.norm() > 1e-8) CHECK(model.metric(p, v, v) > 0.0);
    }
  }
}

TEST_CASE("non-tangent vectors are rejected with the violated orthogonality") {
  auto model = KahlerModel::projective(1);
  VecC p = model.chart_point(cvec({0.0}));
  std::string radial =
      thrown_message([&] { model.check_tangent(p, VecC(p)); });
  CHECK(radial.find("orthogonal to the base point") != std::string::npos);
  std::string phase = thrown_message(
      [&] { model.check_tangent(p, VecC(cxd(0.0, 1.0) * p)); });
  CHECK(phase.find("i*p") != std::string::npos);
}

TEST_CASE("geodesic distance between the coordinate poles matches the chart "
          "arc-length integral") {
  auto model = KahlerModel::projective(1);
  VecC pole0 = cvec({1.0, 0.0});
  VecC pole1 = cvec({0.0, 1.0});
  const double d = model.distance(pole0, pole1);

  // Arc length of the radial chart path z = t, t in [0, inf), with the
  // speed measured through metric_eval on homogeneous representatives.
  auto speed = [&](double t) {
    VecC z = cvec({t});
    VecC v = model.chart_tangent(z, cvec({1.0}));
    return std::sqrt(model.metric(model.chart_point(z), v, v));
  };
  const int steps = 20000;
  double len = 0.0;
  for (int i = 0; i < steps; ++i) {  // t in [0, 1]
    const double t = (i + 0.5) / steps;
    len += speed(t) / steps;
  }
  for (int i = 0; i < steps; ++i) {  // t = 1/u, u in (0, 1]
    const double u = (i + 0.5) / steps;
    len += speed(1.0 / u) / (u * u * steps);
  }
  CHECK(d == doctest::Approx(len).epsilon(1e-7));
  CHECK(d == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("retract, log and transport are mutually consistent") {
  auto model = KahlerModel::projective(2);
  for (int trial = 0; trial < 50; ++trial) {
    VecC p = random_point(model);
    VecC v = random_tangent(model, p);
    v *= 0.3 / std::max(v.norm(), 1e-12);
    VecC q = model.retract(p, v);
    CHECK((model.log(p, q) - v).norm() < 1e-10);
    CHECK(model.distance(p, q) ==
          doctest::Approx(model.metric(p, v, v) == 0.0
                              ? 0.0
                              : std::sqrt(model.metric(p, v, v)))
              .epsilon(1e-10));

    VecC w = random_tangent(model, p);
    VecC tw = model.transport(p, q, w);
    model.check_tangent(q, tw);
    CHECK(model.metric(q, tw, tw) ==
          doctest::Approx(model.metric(p, w, w)).epsilon(1e-10));
    // Transport of the geodesic velocity is the incoming velocity at q.
    VecC tv = model.transport(p, q, v);
    CHECK((tv + model.log(q, p)).norm() < 1e-9);
  }
}

TEST_CASE("point gauge handling") {
  auto model = KahlerModel::projective(1);
  VecC p = model.normalize_point(cvec({cxd(0.0, 0.3), cxd(0.4, 0.2)}));
  CHECK(std::abs(p.norm() - 1.0) < 1e-12);
  CHECK(p[0].imag() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(p[0].real() > 0.0);
  VecC q = std::exp(cxd(0.0, 0.77)) * p;
  CHECK(model.same_point(p, q));
  CHECK(model.same_point(p, model.normalize_point(q)));
}

TEST_CASE("flat plane projection drops the transverse component") {
  auto model = KahlerModel::flat(2);
  auto plane = LagrangianChart::linear_plane(model, MatC::Identity(2, 2));
  VecC p = cvec({cxd(1.0, 2.0), cxd(3.0, -1.0)});
  VecC q = plane.project(model, p);
  CHECK((q - cvec({1.0, 3.0})).norm() < 1e-14);
  CHECK(plane.contains(model, q));
}

TEST_CASE("real projective projection matches the dense sampling oracle") {
  auto model = KahlerModel::projective(1);
  auto chart =
      LagrangianChart::real_projective(model, MatC::Identity(2, 2));
  VecC p = model.normalize_point(cvec({1.0, cxd(0.0, 0.1)}));
  VecC q = chart.project(model, p);
  CHECK(model.same_point(q, cvec({1.0, 0.0}), 1e-9));

  // Dense sampling of [cos t : sin t].
  double best = 1e9;
  for (int i = 0; i <= 20000; ++i) {
    const double t = kPi * i / 20000.0;
    VecC r = cvec({std::cos(t), std::sin(t)});
    best = std::min(best, model.distance(p, r));
  }
  CHECK(model.distance(p, q) <= best + 1e-7);
  CHECK(chart.chart_distance(model, p) ==
        doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("projection is idempotent and distance-minimizing") {
  auto flat = KahlerModel::flat(3);
  auto fs = KahlerModel::projective(2);
  auto plane = LagrangianChart::linear_plane(flat, random_unitary(3));
  auto chart = LagrangianChart::real_projective(fs, random_unitary(3));
  for (int trial = 0; trial < 200; ++trial) {
    VecC pf = random_complex_vec(3, 0.7);
    VecC qf = plane.project(flat, pf);
    CHECK((plane.project(flat, qf) - qf).norm() < 1e-12);
    // Orthogonal projection in the flat model is nonexpansive.
    VecC pf2 = random_complex_vec(3, 0.7);
    CHECK(flat.distance(plane.project(flat, pf), plane.project(flat, pf2)) <=
          flat.distance(pf, pf2) + 1e-12);

    // Near-chart point on CP^2: perturb an on-chart point.
    VecC on = fs.normalize_point(chart.frame() *
                                 random_complex_vec(3, 1.0).real().cast<cxd>());
    VecC ps = fs.retract(on, random_tangent(fs, on, 0.05));
    VecC qs = chart.project(fs, ps);
    CHECK(chart.contains(fs, qs, 1e-6));
    // Idempotence on canonical representatives.
    CHECK((chart.project(fs, qs) - qs).norm() < 1e-12);
    // The projection beats random chart points.
    VecC other = fs.normalize_point(
        chart.frame() * random_complex_vec(3, 1.0).real().cast<cxd>());
    CHECK(fs.distance(ps, qs) <= fs.distance(ps, other) + 1e-10);
  }
}

TEST_CASE("projection far from the real chart reports the margin") {
  auto model = KahlerModel::projective(1);
  auto chart =
      LagrangianChart::real_projective(model, MatC::Identity(2, 2));
  VecC p = model.normalize_point(cvec({1.0, cxd(0.0, 1.0)}));
  CHECK_THROWS_AS((void)chart.project(model, p), numeric_error);
  std::string msg = thrown_message([&] { (void)chart.project(model, p); });
  CHECK(msg.find("margin") != std::string::npos);
}

TEST_CASE("tangent frames of the coordinate lines in C") {
  auto model = KahlerModel::flat(1);
  VecC origin = cvec({0.0});
  auto real_line = LagrangianChart::linear_plane(model, MatC::Identity(1, 1));
  MatC fr = real_line.tangent_frame(model, origin);
  CHECK((fr - MatC::Identity(1, 1)).norm() < 1e-14);

  MatC ifrm(1, 1);
  ifrm(0, 0) = cxd(0.0, 1.0);
  auto imag_line = LagrangianChart::linear_plane(model, ifrm);
  MatC fi = imag_line.tangent_frame(model, origin);
  CHECK(std::abs(fi(0, 0) - cxd(0.0, 1.0)) < 1e-14);
}

TEST_CASE("real projective tangent frame matches a finite-difference curve") {
  auto model = KahlerModel::projective(1);
  auto chart =
      LagrangianChart::real_projective(model, MatC::Identity(2, 2));
  VecC p = cvec({1.0, 0.0});
  MatC f = chart.tangent_frame(model, p);
  REQUIRE(f.cols() == 1);
  CHECK(model.metric(p, f.col(0), f.col(0)) == doctest::Approx(1.0).epsilon(1e-10));
  model.check_tangent(p, f.col(0));

  const double h = 1e-6;
  VecC cp = cvec({std::cos(h), std::sin(h)});
  VecC cm = cvec({std::cos(-h), std::sin(-h)});
  VecC fd = model.tangent_project(p, VecC((cp - cm) / (2.0 * h)));
  fd /= std::sqrt(model.metric(p, fd, fd));
  CHECK(std::abs(model.metric(p, f.col(0), fd)) ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("lagrangian frames satisfy the omega condition") {
  auto flat = KahlerModel::flat(3);
  auto fs = KahlerModel::projective(3);
  for (int trial = 0; trial < 25; ++trial) {
    auto plane = LagrangianChart::linear_plane(flat, random_unitary(3));
    VecC pf = plane.project(flat, random_complex_vec(3));
    MatC f = plane.tangent_frame(flat, pf);
    for (int i = 0; i < f.cols(); ++i)
      for (int j = 0; j < f.cols(); ++j) {
        CHECK(std::abs(flat.omega(pf, f.col(i), f.col(j))) < 1e-10);
        CHECK(flat.metric(pf, f.col(i), f.col(j)) ==
              doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
      }

    auto chart = LagrangianChart::real_projective(fs, random_unitary(4));
    VecC ps = fs.normalize_point(
        chart.frame() * random_complex_vec(4, 1.0).real().cast<cxd>());
    MatC g = chart.tangent_frame(fs, ps);
    REQUIRE(g.cols() == 3);
    for (int i = 0; i < g.cols(); ++i)
      for (int j = 0; j < g.cols(); ++j) {
        CHECK(std::abs(fs.omega(ps, g.col(i), g.col(j))) < 1e-10);
        CHECK(fs.metric(ps, g.col(i), g.col(j)) ==
              doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
      }
  }
}

TEST_CASE("coordinate lines in C intersect only at the origin") {
  auto model = KahlerModel::flat(1);
  auto a = LagrangianChart::linear_plane(model, MatC::Identity(1, 1));
  MatC ifrm(1, 1);
  ifrm(0, 0) = cxd(0.0, 1.0);
  auto b = LagrangianChart::linear_plane(model, ifrm);
  auto pts = transversal_intersections(model, a, b);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].point.norm() < 1e-12);
  CHECK(pts[0].transversal);
}

TEST_CASE("identical planes are reported non-transverse") {
  auto model = KahlerModel::flat(1);
  auto a = LagrangianChart::linear_plane(model, MatC::Identity(1, 1));
  CHECK_THROWS_AS((void)transversal_intersections(model, a, a), numeric_error);
  std::string msg = thrown_message(
      [&] { (void)transversal_intersections(model, a, a); });
  CHECK(msg.find("non-transverse") != std::string::npos);

  auto fs = KahlerModel::projective(1);
  auto c = LagrangianChart::real_projective(fs, MatC::Identity(2, 2));
  CHECK_THROWS_AS((void)transversal_intersections(fs, c, c), numeric_error);
}

TEST_CASE("rotated real circle meets the equator at the two poles") {
  auto model = KahlerModel::projective(1);
  auto a = LagrangianChart::real_projective(model, MatC::Identity(2, 2));
  MatC u = MatC::Identity(2, 2);
  u(1, 1) = cxd(0.0, 1.0);  // quarter-turn rotation about the 0-infinity axis
  auto b = LagrangianChart::real_projective(model, u);
  auto pts = transversal_intersections(model, a, b);
  REQUIRE(pts.size() == 2);
  bool has0 = false, has1 = false;
  for (const auto& ip : pts) {
    CHECK(ip.transversal);
    if (model.same_point(ip.point, cvec({1.0, 0.0}), 1e-8)) has0 = true;
    if (model.same_point(ip.point, cvec({0.0, 1.0}), 1e-8)) has1 = true;
  }
  CHECK(has0);
  CHECK(has1);
}
