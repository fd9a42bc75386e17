#include "holodisc/mesh.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"

using namespace holo;
using namespace holo::testing;

TEST_CASE("coarse two-corner mesh satisfies the Euler formula") {
  auto mesh = DiscMesh::build(2, 0.5, 1.0);
  CHECK(mesh.marked.size() == 2);
  CHECK(mesh.nodes[mesh.marked[0]].pos.x() == 1.0);
  CHECK(mesh.nodes[mesh.marked[0]].pos.y() == std::sin(0.0));
  CHECK(mesh.nodes[mesh.marked[1]].pos.x() == std::cos(kPi));
  const int v = int(mesh.nodes.size());
  const int f = int(mesh.triangles.size());
  CHECK(v - mesh.edge_count() + f == 1);
}

TEST_CASE("three arcs are contiguous counterclockwise runs starting at 1") {
  auto mesh = DiscMesh::build(3, 0.2, 2.0);
  // Walk the boundary cycle from the node at angle 0; labels must step
  // through 3 (the node at 1), then 1...1, 1 (marked), 2...2, 2 (marked),
  // 3...3 and wrap.
  REQUIRE(!mesh.boundary_cycle.empty());
  CHECK(mesh.boundary_cycle[0] == mesh.marked[0]);
  int transitions = 0;
  std::vector<int> seen_order;
  for (size_t i = 0; i < mesh.boundary_cycle.size(); ++i) {
    const auto& node = mesh.nodes[mesh.boundary_cycle[i]];
    if (seen_order.empty() || seen_order.back() != node.arc_label)
      seen_order.push_back(node.arc_label);
  }
  // Expected label run sequence: 3 (y at angle 0), 1, 2, 3 by the half-open
  // convention (each marked node takes the clockwise-adjacent arc).
  REQUIRE(seen_order.size() == 4);
  CHECK(seen_order[0] == 3);
  CHECK(seen_order[1] == 1);
  CHECK(seen_order[2] == 2);
  CHECK(seen_order[3] == 3);
  (void)transitions;

  // Each marked node separates arc k from arc k+1.
  for (int k = 1; k < 3; ++k) {
    const int id = mesh.marked[k];
    auto it = std::find(mesh.boundary_cycle.begin(), mesh.boundary_cycle.end(), id);
    REQUIRE(it != mesh.boundary_cycle.end());
    const size_t at = size_t(it - mesh.boundary_cycle.begin());
    const auto& prev = mesh.nodes[mesh.boundary_cycle[(at + mesh.boundary_cycle.size() - 1) % mesh.boundary_cycle.size()]];
    const auto& next = mesh.nodes[mesh.boundary_cycle[(at + 1) % mesh.boundary_cycle.size()]];
    CHECK(prev.arc_label == k);
    CHECK(next.arc_label == k + 1);
  }
}

TEST_CASE("quadrature integrates the unit disc area") {
  for (int n : {2, 3, 5}) {
    auto mesh = DiscMesh::build(n, 0.1, 2.0);
    double area = 0.0;
    for (const auto& q : interior_rule(mesh)) area += q.weight;
    CHECK(std::abs(area - kPi) < 1e-2);
    // The rule reproduces the polygonal mesh area to roundoff.
    CHECK(area == doctest::Approx(mesh.total_area()).epsilon(1e-13));
  }
}

TEST_CASE("refinement quarters triangles and preserves invariants") {
  auto mesh = DiscMesh::build(2, 0.5, 1.0);
  auto fine = mesh.refine();
  CHECK(fine.triangles.size() == 4 * mesh.triangles.size());
  fine.validate();
  fine.refine().validate();
}

TEST_CASE("quadrature area error shrinks about four-fold per refinement") {
  auto mesh = DiscMesh::build(2, 0.35, 1.0);
  double prev_err = -1.0;
  for (int level = 0; level < 3; ++level) {
    const double err = std::abs(mesh.total_area() - kPi);
    if (prev_err > 0.0) {
      const double ratio = prev_err / err;
      CHECK(ratio > 3.0);
      CHECK(ratio < 5.0);
    }
    prev_err = err;
    mesh = mesh.refine();
  }
}

TEST_CASE("arc labels are stable under refinement") {
  auto mesh = DiscMesh::build(3, 0.3, 2.0);
  auto fine = mesh.refine();
  // Old boundary nodes keep their labels.
  for (int id : mesh.boundary_cycle)
    CHECK(fine.nodes[id].arc_label == mesh.nodes[id].arc_label);
  // New boundary nodes carry the label of their parent edge.
  std::set<int> old_ids(mesh.boundary_cycle.begin(), mesh.boundary_cycle.end());
  for (size_t i = 0; i < fine.boundary_cycle.size(); ++i) {
    const int id = fine.boundary_cycle[i];
    if (old_ids.count(id)) continue;
    const int before =
        fine.boundary_cycle[(i + fine.boundary_cycle.size() - 1) %
                            fine.boundary_cycle.size()];
    const int after = fine.boundary_cycle[(i + 1) % fine.boundary_cycle.size()];
    // The neighbors are the parent edge's endpoints; a non-marked midpoint
    // must match any non-marked neighbor's label.
    if (fine.nodes[before].marked_k < 0)
      CHECK(fine.nodes[id].arc_label == fine.nodes[before].arc_label);
    if (fine.nodes[after].marked_k < 0)
      CHECK(fine.nodes[id].arc_label == fine.nodes[after].arc_label);
  }
}

TEST_CASE("marked nodes never move under refinement") {
  auto mesh = DiscMesh::build(4, 0.25, 2.0);
  auto fine = mesh.refine().refine();
  for (int k = 0; k < 4; ++k) {
    const int a = mesh.marked[k], b = fine.marked[k];
    CHECK(a == b);
    CHECK(mesh.nodes[a].pos.x() == fine.nodes[b].pos.x());
    CHECK(mesh.nodes[a].pos.y() == fine.nodes[b].pos.y());
  }
}

TEST_CASE("interior rule is exact for quadratics") {
  auto mesh = DiscMesh::build(2, 0.4, 1.5);
  // Reference-triangle moments of 1, xi, eta, xi^2, xi*eta, eta^2.
  const double mom[6] = {0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 12.0, 1.0 / 24.0,
                         1.0 / 12.0};
  auto exact_integral = [&](int t, const double c[6]) {
    const auto& tr = mesh.triangles[t];
    const Vec2 p0 = mesh.nodes[tr[0]].pos;
    const Vec2 e1 = mesh.nodes[tr[1]].pos - p0;
    const Vec2 e2 = mesh.nodes[tr[2]].pos - p0;
    // s = s0 + a1 xi + a2 eta, t = t0 + b1 xi + b2 eta.
    const double s0 = p0.x(), a1 = e1.x(), a2 = e2.x();
    const double t0 = p0.y(), b1 = e1.y(), b2 = e2.y();
    // Expand c0 + c1 s + c2 t + c3 s^2 + c4 s t + c5 t^2 in xi, eta.
    double k[6] = {0, 0, 0, 0, 0, 0};  // 1, xi, eta, xi^2, xi eta, eta^2
    k[0] += c[0];
    k[0] += c[1] * s0 + c[2] * t0;
    k[1] += c[1] * a1 + c[2] * b1;
    k[2] += c[1] * a2 + c[2] * b2;
    k[0] += c[3] * s0 * s0 + c[4] * s0 * t0 + c[5] * t0 * t0;
    k[1] += 2 * c[3] * s0 * a1 + c[4] * (s0 * b1 + t0 * a1) + 2 * c[5] * t0 * b1;
    k[2] += 2 * c[3] * s0 * a2 + c[4] * (s0 * b2 + t0 * a2) + 2 * c[5] * t0 * b2;
    k[3] += c[3] * a1 * a1 + c[4] * a1 * b1 + c[5] * b1 * b1;
    k[4] += 2 * c[3] * a1 * a2 + c[4] * (a1 * b2 + a2 * b1) + 2 * c[5] * b1 * b2;
    k[5] += c[3] * a2 * a2 + c[4] * a2 * b2 + c[5] * b2 * b2;
    const double jac = 2.0 * mesh.triangle_area(t);
    double sum = 0.0;
    for (int i = 0; i < 6; ++i) sum += k[i] * mom[i];
    return jac * sum;
  };

  auto rule = interior_rule(mesh);
  for (int trial = 0; trial < 20; ++trial) {
    double c[6];
    for (double& x : c) x = uniform(-1.0, 1.0);
    auto eval = [&](const Vec2& p) {
      return c[0] + c[1] * p.x() + c[2] * p.y() + c[3] * p.x() * p.x() +
             c[4] * p.x() * p.y() + c[5] * p.y() * p.y();
    };
    std::vector<double> quad(mesh.triangles.size(), 0.0);
    for (const auto& q : rule) quad[q.tri] += q.weight * eval(q.pos);
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
      const double ex = exact_integral(int(t), c);
      CHECK(std::abs(quad[t] - ex) <=
            1e-13 * std::max(1.0, std::abs(ex)));
    }
  }
}

TEST_CASE("boundary edges grade toward the marked corners") {
  const double h = 0.12, gamma = 2.0;
  auto mesh = DiscMesh::build(2, h, gamma);
  // Boundary edge length vs distance of its midpoint to the nearest corner:
  // expect length <= C * h * dist^(1-1/gamma) with a modest constant.
  const auto& cyc = mesh.boundary_cycle;
  for (size_t i = 0; i < cyc.size(); ++i) {
    const Vec2 a = mesh.nodes[cyc[i]].pos;
    const Vec2 b = mesh.nodes[cyc[(i + 1) % cyc.size()]].pos;
    const Vec2 mid = 0.5 * (a + b);
    const double d1 = (mid - Vec2(1, 0)).norm();
    const double d2 = (mid - Vec2(-1, 0)).norm();
    const double dist = std::max(std::min(d1, d2), std::pow(h, gamma));
    const double len = (b - a).norm();
    CHECK(len <= 3.0 * h * std::pow(dist, 1.0 - 1.0 / gamma));
  }
  // The first edge off a corner is much shorter than h.
  const Vec2 p0 = mesh.nodes[cyc[0]].pos;
  const Vec2 p1 = mesh.nodes[cyc[1]].pos;
  CHECK((p1 - p0).norm() < 0.5 * h);
}

TEST_CASE("infeasible parameters are rejected") {
  CHECK_THROWS_AS((void)DiscMesh::build(1, 0.2, 2.0), domain_error);
  CHECK_THROWS_AS((void)DiscMesh::build(2, 0.0, 2.0), domain_error);
  CHECK_THROWS_AS((void)DiscMesh::build(2, 0.3, 0.5), domain_error);
  CHECK_THROWS_AS((void)DiscMesh::build(64, 0.5, 2.0), domain_error);
}

TEST_CASE("mesh CSV export has the documented schemas") {
  auto mesh = DiscMesh::build(2, 0.5, 1.0);
  std::ostringstream nodes, tris;
  mesh.write_nodes_csv(nodes);
  mesh.write_triangles_csv(tris);
  CHECK(nodes.str().rfind("id,s,t,arc_label,marked_k\n", 0) == 0);
  CHECK(tris.str().rfind("a,b,c\n", 0) == 0);
  // One line per node / triangle plus header.
  auto count_lines = [](const std::string& s) {
    return std::count(s.begin(), s.end(), '\n');
  };
  CHECK(count_lines(nodes.str()) == std::ptrdiff_t(mesh.nodes.size()) + 1);
  CHECK(count_lines(tris.str()) == std::ptrdiff_t(mesh.triangles.size()) + 1);
}
