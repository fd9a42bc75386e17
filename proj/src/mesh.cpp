#include "holodisc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace holo {

namespace {

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  return a < 0.0 ? a + 2.0 * kPi : a;
}

double corner_distance(int n, const Vec2& x) {
  double best = std::numeric_limits<double>::max();
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * kPi * k / n;
    best = std::min(best, (x - Vec2(std::cos(a), std::sin(a))).norm());
  }
  return best;
}

// Target element size at x: h away from the marked corners, shrinking like
// h * d^(1-1/gamma) toward them, with floor h^gamma.
double local_size(int n, double h, double gamma, const Vec2& x) {
  if (gamma <= 1.0 + 1e-12) return h;
  const double d = corner_distance(n, x);
  const double graded = h * std::pow(d, 1.0 - 1.0 / gamma);
  return std::min(h, std::max(std::pow(h, gamma), graded));
}

// Ascending ring radii in (0, 1], spaced by the local size at the ring's
// closest approach to the corners (distance 1 - r).
std::vector<double> ring_radii(int n, double h, double gamma) {
  std::vector<double> rs{1.0};
  double r = 1.0;
  while (true) {
    // The ring's closest approach to a corner is the point (r, 0), at
    // distance 1 - r from the corner at angle 0.
    const double step = local_size(n, h, gamma, Vec2(r, 0.0));
    r -= step;
    if (r < 0.6 * step) break;
    rs.push_back(r);
  }
  std::reverse(rs.begin(), rs.end());
  return rs;
}

// Node angles for the ring at radius r: each of the n sectors is walked from
// both corners toward its middle so the spacing grades symmetrically, then
// rescaled to close exactly. Sector starts land exactly on 2*pi*k/n.
std::vector<double> ring_angles(int n, double h, double gamma, double r) {
  std::vector<double> out;
  const double sector = 2.0 * kPi / n;
  for (int k = 0; k < n; ++k) {
    const double a0 = sector * k;
    const double half = 0.5 * sector;
    std::vector<double> steps;
    double local = 0.0;  // offset from a0
    while (local < half - 1e-12) {
      const double th = a0 + local;
      const double size =
          local_size(n, h, gamma, Vec2(r * std::cos(th), r * std::sin(th)));
      double dth = std::min(size / std::max(r, 1e-9), half - 0.0);
      dth = std::max(dth, 1e-6);
      steps.push_back(dth);
      local += dth;
    }
    if (steps.empty()) steps.push_back(half);
    const double total = std::accumulate(steps.begin(), steps.end(), 0.0);
    const double scale = half / total;
    std::vector<double> prefix{0.0};
    for (size_t i = 0; i + 1 < steps.size(); ++i)
      prefix.push_back(prefix.back() + steps[i] * scale);
    // First half ascending, then the mirror image about the sector middle.
    for (double p : prefix) out.push_back(a0 + p);
    out.push_back(a0 + half);
    for (size_t i = prefix.size(); i-- > 1;)
      out.push_back(a0 + sector - prefix[i]);
  }
  return out;
}

// Triangulate the annulus between two rings given as CCW node/angle lists
// that both start at angle 0. Advances whichever ring's next node comes
// first by angle; emits ni + no positively oriented triangles.
void stitch_rings(const std::vector<int>& in_ids,
                  const std::vector<double>& in_ang,
                  const std::vector<int>& out_ids,
                  const std::vector<double>& out_ang,
                  std::vector<std::array<int, 3>>& tris) {
  const size_t ni = in_ids.size(), no = out_ids.size();
  const double inf = std::numeric_limits<double>::infinity();
  size_t ai = 0, bj = 0;
  while (ai < ni || bj < no) {
    const double na =
        (ai < ni) ? (ai + 1 < ni ? in_ang[ai + 1] : in_ang[0] + 2.0 * kPi)
                  : inf;
    const double nb =
        (bj < no) ? (bj + 1 < no ? out_ang[bj + 1] : out_ang[0] + 2.0 * kPi)
                  : inf;
    const int icur = in_ids[ai % ni];
    const int ocur = out_ids[bj % no];
    if (nb <= na) {
      tris.push_back({ocur, out_ids[(bj + 1) % no], icur});
      ++bj;
    } else {
      tris.push_back({in_ids[(ai + 1) % ni], icur, ocur});
      ++ai;
    }
  }
}

int sector_of(int n, double angle) {
  int k = int(std::floor(wrap_angle(angle) / (2.0 * kPi / n)));
  return std::min(std::max(k, 0), n - 1);
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                (b.y() - a.y()) * (c.x() - a.x()));
}

}  // namespace

DiscMesh DiscMesh::build(int n, double target_h, double grading_exponent) {
  if (n < 2) throw domain_error("marked-point count must be at least 2");
  if (!(target_h > 0.0 && target_h < 1.0))
    throw domain_error("target_h must lie in (0, 1)");
  if (!(grading_exponent >= 1.0))
    throw domain_error("grading_exponent must be >= 1");
  if (target_h >= 2.0 * std::sin(kPi / n))
    throw domain_error(
        "target_h is too large to represent the marked boundary arcs");

  DiscMesh mesh;
  mesh.n_marks = n;
  mesh.target_h = target_h;
  mesh.grading = grading_exponent;

  const std::vector<double> radii = ring_radii(n, target_h, grading_exponent);
  MeshNode center;
  center.pos = Vec2(0.0, 0.0);
  mesh.nodes.push_back(center);

  std::vector<int> prev_ids{0};
  std::vector<double> prev_ang{0.0};

  for (size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    const bool is_boundary_ring = (ri + 1 == radii.size());
    std::vector<double> angs = ring_angles(n, target_h, grading_exponent, r);
    std::vector<int> ids;
    ids.reserve(angs.size());
    const size_t per_sector = angs.size() / n;
    for (size_t j = 0; j < angs.size(); ++j) {
      MeshNode node;
      const double a = angs[j];
      node.pos = Vec2(r * std::cos(a), r * std::sin(a));
      if (is_boundary_ring) {
        node.angle = a;
        const bool is_marked = (j % per_sector == 0);
        const int k = int(j / per_sector);
        if (is_marked) {
          node.marked_k = k;
          node.arc_label = (k == 0) ? n : k;
        } else {
          node.arc_label = k + 1;
        }
      }
      ids.push_back(int(mesh.nodes.size()));
      mesh.nodes.push_back(node);
    }
    if (ri == 0) {
      // Fan from the center.
      for (size_t j = 0; j < ids.size(); ++j)
        mesh.triangles.push_back(
            {0, ids[j], ids[(j + 1) % ids.size()]});
    } else {
      stitch_rings(prev_ids, prev_ang, ids, angs, mesh.triangles);
    }
    prev_ids = std::move(ids);
    prev_ang = std::move(angs);
    if (is_boundary_ring) {
      mesh.boundary_cycle = prev_ids;
      mesh.marked.assign(n, -1);
      for (size_t j = 0; j < prev_ids.size(); ++j) {
        const int mk = mesh.nodes[prev_ids[j]].marked_k;
        if (mk >= 0) mesh.marked[mk] = prev_ids[j];
      }
    }
  }
  mesh.parent_edge.resize(mesh.nodes.size());
  for (int i = 0; i < int(mesh.nodes.size()); ++i)
    mesh.parent_edge[i] = {i, i};
  mesh.validate();
  return mesh;
}

DiscMesh DiscMesh::refine() const {
  DiscMesh out;
  out.n_marks = n_marks;
  out.target_h = target_h;
  out.grading = grading;
  out.nodes = nodes;
  out.marked = marked;
  out.parent_edge.resize(nodes.size());
  for (int i = 0; i < int(nodes.size()); ++i) out.parent_edge[i] = {i, i};

  // CCW-oriented boundary edges, keyed by normalized endpoints.
  std::map<std::pair<int, int>, std::pair<int, int>> boundary_edges;
  for (size_t i = 0; i < boundary_cycle.size(); ++i) {
    const int a = boundary_cycle[i];
    const int b = boundary_cycle[(i + 1) % boundary_cycle.size()];
    boundary_edges[std::minmax(a, b)] = {a, b};
  }

  std::map<std::pair<int, int>, int> midpoint;
  auto mid_of = [&](int a, int b) -> int {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    MeshNode node;
    auto be = boundary_edges.find(key);
    if (be != boundary_edges.end()) {
      const double ta = nodes[be->second.first].angle;
      double delta = nodes[be->second.second].angle - ta;
      if (delta <= 0.0) delta += 2.0 * kPi;
      const double am = wrap_angle(ta + 0.5 * delta);
      node.pos = Vec2(std::cos(am), std::sin(am));
      node.angle = am;
      node.arc_label = sector_of(n_marks, am) + 1;
    } else {
      node.pos = 0.5 * (nodes[a].pos + nodes[b].pos);
    }
    const int id = int(out.nodes.size());
    out.nodes.push_back(node);
    out.parent_edge.push_back({a, b});
    midpoint.emplace(key, id);
    return id;
  };

  for (const auto& tri : triangles) {
    const int a = tri[0], b = tri[1], c = tri[2];
    const int ab = mid_of(a, b), bc = mid_of(b, c), ca = mid_of(c, a);
    out.triangles.push_back({a, ab, ca});
    out.triangles.push_back({ab, b, bc});
    out.triangles.push_back({ca, bc, c});
    out.triangles.push_back({ab, bc, ca});
  }

  std::vector<std::pair<double, int>> order;
  for (size_t i = 0; i < out.nodes.size(); ++i)
    if (out.nodes[i].arc_label > 0) order.push_back({out.nodes[i].angle, int(i)});
  std::sort(order.begin(), order.end());
  out.boundary_cycle.clear();
  for (const auto& [a, id] : order) out.boundary_cycle.push_back(id);
  out.validate();
  return out;
}

int DiscMesh::edge_count() const {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : triangles) {
    edges.insert(std::minmax(t[0], t[1]));
    edges.insert(std::minmax(t[1], t[2]));
    edges.insert(std::minmax(t[2], t[0]));
  }
  return int(edges.size());
}

double DiscMesh::max_edge() const {
  double h = 0.0;
  for (const auto& t : triangles)
    for (int e = 0; e < 3; ++e)
      h = std::max(h, (nodes[t[e]].pos - nodes[t[(e + 1) % 3]].pos).norm());
  return h;
}

double DiscMesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  return signed_area(nodes[tr[0]].pos, nodes[tr[1]].pos, nodes[tr[2]].pos);
}

double DiscMesh::total_area() const {
  double a = 0.0;
  for (size_t t = 0; t < triangles.size(); ++t) a += triangle_area(int(t));
  return a;
}

void DiscMesh::validate() const {
  for (size_t t = 0; t < triangles.size(); ++t)
    if (triangle_area(int(t)) <= 0.0)
      throw domain_error("mesh has a non-positively-oriented triangle");

  const int v = int(nodes.size());
  const int f = int(triangles.size());
  const int e = edge_count();
  if (v - e + f != 1)
    throw domain_error("mesh violates the Euler formula for a disc");

  if (int(marked.size()) != n_marks)
    throw domain_error("mesh is missing marked nodes");
  for (int k = 0; k < n_marks; ++k) {
    const int id = marked[k];
    if (id < 0 || id >= v) throw domain_error("marked node index out of range");
    const double a = 2.0 * kPi * k / n_marks;
    if (nodes[id].pos.x() != std::cos(a) || nodes[id].pos.y() != std::sin(a))
      throw domain_error("marked node is not exactly at its root of unity");
    const int expect = (k == 0) ? n_marks : k;
    if (nodes[id].arc_label != expect)
      throw domain_error("marked node carries the wrong arc label");
  }

  double prev = -1.0;
  for (int id : boundary_cycle) {
    const auto& node = nodes[id];
    if (node.arc_label < 1 || node.arc_label > n_marks)
      throw domain_error("boundary node carries an invalid arc label");
    if (!(node.angle > prev) && prev >= 0.0)
      throw domain_error("boundary cycle is not in counterclockwise order");
    if (node.marked_k < 0) {
      const int expect = sector_of(n_marks, node.angle) + 1;
      if (node.arc_label != expect)
        throw domain_error("boundary node label does not match its arc");
    }
    prev = node.angle;
  }
}

void DiscMesh::write_nodes_csv(std::ostream& os) const {
  os << "id,s,t,arc_label,marked_k\n";
  os << std::setprecision(17);
  for (size_t i = 0; i < nodes.size(); ++i)
    os << i << ',' << nodes[i].pos.x() << ',' << nodes[i].pos.y() << ','
       << nodes[i].arc_label << ',' << nodes[i].marked_k << '\n';
}

void DiscMesh::write_triangles_csv(std::ostream& os) const {
  os << "a,b,c\n";
  for (const auto& t : triangles)
    os << t[0] << ',' << t[1] << ',' << t[2] << '\n';
}

std::vector<TriQuadPoint> interior_rule(const DiscMesh& mesh) {
  std::vector<TriQuadPoint> out;
  out.reserve(mesh.triangles.size() * 3);
  static const std::array<std::array<double, 3>, 3> kMid = {
      {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}};
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    const double w = mesh.triangle_area(int(t)) / 3.0;
    for (const auto& bary : kMid) {
      TriQuadPoint q;
      q.tri = int(t);
      q.bary = bary;
      q.weight = w;
      q.pos = bary[0] * mesh.nodes[tr[0]].pos + bary[1] * mesh.nodes[tr[1]].pos +
              bary[2] * mesh.nodes[tr[2]].pos;
      out.push_back(q);
    }
  }
  return out;
}

std::vector<EdgeQuadPoint> boundary_rule(const DiscMesh& mesh) {
  std::vector<EdgeQuadPoint> out;
  const auto& cyc = mesh.boundary_cycle;
  const double offset = 0.5 / std::sqrt(3.0);
  for (size_t i = 0; i < cyc.size(); ++i) {
    const int a = cyc[i];
    const int b = cyc[(i + 1) % cyc.size()];
    const Vec2 pa = mesh.nodes[a].pos, pb = mesh.nodes[b].pos;
    const double len = (pb - pa).norm();
    const double ta = mesh.nodes[a].angle;
    double delta = mesh.nodes[b].angle - ta;
    if (delta <= 0.0) delta += 2.0 * kPi;
    const int label = sector_of(mesh.n_marks, ta + 0.5 * delta) + 1;
    for (double s : {0.5 - offset, 0.5 + offset}) {
      EdgeQuadPoint q;
      q.node_a = a;
      q.node_b = b;
      q.pos = pa + s * (pb - pa);
      q.weight = 0.5 * len;
      q.coeff_a = 1.0 - s;
      q.arc_label = label;
      out.push_back(q);
    }
  }
  return out;
}

}  // namespace holo
