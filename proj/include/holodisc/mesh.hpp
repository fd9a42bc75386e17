#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <vector>

#include "holodisc/types.hpp"

namespace holo {

struct MeshNode {
  Vec2 pos;
  // Boundary nodes carry their circle angle in [0, 2*pi); interior nodes NaN.
  double angle = std::numeric_limits<double>::quiet_NaN();
  // 1..n for boundary nodes (arc of the node, marked nodes take the
  // clockwise-adjacent arc), 0 for interior nodes.
  int arc_label = 0;
  // 0..n-1 for the marked node at angle 2*pi*k/n (k = 0 is the point 1),
  // -1 otherwise.
  int marked_k = -1;
};

// Triangulation of the closed unit disc with n marked boundary nodes at the
// n-th roots of unity and boundary arcs labeled 1..n counterclockwise
// starting at 1. Meshes are immutable after construction.
struct DiscMesh {
  int n_marks = 0;
  double target_h = 0.0;
  double grading = 1.0;
  std::vector<MeshNode> nodes;
  std::vector<std::array<int, 3>> triangles;  // positively oriented
  std::vector<int> boundary_cycle;            // CCW, starts at the node at 1
  std::vector<int> marked;                    // marked[k] = node index
  // parent_edge[i] = endpoints (in the parent mesh) of the edge whose split
  // created node i; {i, i} for nodes the mesh was built with or inherited.
  std::vector<std::array<int, 2>> parent_edge;

  // Corner-graded construction: boundary edge lengths near the marked nodes
  // scale like target_h * dist^(1 - 1/grading), with floor target_h^grading.
  static DiscMesh build(int n, double target_h, double grading_exponent);
  // Regular 4-way split of every triangle; new boundary nodes are placed on
  // the circle at the angular midpoint of their parent edge. Node indices of
  // the parent mesh are preserved.
  DiscMesh refine() const;

  bool is_boundary(int i) const { return nodes[i].arc_label > 0; }
  int edge_count() const;
  double max_edge() const;
  double triangle_area(int t) const;
  double total_area() const;
  // Throws domain_error if any structural invariant fails (orientation,
  // Euler formula, boundary labels, marked positions).
  void validate() const;

  void write_nodes_csv(std::ostream& os) const;
  void write_triangles_csv(std::ostream& os) const;
};

// Degree-2 interior rule (edge midpoints, weights area/3) and 2-point Gauss
// rule per boundary edge.
struct TriQuadPoint {
  int tri;
  Vec2 pos;
  double weight;
  std::array<double, 3> bary;
};

struct EdgeQuadPoint {
  int node_a, node_b;  // boundary edge, CCW order
  Vec2 pos;
  double weight;   // includes the edge length factor
  double coeff_a;  // PL interpolation weight of node_a (coeff_b = 1 - it)
  int arc_label;
};

std::vector<TriQuadPoint> interior_rule(const DiscMesh& mesh);
std::vector<EdgeQuadPoint> boundary_rule(const DiscMesh& mesh);

}  // namespace holo
