#pragma once

#include <vector>

#include "fkcell/shapes.hpp"

namespace fkcell::fem {

enum class NodeClass : unsigned char {
    Free = 0,
    PinBottom = 1,  // v = 0: inside/on the lower inclusion or on x2 = 0
    PinTop = 2,     // v = psi_i: inside/on the upper inclusion or on x2 = 2 L2
};

// Logically tensor quadrilateral grid on the translated cell
// [-L1, L1] x [0, 2 L2] with the lower inclusion centered at (0, 0) and the
// upper one at (0, 2 L2). Columns are sinh-graded toward x1 = 0; each
// column's vertical levels are graded toward the gap and sheared so that the
// two gap faces lie exactly on mesh lines over the central part of the
// inclusion (the shear tapers off toward the inclusion sides, where nodes
// fall back to nearest-line rounding of the exact boundary). Cells are
// vertical-leg trapezoids, so the geometry never inverts. A cell is active
// exactly when it has a free node: fully pinned cells carry a constant field
// and zero strain, and every free degree of freedom is charged in every cell
// it touches.
struct GapMesh {
    geom::CellSpec cell;
    int n1 = 0;  // cells along x1
    int n2 = 0;  // cells along x2
    std::vector<double> x1;       // n1 + 1 column positions, symmetric about 0
    std::vector<double> x2_node;  // per-node vertical position, index j*(n1+1)+i
    std::vector<NodeClass> node_class;  // (n1+1)(n2+1)
    std::vector<char> cell_active;      // n1*n2, index j*n1+i
    std::vector<int> free_index;        // per node: free-node ordinal or -1
    int n_free = 0;
    double kappa0 = 0.0;
    double gap_exponent = 2.0;

    int node_id(int i, int j) const { return j * (n1 + 1) + i; }
    double x2(int i, int j) const { return x2_node[node_id(i, j)]; }
    Vec2 node_pos(int i, int j) const { return Vec2(x1[i], x2(i, j)); }
    int n_nodes() const { return (n1 + 1) * (n2 + 1); }
    int n_dofs_free() const { return 2 * n_free; }

    // Pinned value of node component for problem i (psi_1 = (1,0), psi_2 = (0,1)).
    Vec2 pinned_value(NodeClass c, int i) const {
        if (c == NodeClass::PinTop) return i == 1 ? Vec2(1.0, 0.0) : Vec2(0.0, 1.0);
        return Vec2::Zero();
    }
};

// Build the graded mesh. n1, n2 must be even; grading >= 1 sets the
// geometric max/min cell-size ratio away from the gap (1 = uniform). Throws
// ResolutionError when the gap cannot be resolved to the eps/8 rule with the
// given n2/grading.
GapMesh build_mesh(const geom::CellSpec& cell, int n1, int n2, double grading);

// Uniform 2x refinement with inherited constraints: new nodes sit on the
// parent bilinear geometry (edge midpoints and cell centers), a child cell is
// active iff its parent is, and a new node is pinned only where every coarse
// admissible field is already forced to the pinned value (both endpoints of
// its coarse edge, or all four corners of its coarse cell, pinned alike).
// Coarse fields interpolate into the fine space, so the solved energy is
// non-increasing under this refinement.
GapMesh refine(const GapMesh& coarse);

}  // namespace fkcell::fem
