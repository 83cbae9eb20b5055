#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "fkcell/auxfield.hpp"
#include "fkcell/mesh.hpp"

namespace fkcell::fem {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Nodal displacement field on a GapMesh: 2 components per node, interleaved
// (dof 2*node + comp). Pinned entries carry their exact boundary values.
struct DisplacementField {
    Eigen::VectorXd v;
    int iterations = 0;
    double residual = 0.0;
};

// Assembled bilinear form of the cell problem, partitioned into free and
// pinned blocks. A_ff is symmetric positive definite over the free dofs;
// the pinned rows are kept for the boundary-work functional.
struct StiffnessSystem {
    SpMat A_ff;  // free x free
    SpMat A_fp;  // free x pinned
    SpMat A_pf;  // pinned x free
    SpMat A_pp;  // pinned x pinned
    std::vector<int> free_index;     // node -> free ordinal or -1
    std::vector<int> pinned_index;   // node -> pinned ordinal or -1
    std::vector<NodeClass> cls;      // node -> class
    int n_free = 0;
    int n_pinned = 0;

    // Pinned-dof value vector for problem i.
    Eigen::VectorXd pinned_values(int i) const;
};

// Assemble with bilinear elements and 2x2 Gauss quadrature over active cells.
StiffnessSystem assemble(const GapMesh& mesh, const LameParams& lame);

// Jacobi-preconditioned conjugate gradient solve of the pinned-lifted system
// for problem i (1 = shear, 2 = extension). Deterministic; throws
// NonConvergenceError past 20 sqrt(dofs) iterations.
DisplacementField solve_cell(const GapMesh& mesh, const StiffnessSystem& system, int i,
                             double tol);

// Energy integral of (C e(v), e(v)) over the active cells by the same 2x2
// Gauss rule (independent of the assembled matrix).
double energy(const GapMesh& mesh, const LameParams& lame,
              const DisplacementField& field);

// Discrete boundary-work functional: pinned rows of the assembled form
// applied to the solution, dotted with the pinned values. Equals the energy
// up to the linear-solver residual.
double boundary_work(const StiffnessSystem& system, const DisplacementField& field,
                     int i);

// mu* = (L2/L1) E1 and E* = E/(lambda+2mu) (L2/L1) E2.
std::pair<double, double> effective_moduli(double e1, double e2,
                                           const geom::CellSpec& cell,
                                           const LameParams& lame);

struct GapGradStats {
    double sup_grad_v = 0.0;
    double sup_grad_w = 0.0;
    int samples = 0;
};

// Recovered gradients at centers of fully-free cells in the gap interior
// (|x1| < half_width/4, inside the simplified chart), for the solved field v
// and for w = v - u_i with the analytic auxiliary gradient.
GapGradStats gap_gradient_stats(const GapMesh& mesh, const DisplacementField& field,
                                int i, const LameParams& lame,
                                const geom::GapProfile& simplified_gap);

// Nodal interpolant of the extended auxiliary field u_i: pinned nodes carry
// their exact boundary values, free nodes sample the extension. Lies in the
// discrete admissible set, so its energy bounds the solved energy from above.
DisplacementField interpolate_aux(const GapMesh& mesh, int i, const LameParams& lame,
                                  const geom::GapProfile& simplified_gap);

}  // namespace fkcell::fem
