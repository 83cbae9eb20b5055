#include "fkcell/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fkcell/errors.hpp"

namespace fkcell::fem {

namespace {

// Inverse of cosh on [1, inf).
double acosh_safe(double g) { return std::log(g + std::sqrt(g * g - 1.0)); }

// One-sided sinh-graded increments on [0, H]: n cells whose sizes grow
// geometrically away from 0 with max/min ratio ~ grading. grading = 1 gives
// the uniform split.
std::vector<double> sinh_levels(double H, int n, double grading) {
    std::vector<double> y(n + 1);
    y[0] = 0.0;
    y[n] = H;
    if (grading <= 1.0 + 1e-12) {
        for (int k = 1; k < n; ++k) y[k] = H * double(k) / n;
        return y;
    }
    const double sigma = acosh_safe(grading);
    const double denom = std::sinh(sigma);
    for (int k = 1; k < n; ++k) y[k] = H * std::sinh(sigma * double(k) / n) / denom;
    return y;
}

// Smoothstep from 1 at r0 down to 0 at r1.
double taper(double r, double r0, double r1) {
    if (r <= r0) return 1.0;
    if (r >= r1) return 0.0;
    const double t = (r - r0) / (r1 - r0);
    return 1.0 - t * t * (3.0 - 2.0 * t);
}

// Activity and dof numbering from the node classes. A cell is active exactly
// when it has a free node, so every free degree of freedom is charged in
// every cell it touches and fully pinned cells (constant field, zero strain)
// are skipped. Cells holding both bottom- and top-pinned nodes would pinch
// the gap shut and are rejected.
void finalize_classification(GapMesh& mesh) {
    const int n1 = mesh.n1;
    const int n2 = mesh.n2;
    mesh.cell_active.assign(n1 * n2, 0);
    for (int j = 0; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            const NodeClass c[4] = {mesh.node_class[mesh.node_id(i, j)],
                                    mesh.node_class[mesh.node_id(i + 1, j)],
                                    mesh.node_class[mesh.node_id(i + 1, j + 1)],
                                    mesh.node_class[mesh.node_id(i, j + 1)]};
            bool any_free = false, any_bottom = false, any_top = false;
            for (NodeClass k : c) {
                any_free |= k == NodeClass::Free;
                any_bottom |= k == NodeClass::PinBottom;
                any_top |= k == NodeClass::PinTop;
            }
            if (!any_free && any_bottom && any_top)
                throw ResolutionError(
                    "mesh: a cell spans both inclusions (gap pinched at cell scale); "
                    "increase resolution");
            mesh.cell_active[j * n1 + i] = any_free ? 1 : 0;
        }
    }

    mesh.free_index.assign(mesh.n_nodes(), -1);
    int nf = 0;
    for (int n = 0; n < mesh.n_nodes(); ++n)
        if (mesh.node_class[n] == NodeClass::Free) mesh.free_index[n] = nf++;
    mesh.n_free = nf;
    if (nf == 0) throw ResolutionError("mesh: no free nodes");
}

}  // namespace

GapMesh build_mesh(const geom::CellSpec& cell, int n1, int n2, double grading) {
    cell.validate();
    if (n1 < 8 || n2 < 16 || n1 % 2 != 0 || n2 % 2 != 0)
        throw std::domain_error("build_mesh: n1, n2 must be even (n1 >= 8, n2 >= 16)");
    if (!(grading >= 1.0)) throw std::domain_error("build_mesh: grading must be >= 1");

    GapMesh mesh;
    mesh.cell = cell;
    mesh.n1 = n1;
    mesh.n2 = n2;
    mesh.kappa0 = geom::curvature_at_gap(cell.shape);
    mesh.gap_exponent = geom::gap_exponent(cell.shape);

    const double L1 = cell.L1;
    const double L2 = cell.L2;
    const double eps = cell.eps;
    const double hw = geom::half_width(cell.shape);
    const double apex = geom::apex_height(cell.shape);

    // Reference levels for the upper half [L2, 2 L2]: a uniform zone across
    // the half-gap [L2, L2 + eps/2], then a sinh-graded zone to the cell edge.
    const int half2 = n2 / 2;
    const int n_gap = std::max(5, n2 / 16);
    const int n_outer = half2 - n_gap;
    if (n_outer < 8)
        throw ResolutionError(
            "build_mesh: n2 too small to satisfy the min-gap-cell rule (need more "
            "x2 cells outside the gap zone)");

    const double outer_H = L2 - 0.5 * eps;
    const std::vector<double> outer = sinh_levels(outer_H, n_outer, grading);
    const double first_outer_cell = outer[1] - outer[0];
    if (first_outer_cell > 2.0 * eps)
        throw ResolutionError(
            "build_mesh: min-gap-cell rule violated: first cell above the gap zone has "
            "height " +
            std::to_string(first_outer_cell) + " > 2 eps = " + std::to_string(2.0 * eps) +
            "; increase solver.n2 or solver.grading");
    const double min_cell_h = 0.5 * eps / n_gap;
    if (min_cell_h > eps / 8.0)
        throw ResolutionError("build_mesh: min-gap-cell rule violated in the gap zone");

    // ref[k], k = 0..half2: distance of level k above the midline.
    std::vector<double> ref(half2 + 1);
    for (int k = 0; k <= n_gap; ++k) ref[k] = 0.5 * eps * double(k) / n_gap;
    for (int k = 1; k <= n_outer; ++k) ref[n_gap + k] = 0.5 * eps + outer[k];

    // Columns: two-sided sinh clustering toward 0. The gap's intrinsic width
    // scales like (eps/kappa0)^{1/m} vs eps in x2, so the x1 grading strength
    // is reduced by the gap exponent.
    const double sigma1 = acosh_safe(std::max(grading, 1.0)) / mesh.gap_exponent;
    const double grading1 = std::cosh(sigma1);
    const std::vector<double> half1 = sinh_levels(L1, n1 / 2, grading1);
    mesh.x1.assign(n1 + 1, 0.0);
    for (int k = 0; k <= n1 / 2; ++k) {
        mesh.x1[n1 / 2 + k] = half1[k];
        mesh.x1[n1 / 2 - k] = -half1[k];
    }

    // Per-column vertical levels: shear the reference levels so the gap face
    // lands exactly on level n_gap over the central part of the inclusion.
    // The shear tapers off toward the sides, where the boundary turns steep
    // and nearest-line rounding is accurate enough (the opening is wide
    // there). Every level map is strictly monotone, so cells never invert.
    mesh.x2_node.assign(mesh.n_nodes(), 0.0);
    const double gap_ref = 0.5 * eps;  // reference face height above midline
    for (int i = 0; i <= n1; ++i) {
        const double ax = std::abs(mesh.x1[i]);
        double shift = 0.0;  // face displacement: true face height - gap_ref
        if (ax <= hw) {
            const double face = L2 - geom::boundary_height(cell.shape, mesh.x1[i]);
            shift = (face - gap_ref) * taper(ax / hw, 0.7, 0.9);
        }
        for (int k = 0; k <= half2; ++k) {
            double s;
            if (ref[k] <= gap_ref)
                s = ref[k] / gap_ref;
            else
                s = (L2 - ref[k]) / (L2 - gap_ref);
            const double level = ref[k] + s * shift;
            mesh.x2_node[mesh.node_id(i, half2 + k)] = L2 + level;
            mesh.x2_node[mesh.node_id(i, half2 - k)] = L2 - level;  // exact mirror
        }
    }

    // Node classification: nearest-level rounding of the exact boundary per
    // column, mirrored exactly between the two inclusions. Where the face is
    // fitted the boundary coincides with a level and the rounding is exact.
    mesh.node_class.assign(mesh.n_nodes(), NodeClass::Free);
    for (int i = 0; i <= n1; ++i) {
        const double xi = mesh.x1[i];
        double ystar = -1.0;  // top of the lower inclusion on this column
        if (std::abs(xi) <= hw) ystar = geom::boundary_height(cell.shape, xi);
        for (int j = 0; j <= n2; ++j) {
            bool pin_bottom = (j == 0);
            bool pin_top = (j == n2);
            if (ystar >= 0.0) {
                if (!pin_bottom && j >= 1 &&
                    mesh.x2(i, j) + mesh.x2(i, j - 1) <= 2.0 * ystar)
                    pin_bottom = true;
                const int jm = n2 - j;  // mirrored row index
                if (!pin_top && jm >= 1 &&
                    mesh.x2(i, jm) + mesh.x2(i, jm - 1) <= 2.0 * ystar)
                    pin_top = true;
            }
            if (pin_bottom && pin_top)
                throw ResolutionError(
                    "build_mesh: gap column pinched shut; increase resolution");
            if (pin_bottom)
                mesh.node_class[mesh.node_id(i, j)] = NodeClass::PinBottom;
            else if (pin_top)
                mesh.node_class[mesh.node_id(i, j)] = NodeClass::PinTop;
        }
    }

    finalize_classification(mesh);
    return mesh;
}

GapMesh refine(const GapMesh& coarse) {
    GapMesh fine;
    fine.cell = coarse.cell;
    fine.n1 = 2 * coarse.n1;
    fine.n2 = 2 * coarse.n2;
    fine.kappa0 = coarse.kappa0;
    fine.gap_exponent = coarse.gap_exponent;

    fine.x1.assign(fine.n1 + 1, 0.0);
    for (int i = 0; i <= coarse.n1; ++i) fine.x1[2 * i] = coarse.x1[i];
    for (int i = 0; i < coarse.n1; ++i)
        fine.x1[2 * i + 1] = 0.5 * (coarse.x1[i] + coarse.x1[i + 1]);

    // New nodes sit on the parent bilinear geometry: edge midpoints and cell
    // centers (the center of a bilinear quad is the mean of its corners).
    fine.x2_node.assign(fine.n_nodes(), 0.0);
    auto cy = [&](int i, int j) { return coarse.x2(i, j); };
    for (int j = 0; j <= fine.n2; ++j) {
        for (int i = 0; i <= fine.n1; ++i) {
            double v;
            if (i % 2 == 0 && j % 2 == 0)
                v = cy(i / 2, j / 2);
            else if (i % 2 == 0)
                v = 0.5 * (cy(i / 2, j / 2) + cy(i / 2, j / 2 + 1));
            else if (j % 2 == 0)
                v = 0.5 * (cy(i / 2, j / 2) + cy(i / 2 + 1, j / 2));
            else
                v = 0.25 * (cy(i / 2, j / 2) + cy(i / 2 + 1, j / 2) +
                            cy(i / 2, j / 2 + 1) + cy(i / 2 + 1, j / 2 + 1));
            fine.x2_node[fine.node_id(i, j)] = v;
        }
    }

    auto coarse_class = [&](int i, int j) {
        return coarse.node_class[coarse.node_id(i, j)];
    };
    auto same_pinned = [](NodeClass a, NodeClass b) {
        return a == b && a != NodeClass::Free;
    };

    fine.node_class.assign(fine.n_nodes(), NodeClass::Free);
    for (int j = 0; j <= fine.n2; ++j) {
        for (int i = 0; i <= fine.n1; ++i) {
            NodeClass cls = NodeClass::Free;
            const bool on_i = i % 2 == 0;
            const bool on_j = j % 2 == 0;
            if (on_i && on_j) {
                cls = coarse_class(i / 2, j / 2);
            } else if (on_i) {  // midpoint of a vertical coarse edge
                const NodeClass a = coarse_class(i / 2, j / 2);
                const NodeClass b = coarse_class(i / 2, j / 2 + 1);
                if (same_pinned(a, b)) cls = a;
            } else if (on_j) {  // midpoint of a horizontal coarse edge
                const NodeClass a = coarse_class(i / 2, j / 2);
                const NodeClass b = coarse_class(i / 2 + 1, j / 2);
                if (same_pinned(a, b)) cls = a;
            } else {  // coarse cell center
                const NodeClass a = coarse_class(i / 2, j / 2);
                const NodeClass b = coarse_class(i / 2 + 1, j / 2);
                const NodeClass c = coarse_class(i / 2, j / 2 + 1);
                const NodeClass d = coarse_class(i / 2 + 1, j / 2 + 1);
                if (same_pinned(a, b) && same_pinned(a, c) && same_pinned(a, d)) cls = a;
            }
            fine.node_class[fine.node_id(i, j)] = cls;
        }
    }

    // Activity recomputed from the inherited classes coincides with parent
    // inheritance: children of a fully pinned cell stay fully pinned (their
    // new nodes are forced) and children of an active cell keep a free corner.
    finalize_classification(fine);
    return fine;
}

}  // namespace fkcell::fem
