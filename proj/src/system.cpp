#include "fkcell/system.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fkcell/errors.hpp"

namespace fkcell::fem {

namespace {

// Zero-fill incomplete Cholesky A ~ L L^T on the lower-triangular sparsity,
// with a Manteuffel diagonal shift retried on breakdown (Q1 elasticity is
// not an M-matrix, so unshifted IC(0) can fail). Deterministic.
class IncompleteCholesky {
  public:
    void factor(const SpMat& A) {
        n_ = int(A.rows());
        rowptr_.assign(n_ + 1, 0);
        cols_.clear();
        base_.clear();
        for (int i = 0; i < n_; ++i) {
            for (SpMat::InnerIterator it(A, i); it; ++it)
                if (it.col() <= i) {
                    cols_.push_back(int(it.col()));
                    base_.push_back(it.value());
                }
            rowptr_[i + 1] = int(cols_.size());
            if (rowptr_[i + 1] == rowptr_[i] || cols_.back() != i)
                throw SolverError("solve_cell: matrix row without a diagonal entry");
        }
        shift_ = 1e-3;
        while (!try_factor())
            shift_ *= 10.0;
    }

    // z = (L L^T)^{-1} r
    void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const {
        for (int i = 0; i < n_; ++i) {
            double s = r[i];
            int k = rowptr_[i];
            for (; cols_[k] < i; ++k) s -= val_[k] * z[cols_[k]];
            z[i] = s / val_[k];
        }
        for (int i = n_ - 1; i >= 0; --i) {
            const int kd = rowptr_[i + 1] - 1;
            z[i] /= val_[kd];
            const double zi = z[i];
            for (int k = rowptr_[i]; k < kd; ++k) z[cols_[k]] -= val_[k] * zi;
        }
    }

  private:
    bool try_factor() {
        val_ = base_;
        std::vector<int> diag(n_, -1);
        for (int i = 0; i < n_; ++i) {
            for (int k = rowptr_[i]; k < rowptr_[i + 1]; ++k) {
                const int j = cols_[k];
                double sum = val_[k];
                if (j == i) sum += shift_ * std::abs(sum);
                int pi = rowptr_[i];
                int pj = rowptr_[j];
                while (pi < rowptr_[i + 1] && pj < rowptr_[j + 1] && cols_[pi] < j &&
                       cols_[pj] < j) {
                    if (cols_[pi] == cols_[pj]) {
                        sum -= val_[pi] * val_[pj];
                        ++pi;
                        ++pj;
                    } else if (cols_[pi] < cols_[pj]) {
                        ++pi;
                    } else {
                        ++pj;
                    }
                }
                if (j == i) {
                    if (!(sum > 1e-12 * std::abs(base_[k]))) return false;
                    val_[k] = std::sqrt(sum);
                    diag[i] = k;
                } else {
                    val_[k] = sum / val_[diag[j]];
                }
            }
        }
        return true;
    }

    int n_ = 0;
    double shift_ = 0.0;
    std::vector<int> rowptr_;
    std::vector<int> cols_;
    std::vector<double> base_;  // lower triangle of A
    std::vector<double> val_;   // factor values
};

// Physical shape-function gradients and Jacobian determinant of the
// isoparametric bilinear map at a reference point. pts are the four cell
// corners counterclockwise from the lower-left.
struct ShapeGrads {
    double gx[4];
    double gy[4];
    double detj;
};

ShapeGrads shape_grads(const Vec2 pts[4], double xi, double eta) {
    const double dxi[4] = {-(1 - eta) / 4, (1 - eta) / 4, (1 + eta) / 4, -(1 + eta) / 4};
    const double deta[4] = {-(1 - xi) / 4, -(1 + xi) / 4, (1 + xi) / 4, (1 - xi) / 4};
    double xx = 0, xy = 0, yx = 0, yy = 0;  // J = [dx/dxi dy/dxi; dx/deta dy/deta]
    for (int k = 0; k < 4; ++k) {
        xx += dxi[k] * pts[k].x();
        xy += dxi[k] * pts[k].y();
        yx += deta[k] * pts[k].x();
        yy += deta[k] * pts[k].y();
    }
    ShapeGrads sg;
    sg.detj = xx * yy - xy * yx;
    const double inv = 1.0 / sg.detj;
    for (int k = 0; k < 4; ++k) {
        sg.gx[k] = (yy * dxi[k] - xy * deta[k]) * inv;
        sg.gy[k] = (-yx * dxi[k] + xx * deta[k]) * inv;
    }
    return sg;
}

void cell_corners(const GapMesh& mesh, int i, int j, Vec2 pts[4], int nodes[4]) {
    nodes[0] = mesh.node_id(i, j);
    nodes[1] = mesh.node_id(i + 1, j);
    nodes[2] = mesh.node_id(i + 1, j + 1);
    nodes[3] = mesh.node_id(i, j + 1);
    pts[0] = mesh.node_pos(i, j);
    pts[1] = mesh.node_pos(i + 1, j);
    pts[2] = mesh.node_pos(i + 1, j + 1);
    pts[3] = mesh.node_pos(i, j + 1);
}

// 8x8 bilinear element stiffness, 2x2 Gauss, dofs interleaved per node.
// Mirrored from the upper triangle so the matrix is symmetric entrywise.
Eigen::Matrix<double, 8, 8> element_stiffness(const Vec2 pts[4],
                                              const LameParams& lame) {
    Eigen::Matrix<double, 8, 8> K = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix3d D;
    D << lame.lambda + 2.0 * lame.mu, lame.lambda, 0.0,
         lame.lambda, lame.lambda + 2.0 * lame.mu, 0.0,
         0.0, 0.0, lame.mu;
    const double gp = 1.0 / std::sqrt(3.0);
    for (int qa = 0; qa < 2; ++qa) {
        for (int qb = 0; qb < 2; ++qb) {
            const ShapeGrads sg = shape_grads(pts, qa ? gp : -gp, qb ? gp : -gp);
            Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
            for (int k = 0; k < 4; ++k) {
                B(0, 2 * k) = sg.gx[k];
                B(1, 2 * k + 1) = sg.gy[k];
                B(2, 2 * k) = sg.gy[k];
                B(2, 2 * k + 1) = sg.gx[k];
            }
            K += sg.detj * (B.transpose() * D * B);
        }
    }
    for (int r = 0; r < 8; ++r)
        for (int c = r + 1; c < 8; ++c) K(c, r) = K(r, c);
    return K;
}

// Displacement gradient of the bilinear field at a reference point.
Mat2 cell_gradient(const GapMesh& mesh, const Eigen::VectorXd& v, int i, int j,
                   double xi, double eta) {
    Vec2 pts[4];
    int nodes[4];
    cell_corners(mesh, i, j, pts, nodes);
    const ShapeGrads sg = shape_grads(pts, xi, eta);
    Mat2 G = Mat2::Zero();
    for (int k = 0; k < 4; ++k)
        for (int c = 0; c < 2; ++c) {
            const double val = v[2 * nodes[k] + c];
            G(c, 0) += sg.gx[k] * val;
            G(c, 1) += sg.gy[k] * val;
        }
    return G;
}

}  // namespace

Eigen::VectorXd StiffnessSystem::pinned_values(int i) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * n_pinned);
    for (std::size_t n = 0; n < pinned_index.size(); ++n) {
        if (pinned_index[n] < 0) continue;
        if (cls[n] == NodeClass::PinTop) g[2 * pinned_index[n] + (i - 1)] = 1.0;
    }
    return g;
}

StiffnessSystem assemble(const GapMesh& mesh, const LameParams& lame) {
    lame.validate();
    StiffnessSystem sys;
    sys.free_index = mesh.free_index;
    sys.cls = mesh.node_class;
    sys.pinned_index.assign(mesh.n_nodes(), -1);
    int np = 0;
    for (int n = 0; n < mesh.n_nodes(); ++n)
        if (mesh.node_class[n] != NodeClass::Free) sys.pinned_index[n] = np++;
    sys.n_free = mesh.n_free;
    sys.n_pinned = np;

    using T = Eigen::Triplet<double>;
    std::vector<T> t_ff, t_fp, t_pf, t_pp;
    const std::size_t active =
        std::count(mesh.cell_active.begin(), mesh.cell_active.end(), char(1));
    t_ff.reserve(active * 40);
    t_fp.reserve(active * 12);
    t_pf.reserve(active * 12);
    t_pp.reserve(active * 12);

    for (int j = 0; j < mesh.n2; ++j) {
        for (int i = 0; i < mesh.n1; ++i) {
            if (!mesh.cell_active[j * mesh.n1 + i]) continue;
            Vec2 pts[4];
            int nodes[4];
            cell_corners(mesh, i, j, pts, nodes);
            const auto K = element_stiffness(pts, lame);
            for (int a = 0; a < 4; ++a) {
                for (int ca = 0; ca < 2; ++ca) {
                    const int na = nodes[a];
                    const bool fa = sys.free_index[na] >= 0;
                    const int ra = fa ? 2 * sys.free_index[na] + ca
                                      : 2 * sys.pinned_index[na] + ca;
                    for (int b = 0; b < 4; ++b) {
                        for (int cb = 0; cb < 2; ++cb) {
                            const int nb = nodes[b];
                            const bool fb = sys.free_index[nb] >= 0;
                            const int cbi = fb ? 2 * sys.free_index[nb] + cb
                                               : 2 * sys.pinned_index[nb] + cb;
                            const double val = K(2 * a + ca, 2 * b + cb);
                            if (val == 0.0) continue;
                            if (fa && fb)
                                t_ff.emplace_back(ra, cbi, val);
                            else if (fa && !fb)
                                t_fp.emplace_back(ra, cbi, val);
                            else if (!fa && fb)
                                t_pf.emplace_back(ra, cbi, val);
                            else
                                t_pp.emplace_back(ra, cbi, val);
                        }
                    }
                }
            }
        }
    }

    sys.A_ff.resize(2 * sys.n_free, 2 * sys.n_free);
    sys.A_fp.resize(2 * sys.n_free, 2 * sys.n_pinned);
    sys.A_pf.resize(2 * sys.n_pinned, 2 * sys.n_free);
    sys.A_pp.resize(2 * sys.n_pinned, 2 * sys.n_pinned);
    sys.A_ff.setFromTriplets(t_ff.begin(), t_ff.end());
    sys.A_fp.setFromTriplets(t_fp.begin(), t_fp.end());
    sys.A_pf.setFromTriplets(t_pf.begin(), t_pf.end());
    sys.A_pp.setFromTriplets(t_pp.begin(), t_pp.end());
    return sys;
}

DisplacementField solve_cell(const GapMesh& mesh, const StiffnessSystem& sys, int i,
                             double tol) {
    if (i != 1 && i != 2) throw std::domain_error("solve_cell: i must be 1 or 2");
    if (!(tol > 0.0 && tol <= 1e-6))
        throw std::domain_error("solve_cell: tol must lie in (0, 1e-6]");

    const Eigen::VectorXd g = sys.pinned_values(i);
    const Eigen::VectorXd rhs = -(sys.A_fp * g);

    DisplacementField out;
    out.v = Eigen::VectorXd::Zero(2 * mesh.n_nodes());
    for (int n = 0; n < mesh.n_nodes(); ++n) {
        const Vec2 pv = mesh.pinned_value(mesh.node_class[n], i);
        out.v[2 * n] = pv[0];
        out.v[2 * n + 1] = pv[1];
    }

    if (rhs.norm() == 0.0) return out;  // trivial data

    // Preconditioned conjugate gradient on the SPD free block, fixed
    // ordering, no reductions reordered: reruns are bit-identical.
    IncompleteCholesky precond;
    precond.factor(sys.A_ff);

    const int n = int(rhs.size());
    const int cap = std::max(100, int(20.0 * std::sqrt(double(n))));
    const double target = tol * rhs.norm();

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = rhs;
    Eigen::VectorXd z(n), p(n), Ap(n);
    precond.apply(r, z);
    p = z;
    double rz = r.dot(z);
    double rnorm = r.norm();
    int it = 0;
    while (rnorm > target) {
        if (it >= cap)
            throw NonConvergenceError(
                "solve_cell: conjugate gradient hit the iteration cap (" +
                std::to_string(cap) + "), relative residual " +
                std::to_string(rnorm / rhs.norm()));
        Ap.noalias() = sys.A_ff * p;
        const double pAp = p.dot(Ap);
        if (!(pAp > 0.0) || !std::isfinite(pAp))
            throw NonConvergenceError("solve_cell: conjugate gradient broke down");
        const double alpha = rz / pAp;
        x += alpha * p;
        r -= alpha * Ap;
        rnorm = r.norm();
        ++it;
        if (rnorm <= target) break;
        precond.apply(r, z);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    out.iterations = it;
    out.residual = rnorm / rhs.norm();

    for (int node = 0; node < mesh.n_nodes(); ++node)
        if (sys.free_index[node] >= 0) {
            out.v[2 * node] = x[2 * sys.free_index[node]];
            out.v[2 * node + 1] = x[2 * sys.free_index[node] + 1];
        }
    return out;
}

double energy(const GapMesh& mesh, const LameParams& lame,
              const DisplacementField& field) {
    const double gp = 1.0 / std::sqrt(3.0);
    double total = 0.0;
    for (int j = 0; j < mesh.n2; ++j) {
        for (int i = 0; i < mesh.n1; ++i) {
            if (!mesh.cell_active[j * mesh.n1 + i]) continue;
            Vec2 pts[4];
            int nodes[4];
            cell_corners(mesh, i, j, pts, nodes);
            for (int qa = 0; qa < 2; ++qa)
                for (int qb = 0; qb < 2; ++qb) {
                    const double xi = qa ? gp : -gp;
                    const double eta = qb ? gp : -gp;
                    const ShapeGrads sg = shape_grads(pts, xi, eta);
                    Mat2 G = Mat2::Zero();
                    for (int k = 0; k < 4; ++k)
                        for (int c = 0; c < 2; ++c) {
                            const double val = field.v[2 * nodes[k] + c];
                            G(c, 0) += sg.gx[k] * val;
                            G(c, 1) += sg.gy[k] * val;
                        }
                    total += sg.detj * elastic_energy_density(lame, G);
                }
        }
    }
    return total;
}

double boundary_work(const StiffnessSystem& sys, const DisplacementField& field, int i) {
    Eigen::VectorXd x(2 * sys.n_free);
    for (std::size_t n = 0; n < sys.free_index.size(); ++n)
        if (sys.free_index[n] >= 0) {
            x[2 * sys.free_index[n]] = field.v[2 * n];
            x[2 * sys.free_index[n] + 1] = field.v[2 * n + 1];
        }
    const Eigen::VectorXd g = sys.pinned_values(i);
    const Eigen::VectorXd flux = sys.A_pf * x + sys.A_pp * g;
    return flux.dot(g);
}

std::pair<double, double> effective_moduli(double e1, double e2,
                                           const geom::CellSpec& cell,
                                           const LameParams& lame) {
    if (!(e1 >= 0.0 && e2 >= 0.0))
        throw std::domain_error("effective_moduli: energies must be non-negative");
    lame.validate();
    const double ratio = cell.L2 / cell.L1;
    const double mu_star = ratio * e1;
    const double e_star = lame.young() / (lame.lambda + 2.0 * lame.mu) * ratio * e2;
    return {mu_star, e_star};
}

GapGradStats gap_gradient_stats(const GapMesh& mesh, const DisplacementField& field,
                                int i, const LameParams& lame,
                                const geom::GapProfile& gap) {
    GapGradStats stats;
    const double hw = gap.half_width();
    const double L2 = mesh.cell.L2;
    for (int j = 0; j < mesh.n2; ++j) {
        for (int ic = 0; ic < mesh.n1; ++ic) {
            if (!mesh.cell_active[j * mesh.n1 + ic]) continue;
            Vec2 pts[4];
            int nodes[4];
            cell_corners(mesh, ic, j, pts, nodes);
            bool all_free = true;
            for (int n : nodes)
                if (mesh.node_class[n] != NodeClass::Free) all_free = false;
            if (!all_free) continue;
            const double cx = 0.25 * (pts[0].x() + pts[1].x() + pts[2].x() + pts[3].x());
            const double cy = 0.25 * (pts[0].y() + pts[1].y() + pts[2].y() + pts[3].y());
            if (std::abs(cx) >= 0.25 * hw) continue;
            const double x2loc = cy - L2;
            if (std::abs(x2loc) > 0.49 * gap.delta(cx)) continue;

            const Mat2 Gv = cell_gradient(mesh, field.v, ic, j, 0.0, 0.0);
            const Mat2 Gu =
                aux::eval_aux(i, gap.exponent(), Vec2(cx, x2loc), lame, gap).grad;
            stats.sup_grad_v = std::max(stats.sup_grad_v, Gv.norm());
            stats.sup_grad_w = std::max(stats.sup_grad_w, (Gv - Gu).norm());
            ++stats.samples;
        }
    }
    if (stats.samples == 0)
        throw SolverError("gap_gradient_stats: no free cells in the gap sample region");
    return stats;
}

DisplacementField interpolate_aux(const GapMesh& mesh, int i, const LameParams& lame,
                                  const geom::GapProfile& gap) {
    DisplacementField out;
    out.v = Eigen::VectorXd::Zero(2 * mesh.n_nodes());
    for (int j = 0; j <= mesh.n2; ++j) {
        for (int ic = 0; ic <= mesh.n1; ++ic) {
            const int n = mesh.node_id(ic, j);
            Vec2 val;
            if (mesh.node_class[n] != NodeClass::Free)
                val = mesh.pinned_value(mesh.node_class[n], i);
            else
                val = aux::extension_value(i, gap.exponent(), mesh.node_pos(ic, j),
                                           mesh.cell, lame, gap);
            out.v[2 * n] = val[0];
            out.v[2 * n + 1] = val[1];
        }
    }
    return out;
}

}  // namespace fkcell::fem
