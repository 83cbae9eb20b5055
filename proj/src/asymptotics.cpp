#include "fkcell/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fkcell/errors.hpp"
#include "fkcell/specfun.hpp"
#include "fkcell/system.hpp"

namespace fkcell::asym {

namespace {

constexpr double kPi = 3.14159265358979323846;

double singular_coefficient(double m, double kappa0) {
    return 2.0 * kPi / (m * std::sin(kPi / m)) * std::pow(kappa0, -1.0 / m);
}

// Gauss-Legendre 15-point nodes/weights on [-1, 1].
constexpr int kGaussN = 15;
constexpr double kGaussX[kGaussN] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kGaussW[kGaussN] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

template <class F>
double gauss15(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double rad = 0.5 * (b - a);
    double sum = 0.0;
    for (int k = 0; k < kGaussN; ++k) sum += kGaussW[k] * f(mid + rad * kGaussX[k]);
    return rad * sum;
}

template <class F>
double adaptive_gauss(F&& f, double a, double b, double rel_tol, double scale,
                      int depth) {
    const double whole = gauss15(f, a, b);
    const double mid = 0.5 * (a + b);
    const double split = gauss15(f, a, mid) + gauss15(f, mid, b);
    if (std::abs(whole - split) <= rel_tol * std::max(scale, std::abs(split)))
        return split;
    if (depth <= 0)
        throw QuadratureError("gap_integral: adaptive quadrature tolerance not met");
    return adaptive_gauss(f, a, mid, rel_tol, scale, depth - 1) +
           adaptive_gauss(f, mid, b, rel_tol, scale, depth - 1);
}

}  // namespace

LeadingTerm leading_energy(int i, double m, double kappa0, const LameParams& lame) {
    if (i != 1 && i != 2) throw std::domain_error("leading_energy: i must be 1 or 2");
    if (!(m >= 2.0)) throw std::domain_error("leading_energy: m must be >= 2");
    if (!(kappa0 > 0.0)) throw std::domain_error("leading_energy: kappa0 must be positive");
    lame.validate();
    LeadingTerm t;
    t.m = m;
    t.kappa0 = kappa0;
    t.exponent = 1.0 - 1.0 / m;
    t.kind = i == 1 ? ModulusKind::Energy1 : ModulusKind::Energy2;
    const double material = i == 1 ? lame.mu : lame.lambda + 2.0 * lame.mu;
    t.coefficient = material * singular_coefficient(m, kappa0);
    return t;
}

std::pair<LeadingTerm, LeadingTerm> leading_moduli(double m, double kappa0,
                                                   const LameParams& lame,
                                                   const geom::CellSpec& cell) {
    const LeadingTerm e1 = leading_energy(1, m, kappa0, lame);
    const LeadingTerm e2 = leading_energy(2, m, kappa0, lame);
    const double ratio = cell.L2 / cell.L1;
    LeadingTerm mu_star = e1;
    mu_star.kind = ModulusKind::Shear;
    mu_star.coefficient = ratio * e1.coefficient;
    LeadingTerm e_star = e2;
    e_star.kind = ModulusKind::Extensional;
    e_star.coefficient =
        lame.young() / (lame.lambda + 2.0 * lame.mu) * ratio * e2.coefficient;
    return {mu_star, e_star};
}

std::pair<double, double> moduli_from_fraction(double m, const LameParams& lame,
                                               double delta_f) {
    if (!(m >= 2.0)) throw std::domain_error("moduli_from_fraction: m must be >= 2");
    if (!(delta_f > 0.0))
        throw std::domain_error("moduli_from_fraction: delta_f must be positive");
    lame.validate();
    using specfun::gamma;
    const double shape_factor =
        (2.0 / (m * m)) * gamma(1.0 / m) * gamma(1.0 / m) / gamma(2.0 / m);
    const double factor = kPi / std::sin(kPi / m) *
                          std::pow(shape_factor, 1.0 - 1.0 / m) *
                          std::pow(delta_f, -(1.0 - 1.0 / m));
    return {lame.mu * factor, lame.young() * factor};
}

GapIntegral gap_integral(double m, double kappa0, double eps, double s) {
    if (!(m >= 2.0)) throw std::domain_error("gap_integral: m must be >= 2");
    if (!(kappa0 > 0.0 && eps > 0.0 && s > 0.0))
        throw std::domain_error("gap_integral: kappa0, eps, s must be positive");

    GapIntegral out;
    out.leading = singular_coefficient(m, kappa0) * std::pow(eps, -(1.0 - 1.0 / m));

    // Substitute x = (eps/kappa0)^{1/m} t: the integrand becomes
    // (1/eps) (eps/kappa0)^{1/m} / (1 + t^m), resolving the eps-width core
    // uniformly in eps. Integrate the core [0, 1] directly and the algebraic
    // tail on geometrically growing panels.
    const double core = std::pow(eps / kappa0, 1.0 / m);
    const double T = s / core;
    const double prefactor = 2.0 * core / eps;
    auto f = [m](double t) { return 1.0 / (1.0 + std::pow(t, m)); };

    double integral = 0.0;
    const double rel_tol = 1e-12;
    double a = 0.0;
    double b = std::min(1.0, T);
    integral += adaptive_gauss(f, a, b, rel_tol, 0.0, 40);
    while (b < T) {
        a = b;
        b = std::min(2.0 * b, T);
        integral += adaptive_gauss(f, a, b, rel_tol, integral, 40);
    }
    out.numeric = prefactor * integral;
    out.residual = out.numeric - out.leading;
    return out;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.lame.validate();
    if (spec.eps_list.empty()) throw std::domain_error("run_sweep: empty eps list");
    if (!std::is_sorted(spec.eps_list.rbegin(), spec.eps_list.rend()))
        throw std::domain_error("run_sweep: eps list must be sorted descending");

    const double m = geom::gap_exponent(spec.shape);
    const double kappa0 = geom::curvature_at_gap(spec.shape);

    std::vector<SweepRow> rows;
    rows.reserve(spec.eps_list.size());
    for (double eps : spec.eps_list) {
        SweepRow row;
        row.eps = eps;
        row.lead1 = leading_energy(1, m, kappa0, spec.lame).at(eps);
        row.lead2 = leading_energy(2, m, kappa0, spec.lame).at(eps);
        try {
            const geom::CellSpec cell = geom::make_cell(spec.shape, eps, spec.L1);
            const geom::GapProfile gap(cell, geom::GapMode::Simplified);
            const fem::GapMesh mesh = fem::build_mesh(
                cell, spec.solver.n1, spec.solver.n2, spec.solver.grading);
            const fem::StiffnessSystem sys = fem::assemble(mesh, spec.lame);
            row.dofs = mesh.n_dofs_free();

            const fem::DisplacementField v1 =
                fem::solve_cell(mesh, sys, 1, spec.solver.tol);
            const fem::DisplacementField v2 =
                fem::solve_cell(mesh, sys, 2, spec.solver.tol);
            row.iters = v1.iterations + v2.iterations;

            row.E1 = fem::energy(mesh, spec.lame, v1);
            row.E2 = fem::energy(mesh, spec.lame, v2);
            row.res1 = row.E1 - row.lead1;
            row.res2 = row.E2 - row.lead2;
            const auto [mu_star, e_star] =
                fem::effective_moduli(row.E1, row.E2, cell, spec.lame);
            row.mu_star = mu_star;
            row.e_star = e_star;

            const fem::GapGradStats stats =
                fem::gap_gradient_stats(mesh, v1, 1, spec.lame, gap);
            row.sup_grad_v = stats.sup_grad_v;
            row.sup_grad_w = stats.sup_grad_w;

            row.E1_interp =
                fem::energy(mesh, spec.lame, fem::interpolate_aux(mesh, 1, spec.lame, gap));
            row.E2_interp =
                fem::energy(mesh, spec.lame, fem::interpolate_aux(mesh, 2, spec.lame, gap));
        } catch (const SolverError& e) {
            row.failed = true;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double fit_slope(const std::vector<SweepRow>& rows, bool second_energy) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const auto& r : rows) {
        if (r.failed) continue;
        const double x = std::log(r.eps);
        const double y = std::log(second_energy ? r.E2 : r.E1);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw std::domain_error("fit_slope: need at least 2 valid rows");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double residual_spread(const std::vector<SweepRow>& rows, bool second_energy) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    int n = 0;
    for (const auto& r : rows) {
        if (r.failed) continue;
        const double res = std::abs(second_energy ? r.res2 : r.res1);
        lo = std::min(lo, res);
        hi = std::max(hi, res);
        ++n;
    }
    if (n < 2) throw std::domain_error("residual_spread: need at least 2 valid rows");
    return hi / lo;
}

}  // namespace fkcell::asym
