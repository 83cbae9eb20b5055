// Command-line driver: effective-moduli solves, epsilon sweeps with pass/fail
// regression of the asymptotic criteria, auxiliary-field identity checks,
// shape comparison, and the singular gap integral.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include "fkcell/asymptotics.hpp"
#include "fkcell/auxfield.hpp"
#include "fkcell/config.hpp"
#include "fkcell/errors.hpp"
#include "fkcell/system.hpp"

namespace {

using namespace fkcell;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitCriterion = 3;

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 12345;
    bool quiet = false;
};

std::ostream& info(const CommonArgs& args) {
    static std::ofstream null_sink;
    if (args.quiet) {
        null_sink.setstate(std::ios::badbit);
        return null_sink;
    }
    return std::cerr;
}

asym::SweepSpec sweep_spec_from(const io::RunConfig& cfg,
                                const std::vector<double>& eps_list) {
    asym::SweepSpec spec;
    spec.shape = io::shape_from_config(cfg);
    spec.lame = io::lame_from_config(cfg);
    spec.eps_list = eps_list;
    spec.solver = {cfg.n1, cfg.n2, cfg.grading, cfg.tol};
    spec.L1 = cfg.L1;
    return spec;
}

int cmd_moduli(const CommonArgs& args) {
    const io::RunConfig cfg = io::parse_config_file(args.config_path);
    if (!cfg.eps) throw std::invalid_argument("moduli: cell.eps is required");
    const auto spec = sweep_spec_from(cfg, {*cfg.eps});
    const auto rows = asym::run_sweep(spec);
    if (rows.at(0).failed) throw SolverError(rows[0].error);
    std::cout << io::kCsvHeader << "\n"
              << io::csv_row(rows[0], cfg.precision) << "\n";
    return kExitOk;
}

// Shear-energy slope within a band around the target exponent -(1 - 1/m)
// (+/- 0.05 at m = 2, +/- 0.03 for m > 2) and residual spread factors of
// both energies at most 2.5.
bool sweep_criteria_pass(double m, double slope1, double spread1, double spread2) {
    const double target = -(1.0 - 1.0 / m);
    const double band = m == 2.0 ? 0.05 : 0.03;
    return std::abs(slope1 - target) <= band && spread1 <= 2.5 && spread2 <= 2.5;
}

int cmd_sweep(const CommonArgs& args) {
    const io::RunConfig cfg = io::parse_config_file(args.config_path);
    if (cfg.eps_list.size() < 3)
        throw std::invalid_argument("sweep: need >= 3 points to fit (cell.eps_list)");
    const auto spec = sweep_spec_from(cfg, cfg.eps_list);
    const auto rows = asym::run_sweep(spec);

    const double m = geom::gap_exponent(spec.shape);
    const double slope1 = asym::fit_slope(rows, false);
    const double slope2 = asym::fit_slope(rows, true);
    const double spread1 = asym::residual_spread(rows, false);
    const double spread2 = asym::residual_spread(rows, true);

    const std::string path = args.out_path.empty() ? cfg.csv_path : args.out_path;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("sweep: cannot open output '" + path + "'");
    out << io::kCsvHeader << ",status\n";
    for (const auto& r : rows)
        out << io::csv_row(r, cfg.precision) << (r.failed ? ",FAILED" : ",OK") << "\n";
    out << "# slope_E1=" << io::format_double(slope1, cfg.precision)
        << " spread_res1=" << io::format_double(spread1, cfg.precision)
        << " slope_E2=" << io::format_double(slope2, cfg.precision)
        << " spread_res2=" << io::format_double(spread2, cfg.precision) << "\n";
    out.close();

    bool any_failed = false;
    for (const auto& r : rows) any_failed |= r.failed;
    const bool pass = !any_failed && sweep_criteria_pass(m, slope1, spread1, spread2);
    info(args) << "sweep: slope_E1=" << slope1 << " slope_E2=" << slope2
               << " spread_res1=" << spread1 << " spread_res2=" << spread2
               << (pass ? " [pass]" : " [fail]") << "\n";
    return pass ? kExitOk : kExitCriterion;
}

int cmd_auxcheck(const CommonArgs& args) {
    const io::RunConfig cfg = io::parse_config_file(args.config_path);
    const LameParams lame = io::lame_from_config(cfg);
    const geom::InclusionShape shape = io::shape_from_config(cfg);
    const double eps = cfg.eps.value_or(0.01);
    const geom::CellSpec cell = geom::make_cell(shape, eps);
    const geom::GapProfile gap(cell, geom::GapMode::Simplified);
    const double m = geom::gap_exponent(shape);

    std::mt19937_64 rng(args.seed);
    std::uniform_real_distribution<double> ux(-0.49, 0.49);
    std::uniform_real_distribution<double> uy(-0.45, 0.45);

    double worst_identity = 0.0;
    double worst_fd = 0.0;
    Vec2 worst_identity_pt = Vec2::Zero();
    Vec2 worst_fd_pt = Vec2::Zero();

    const double hw = gap.half_width();
    for (int k = 0; k < cfg.aux_points; ++k) {
        const double x1 = ux(rng) * hw;
        const double x2 = uy(rng) * gap.delta(x1);
        const Vec2 x(x1, x2);
        for (int i : {1, 2}) {
            const auto cc = aux::cancellation_check(i, m, x, lame, gap);
            const double rel =
                std::max(std::abs(cc.c1) / std::max(cc.scale1, 1e-300),
                         std::abs(cc.c2) / std::max(cc.scale2, 1e-300));
            if (rel > worst_identity) {
                worst_identity = rel;
                worst_identity_pt = x;
            }

            // Central-difference check of the analytic gradient.
            const double h1 = 1e-5 * std::max(gap.delta(x1), std::abs(x1));
            const double h2 = 1e-5 * gap.delta(x1);
            const auto at = [&](const Vec2& p) { return aux::eval_aux(i, m, p, lame, gap); };
            const auto e = at(x);
            Mat2 fd;
            fd.col(0) = (at(Vec2(x1 + h1, x2)).value - at(Vec2(x1 - h1, x2)).value) /
                        (2.0 * h1);
            fd.col(1) = (at(Vec2(x1, x2 + h2)).value - at(Vec2(x1, x2 - h2)).value) /
                        (2.0 * h2);
            // fd has d_j u^(k) at (k, j) after col-assembly above.
            const double scale = std::max(e.grad.cwiseAbs().maxCoeff(), 1e-300);
            const double rel_fd = (e.grad - fd).cwiseAbs().maxCoeff() / scale;
            if (rel_fd > worst_fd) {
                worst_fd = rel_fd;
                worst_fd_pt = x;
            }
        }
    }

    std::cout << "auxcheck: points=" << cfg.aux_points << " m=" << io::format_double(m, 6)
              << " max_identity_residual=" << io::format_double(worst_identity, 6)
              << " max_fd_mismatch=" << io::format_double(worst_fd, 6) << "\n";
    const bool pass = worst_identity <= 1e-10 && worst_fd <= 1e-5;
    if (!pass) {
        std::cout << "auxcheck: worst identity point (" << worst_identity_pt.x() << ", "
                  << worst_identity_pt.y() << "), worst fd point (" << worst_fd_pt.x()
                  << ", " << worst_fd_pt.y() << ")\n";
        return kExitCriterion;
    }
    return kExitOk;
}

// Radius at which the polygon boundary crosses the ray at angle theta.
double polygon_radius(const std::vector<Vec2>& poly, double theta) {
    const Vec2 d(std::cos(theta), std::sin(theta));
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[j];
        const Vec2& b = poly[i];
        // Solve a + t (b - a) = r d.
        const double det = d.x() * (a.y() - b.y()) - d.y() * (a.x() - b.x());
        if (det == 0.0) continue;
        const double r = (a.x() * (a.y() - b.y()) - a.y() * (a.x() - b.x())) / det;
        const double t =
            std::abs(d.x()) > std::abs(d.y()) ? (r * d.x() - a.x()) / (b.x() - a.x())
                                              : (r * d.y() - a.y()) / (b.y() - a.y());
        if (r > 0.0 && t >= 0.0 && t <= 1.0) return r;
    }
    return 0.0;
}

int cmd_shape(const CommonArgs& args) {
    const io::RunConfig cfg = io::parse_config_file(args.config_path);
    if (!cfg.shape_f) throw std::invalid_argument("shape: shape.f is required");
    if (!cfg.shape_m) throw std::invalid_argument("shape: shape.m is required");
    const double f = *cfg.shape_f;
    const double m = *cfg.shape_m;

    const geom::Vigdergauz vig = geom::vigdergauz_solve(f);
    // Matched m-convex inclusion in the same unit-area cell (half-width 1/2).
    const geom::InclusionShape mc = geom::match_fraction(f, m, 0.5);

    const auto poly_vig = geom::polygonize(geom::InclusionShape{vig}, cfg.polygon_points);
    const auto poly_mc = geom::polygonize(mc, cfg.polygon_points);

    const std::string stem = args.out_path.empty() ? std::string("shape") : args.out_path;
    for (const auto& [name, poly] :
         {std::pair{stem + "_vigdergauz.csv", &poly_vig},
          std::pair{stem + "_mconvex.csv", &poly_mc}}) {
        std::ofstream out(name, std::ios::binary);
        if (!out) throw std::invalid_argument("shape: cannot open output '" + name + "'");
        out << "x,y\n";
        for (const auto& p : *poly)
            out << io::format_double(p.x(), cfg.precision) << ","
                << io::format_double(p.y(), cfg.precision) << "\n";
    }

    const double area_vig = geom::polygon_area(poly_vig);
    const double area_mc = geom::polygon_area(poly_mc);
    double max_dev = 0.0;
    for (int k = 0; k < 360; ++k) {
        const double th = 2.0 * 3.14159265358979323846 * k / 360.0;
        max_dev = std::max(max_dev, std::abs(polygon_radius(poly_vig, th) -
                                             polygon_radius(poly_mc, th)));
    }

    std::cout << "shape: f=" << io::format_double(f, 10)
              << " area_vigdergauz=" << io::format_double(area_vig, 10)
              << " area_mconvex=" << io::format_double(area_mc, 10)
              << " max_radial_deviation=" << io::format_double(max_dev, 10) << "\n";

    const bool ok = std::abs(area_vig - f) <= 1e-4 * f && std::abs(area_mc - f) <= 1e-4 * f;
    return ok ? kExitOk : kExitCriterion;
}

int cmd_integral(const CommonArgs& args) {
    const io::RunConfig cfg = io::parse_config_file(args.config_path);
    auto need = [](const std::optional<double>& v, const char* name) {
        if (!v) throw std::invalid_argument(std::string("integral: missing ") + name);
        return *v;
    };
    const auto gi = asym::gap_integral(
        need(cfg.integral_m, "integral.m"), need(cfg.integral_kappa0, "integral.kappa0"),
        need(cfg.integral_eps, "integral.eps"), need(cfg.integral_s, "integral.s"));
    std::cout << "numeric,leading,residual\n"
              << io::format_double(gi.numeric, cfg.precision) << ","
              << io::format_double(gi.leading, cfg.precision) << ","
              << io::format_double(gi.residual, cfg.precision) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Effective moduli of periodic composites with near-touching rigid "
                 "inclusions"};
    app.require_subcommand(1);

    CommonArgs args;
    app.add_option("--config", args.config_path, "Path to the run configuration")
        ->required();
    app.add_option("--out", args.out_path, "Output path (CSV file or stem)");
    app.add_option("--seed", args.seed, "Seed for random sampling points");
    app.add_flag("--quiet", args.quiet, "Suppress progress output on stderr");

    auto* sc_moduli = app.add_subcommand("moduli", "Single-gap solve, one CSV row");
    auto* sc_sweep = app.add_subcommand("sweep", "Epsilon sweep with criteria check");
    auto* sc_aux = app.add_subcommand("auxcheck", "Auxiliary-field identity and FD checks");
    auto* sc_shape = app.add_subcommand("shape", "Vigdergauz vs m-convex comparison");
    auto* sc_integral = app.add_subcommand("integral", "Singular gap integral");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitConfig : kExitOk;
    }

    try {
        if (sc_moduli->parsed()) return cmd_moduli(args);
        if (sc_sweep->parsed()) return cmd_sweep(args);
        if (sc_aux->parsed()) return cmd_auxcheck(args);
        if (sc_shape->parsed()) return cmd_shape(args);
        if (sc_integral->parsed()) return cmd_integral(args);
    } catch (const fkcell::SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
