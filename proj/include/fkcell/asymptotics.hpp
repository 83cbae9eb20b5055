#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fkcell/lame.hpp"
#include "fkcell/shapes.hpp"

// Closed-form leading terms of the gap energies and effective moduli, the
// singular gap integral, and the epsilon-sweep driver that compares solved
// energies against them.
namespace fkcell::asym {

enum class ModulusKind { Energy1, Energy2, Shear, Extensional };

// One singular leading term: coefficient * eps^{-exponent}.
struct LeadingTerm {
    double coefficient = 0.0;
    double exponent = 0.0;  // 1 - 1/m
    ModulusKind kind = ModulusKind::Energy1;
    double m = 2.0;
    double kappa0 = 0.0;

    double at(double eps) const { return coefficient * std::pow(eps, -exponent); }
};

// Leading term of the energy integral E_i: for all m >= 2 the coefficient is
// 2 pi / (m sin(pi/m)) kappa0^{-1/m} times mu (i = 1) or lambda + 2 mu
// (i = 2); at m = 2 this reduces to pi mu / sqrt(kappa0) exactly.
LeadingTerm leading_energy(int i, double m, double kappa0, const LameParams& lame);

// Leading terms of mu* and E*; identical to pushing the two energy terms
// through the energy-to-modulus identities.
std::pair<LeadingTerm, LeadingTerm> leading_moduli(double m, double kappa0,
                                                   const LameParams& lame,
                                                   const geom::CellSpec& cell);

// Leading moduli as a function of the distance delta_f of the volume
// fraction from its touching maximum (square cell):
//   mu* = mu pi/sin(pi/m) (2/m^2 G(1/m)^2/G(2/m))^{1-1/m} delta_f^{-(1-1/m)}
// and the same expression with E for the extensional modulus.
std::pair<double, double> moduli_from_fraction(double m, const LameParams& lame,
                                               double delta_f);

struct GapIntegral {
    double numeric = 0.0;   // int_{-s}^{s} dx / (eps + kappa0 |x|^m)
    double leading = 0.0;   // full-line closed form
    double residual = 0.0;  // numeric - leading
};

// Adaptive panel-Gauss evaluation of the singular gap integral with the
// substitution x = (eps/kappa0)^{1/m} t; relative target 1e-10.
GapIntegral gap_integral(double m, double kappa0, double eps, double s);

struct SolverParams {
    int n1 = 128;
    int n2 = 256;
    double grading = 2000.0;
    double tol = 1e-10;
};

struct SweepSpec {
    geom::InclusionShape shape;  // ellipse or m-convex
    LameParams lame;
    std::vector<double> eps_list;  // sorted descending
    SolverParams solver;
    std::optional<double> L1;  // default: square cell L1 = L2
};

struct SweepRow {
    double eps = 0.0;
    double E1 = 0.0, E2 = 0.0;
    double lead1 = 0.0, lead2 = 0.0;
    double res1 = 0.0, res2 = 0.0;
    double mu_star = 0.0, e_star = 0.0;
    double sup_grad_v = 0.0, sup_grad_w = 0.0;  // from the shear solve
    int dofs = 0;
    int iters = 0;  // both solves combined
    // Energies of the interpolated auxiliary fields (Galerkin upper bounds).
    double E1_interp = 0.0, E2_interp = 0.0;
    bool failed = false;
    std::string error;
};

// Solve the cell problem for every eps in the spec. Rows that fail to mesh
// or converge are marked failed instead of aborting the sweep.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

// Least-squares slope of log(y) against log(eps) over the non-failed rows.
double fit_slope(const std::vector<SweepRow>& rows, bool second_energy);

// max|res| / min|res| over the non-failed rows.
double residual_spread(const std::vector<SweepRow>& rows, bool second_energy);

}  // namespace fkcell::asym
