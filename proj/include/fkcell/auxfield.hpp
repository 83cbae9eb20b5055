#pragma once

#include <array>

#include "fkcell/lame.hpp"
#include "fkcell/shapes.hpp"

// Auxiliary displacement fields u_i = ubar_i + utilde_i on the gap chart:
// the Keller ramp (2 x2 + delta)/(2 delta) psi_i plus a corrector that is a
// Lame-coefficient-weighted variant of the rotation basis. Closed-form
// gradients and Hessians, the Lame residual in reduced form, the
// antiderivative potentials of the remainder terms, and the cancellation
// identities behind the corrector design.
//
// Chart coordinates: x1 along the gap, x2 measured from the gap midline, so
// the gap occupies -delta(x1)/2 < x2 < delta(x1)/2 (the simplified profiles
// are symmetric and the midline is 0). Fields are evaluated for
// |x1| < half_width/2. All functions here are pure and thread-safe.
namespace fkcell::aux {

struct AuxEval {
    Vec2 value = Vec2::Zero();
    // grad(k, j) = d_{x_j} u^(k)
    Mat2 grad = Mat2::Zero();
    // hess[k](j, l) = d_{x_j x_l} u^(k) (symmetric)
    std::array<Mat2, 2> hess = {Mat2::Zero(), Mat2::Zero()};

    AuxEval& operator+=(const AuxEval& o) {
        value += o.value;
        grad += o.grad;
        hess[0] += o.hess[0];
        hess[1] += o.hess[1];
        return *this;
    }
};

// Keller part and corrector part, separately.
struct AuxSplit {
    AuxEval bar;
    AuxEval tilde;

    AuxEval total() const {
        AuxEval t = bar;
        t += tilde;
        return t;
    }
};

// Remainder terms R of the second-derivative tables, their x2-antiderivative
// potentials T (d_{x2} T = R), and the Lame residual L_{lambda,mu} u_i
// computed from the reduced expressions (never from naive second
// differences).
struct ResidualParts {
    double R11_11 = 0.0;
    double R12_12 = 0.0;
    double R22_11 = 0.0;
    double R21_12 = 0.0;
    double T11_11 = 0.0;
    double T12_12 = 0.0;
    double T22_11 = 0.0;
    double T21_12 = 0.0;
    Vec2 residual = Vec2::Zero();
};

// The two combinations of second derivatives that vanish identically; they
// are the structural identities justifying the corrector. scale1/scale2 are
// the largest constituent magnitudes, for relative comparisons.
struct CancellationCheck {
    double c1 = 0.0;
    double c2 = 0.0;
    double scale1 = 0.0;
    double scale2 = 0.0;
};

// Energy-density blocks I_kj = (C e(u))_kj d_j u^(k) (their sum is
// (C grad u, grad u)), and the four products of the mu-weighted shear block
// resolved on the ramp/corrector split: I12_1 and I12_4 are odd in x2,
// I12_2 = mu |d_{x2} ubar|^2 carries the full singularity, I12_3 is the
// C/delta-bounded cross product.
struct EnergyTerms {
    double I11 = 0.0;
    double I12 = 0.0;
    double I21 = 0.0;
    double I22 = 0.0;
    double I12_1 = 0.0;
    double I12_2 = 0.0;
    double I12_3 = 0.0;
    double I12_4 = 0.0;
};

// Evaluate u_i (i = 1 shear, i = 2 extension) for gap exponent m >= 2 at a
// chart point. The gap profile must be in simplified mode; the point must lie
// in the chart (|x1| < half_width/2, |x2| <= delta/2 up to roundoff slack).
AuxSplit eval_aux_split(int i, double m, const Vec2& x, const LameParams& lame,
                        const geom::GapProfile& gap);

AuxEval eval_aux(int i, double m, const Vec2& x, const LameParams& lame,
                 const geom::GapProfile& gap);

ResidualParts lame_residual(int i, double m, const Vec2& x, const LameParams& lame,
                            const geom::GapProfile& gap);

CancellationCheck cancellation_check(int i, double m, const Vec2& x,
                                     const LameParams& lame,
                                     const geom::GapProfile& gap);

EnergyTerms energy_density_terms(int i, double m, const Vec2& x, const LameParams& lame,
                                 const geom::GapProfile& gap);

// Admissible C^0 extension of u_i to the whole translated cell
// [-L1,L1] x [0,2L2]: identically psi_i inside the upper inclusion, 0 inside
// the lower one, the gap formula under a cubic Hermite cutoff in |x1| on
// [3r/8, r/2], blended with a vertical ramp between the boundary curves.
// Used for nodal interpolants and admissible comparison fields; only its
// boundary values and boundedness are contractual, not its pointwise values.
Vec2 extension_value(int i, double m, const Vec2& x_global, const geom::CellSpec& cell,
                     const LameParams& lame, const geom::GapProfile& simplified_gap);

}  // namespace fkcell::aux
