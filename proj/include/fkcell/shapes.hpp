#pragma once

#include <Eigen/Dense>
#include <optional>
#include <variant>
#include <vector>

#include "fkcell/lame.hpp"
#include "fkcell/specfun.hpp"

// Inclusion shapes, the periodic cell, gap profiles, volume fractions and
// the Vigdergauz boundary parameterization.
namespace fkcell::geom {

struct Ellipse {
    double a;  // semi-axis along x1
    double b;  // semi-axis along x2
};

// Curvilinear square |x1|^m + |x2|^m <= r^m, m > 2.
struct MConvex {
    double m;
    double r;
};

// Energy-optimal inclusion in the unit-area square cell [-1/2,1/2]^2,
// parameterized by elliptic integrals. Constructed by vigdergauz_solve.
struct Vigdergauz {
    double f;  // volume fraction
    double p;  // elliptic parameter solving h = K(1-p)/K(p)
    double h;  // (1-f)/(1+f)
    double M;  // (1-p)^2 / p^2
};

using InclusionShape = std::variant<Ellipse, MConvex, Vigdergauz>;

void validate(const InclusionShape& shape);

// Half-width of the shape along x1 (a for ellipses, r for m-convex).
double half_width(const InclusionShape& shape);

// Height of the apex point facing the gap (b for ellipses, r for m-convex).
double apex_height(const InclusionShape& shape);

// Coefficient kappa0 of the leading |x1|^m term in the gap opening:
// b/a^2 for ellipses, (2/m) r^{1-m} for m-convex shapes. Unsupported for
// Vigdergauz inclusions (no closed-form gap coefficient).
double curvature_at_gap(const InclusionShape& shape);

// Exponent m of the gap opening (2 for ellipses).
double gap_exponent(const InclusionShape& shape);

// Non-negative x2 with (x1, x2) on the boundary; |x1| must not exceed the
// half-width. Unsupported for Vigdergauz (use the polygon path).
double boundary_height(const InclusionShape& shape, double x1);

// Analytic area of the inclusion. For Vigdergauz this is f by definition
// (unit cell area).
double area(const InclusionShape& shape);

// True if the point lies inside or on the boundary. Vigdergauz containment
// is resolved against a cached high-resolution polygon.
bool contains(const InclusionShape& shape, const Vec2& x);

// Periodic cell: half-widths L1, L2 and the inclusion-to-inclusion gap eps.
// Consistency demands 2 (L2 - apex) = eps and half-width < L1.
struct CellSpec {
    double L1;
    double L2;
    double eps;
    InclusionShape shape;

    void validate() const;
};

// Convenience: square-ish cell hugging the inclusion, L2 = apex + eps/2.
CellSpec make_cell(const InclusionShape& shape, double eps,
                   std::optional<double> L1 = std::nullopt,
                   std::optional<double> L2 = std::nullopt);

enum class GapMode { Exact, Simplified };

// Vertical gap geometry between the two near-touching boundaries, in
// coordinates centered at the gap midpoint. h1 is the lower boundary of the
// upper inclusion minus eps/2, h2 the upper boundary of the lower inclusion
// plus eps/2 (h1 = -h2 for the symmetric shapes handled here), and
// delta(x1) = eps + h1(x1) - h2(x1) > 0 is the opening.
//
// Simplified mode carries the polynomial profile delta = eps + kappa0 |x1|^m
// used by the closed-form auxiliary fields; exact mode evaluates the true
// boundary curves.
class GapProfile {
  public:
    GapProfile(const CellSpec& cell, GapMode mode);

    double h1(double x1) const;
    double h2(double x1) const { return -h1(x1); }
    double delta(double x1) const { return eps_ + 2.0 * h1(x1); }

    GapMode mode() const { return mode_; }
    double eps() const { return eps_; }
    double half_width() const { return half_width_; }
    double kappa0() const { return kappa0_; }
    double exponent() const { return m_; }

  private:
    GapMode mode_;
    double eps_;
    double half_width_;
    double kappa0_;
    double m_;
    std::optional<InclusionShape> shape_;  // exact mode only
    double apex_ = 0.0;
};

// Volume fraction of the inclusion in the square cell of half-width L.
// Supported for circles (a == b), m-convex shapes, and Vigdergauz (stored f).
double volume_fraction(const InclusionShape& shape, double L);

// Touching-limit maximum of the fraction: pi/4 at m = 2, otherwise
// Gamma(1/m)^2 / (2 m Gamma(2/m)); independent of L.
double max_volume_fraction(double m, double L = 1.0);

// Shape of gap exponent m whose volume fraction in the cell of half-width L
// equals f_target (circle for m = 2, MConvex otherwise).
InclusionShape match_fraction(double f_target, double m, double L);

// Solve the Vigdergauz parameters for a given volume fraction:
// h = (1-f)/(1+f), then p in (1/2, 1) with K(1-p)/K(p) = h.
Vigdergauz vigdergauz_solve(double f);

// Quarter-boundary point for t in [M, 1]; x <= 0 and y >= 0.
Vec2 vigdergauz_boundary(const Vigdergauz& v, double t);

// Closed counterclockwise polygon approximating the full boundary with n
// vertices (parametric sampling; four reflected quarters for Vigdergauz).
std::vector<Vec2> polygonize(const InclusionShape& shape, int n);

// Signed area by the shoelace formula (positive for counterclockwise).
double polygon_area(const std::vector<Vec2>& poly);

}  // namespace fkcell::geom
