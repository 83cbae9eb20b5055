#include "fkcell/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace fkcell::geom {

namespace {

constexpr double kPi = 3.14159265358979323846;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void validate(const InclusionShape& shape) {
    std::visit(Overloaded{
                   [](const Ellipse& e) {
                       if (!(e.a > 0.0 && e.b > 0.0))
                           throw std::domain_error("Ellipse: semi-axes must be positive");
                   },
                   [](const MConvex& s) {
                       if (!(s.m > 2.0))
                           throw std::domain_error("MConvex: exponent m must exceed 2");
                       if (!(s.r > 0.0))
                           throw std::domain_error("MConvex: half-width r must be positive");
                   },
                   [](const Vigdergauz& v) {
                       if (!(v.f > 0.0 && v.f < 1.0))
                           throw std::domain_error("Vigdergauz: fraction must lie in (0,1)");
                   },
               },
               shape);
}

double half_width(const InclusionShape& shape) {
    return std::visit(Overloaded{
                          [](const Ellipse& e) { return e.a; },
                          [](const MConvex& s) { return s.r; },
                          [](const Vigdergauz&) -> double {
                              throw std::domain_error(
                                  "half_width: unsupported for Vigdergauz inclusions");
                          },
                      },
                      shape);
}

double apex_height(const InclusionShape& shape) {
    return std::visit(Overloaded{
                          [](const Ellipse& e) { return e.b; },
                          [](const MConvex& s) { return s.r; },
                          [](const Vigdergauz&) -> double {
                              throw std::domain_error(
                                  "apex_height: unsupported for Vigdergauz inclusions");
                          },
                      },
               shape);
}

double curvature_at_gap(const InclusionShape& shape) {
    return std::visit(
        Overloaded{
            [](const Ellipse& e) { return e.b / (e.a * e.a); },
            [](const MConvex& s) { return (2.0 / s.m) * std::pow(s.r, 1.0 - s.m); },
            [](const Vigdergauz&) -> double {
                throw std::domain_error(
                    "curvature_at_gap: no closed-form gap coefficient for Vigdergauz "
                    "inclusions");
            },
        },
        shape);
}

double gap_exponent(const InclusionShape& shape) {
    return std::visit(Overloaded{
                          [](const Ellipse&) { return 2.0; },
                          [](const MConvex& s) { return s.m; },
                          [](const Vigdergauz&) -> double {
                              throw std::domain_error(
                                  "gap_exponent: unsupported for Vigdergauz inclusions");
                          },
                      },
                      shape);
}

double boundary_height(const InclusionShape& shape, double x1) {
    return std::visit(
        Overloaded{
            [&](const Ellipse& e) {
                if (std::abs(x1) > e.a)
                    throw std::domain_error("boundary_height: |x1| exceeds the half-width");
                const double t = x1 / e.a;
                return e.b * std::sqrt(std::max(0.0, 1.0 - t * t));
            },
            [&](const MConvex& s) {
                if (std::abs(x1) > s.r)
                    throw std::domain_error("boundary_height: |x1| exceeds the half-width");
                const double t = std::pow(std::abs(x1) / s.r, s.m);
                return s.r * std::pow(std::max(0.0, 1.0 - t), 1.0 / s.m);
            },
            [](const Vigdergauz&) -> double {
                throw std::domain_error(
                    "boundary_height: unsupported for Vigdergauz inclusions");
            },
        },
        shape);
}

double area(const InclusionShape& shape) {
    return std::visit(
        Overloaded{
            [](const Ellipse& e) { return kPi * e.a * e.b; },
            [](const MConvex& s) {
                using specfun::gamma;
                return 2.0 * s.r * s.r * gamma(1.0 / s.m) * gamma(1.0 / s.m) /
                       (s.m * gamma(2.0 / s.m));
            },
            [](const Vigdergauz& v) { return v.f; },
        },
        shape);
}

namespace {

// Cached polygon for Vigdergauz containment tests, keyed by the fraction.
const std::vector<Vec2>& vigdergauz_polygon_cached(const Vigdergauz& v) {
    static std::map<double, std::vector<Vec2>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(v.f);
    if (it == cache.end())
        it = cache.emplace(v.f, polygonize(InclusionShape{v}, 8192)).first;
    return it->second;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& x) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& pi = poly[i];
        const Vec2& pj = poly[j];
        if ((pi.y() > x.y()) != (pj.y() > x.y())) {
            const double t = (x.y() - pi.y()) / (pj.y() - pi.y());
            if (x.x() < pi.x() + t * (pj.x() - pi.x())) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

bool contains(const InclusionShape& shape, const Vec2& x) {
    return std::visit(
        Overloaded{
            [&](const Ellipse& e) {
                const double u = x.x() / e.a;
                const double v = x.y() / e.b;
                return u * u + v * v <= 1.0;
            },
            [&](const MConvex& s) {
                return std::pow(std::abs(x.x()), s.m) + std::pow(std::abs(x.y()), s.m) <=
                       std::pow(s.r, s.m);
            },
            [&](const Vigdergauz& v) {
                return point_in_polygon(vigdergauz_polygon_cached(v), x);
            },
        },
        shape);
}

void CellSpec::validate() const {
    geom::validate(shape);
    if (!(L1 > 0.0 && L2 > 0.0)) throw std::domain_error("CellSpec: L1, L2 must be positive");
    if (!(eps > 0.0)) throw std::domain_error("CellSpec: eps must be positive");
    const double apex = apex_height(shape);
    if (std::abs(2.0 * (L2 - apex) - eps) > 1e-12 * std::max(1.0, L2))
        throw std::domain_error("CellSpec: 2(L2 - apex) = eps violated");
    if (!(half_width(shape) < L1))
        throw std::domain_error("CellSpec: inclusion half-width must stay below L1");
}

CellSpec make_cell(const InclusionShape& shape, double eps, std::optional<double> L1,
                   std::optional<double> L2) {
    geom::validate(shape);
    if (!(eps > 0.0)) throw std::domain_error("make_cell: eps must be positive");
    const double l2 = L2 ? *L2 : apex_height(shape) + 0.5 * eps;
    const double l1 = L1 ? *L1 : l2;
    CellSpec cell{l1, l2, eps, shape};
    cell.validate();
    return cell;
}

GapProfile::GapProfile(const CellSpec& cell, GapMode mode)
    : mode_(mode),
      eps_(cell.eps),
      half_width_(geom::half_width(cell.shape)),
      kappa0_(curvature_at_gap(cell.shape)),
      m_(gap_exponent(cell.shape)) {
    cell.validate();
    if (mode_ == GapMode::Exact) {
        shape_ = cell.shape;
        apex_ = apex_height(cell.shape);
    }
}

double GapProfile::h1(double x1) const {
    if (std::abs(x1) > half_width_)
        throw std::domain_error("GapProfile: |x1| exceeds the half-width");
    if (mode_ == GapMode::Simplified)
        return 0.5 * kappa0_ * std::pow(std::abs(x1), m_);
    return apex_ - boundary_height(*shape_, x1);
}

double volume_fraction(const InclusionShape& shape, double L) {
    if (!(L > 0.0)) throw std::domain_error("volume_fraction: L must be positive");
    return std::visit(
        Overloaded{
            [&](const Ellipse& e) {
                if (e.a != e.b)
                    throw std::domain_error(
                        "volume_fraction: general ellipses (a != b) are out of scope");
                return kPi * e.a * e.a / (4.0 * L * L);
            },
            [&](const MConvex& s) {
                using specfun::gamma;
                return s.r * s.r * gamma(1.0 / s.m) * gamma(1.0 / s.m) /
                       (2.0 * s.m * L * L * gamma(2.0 / s.m));
            },
            [&](const Vigdergauz& v) { return v.f; },
        },
        shape);
}

double max_volume_fraction(double m, double L) {
    (void)L;  // the maximum is reached at r = L and is scale-free
    if (!(m >= 2.0)) throw std::domain_error("max_volume_fraction: m must be >= 2");
    if (m == 2.0) return kPi / 4.0;
    using specfun::gamma;
    return gamma(1.0 / m) * gamma(1.0 / m) / (2.0 * m * gamma(2.0 / m));
}

InclusionShape match_fraction(double f_target, double m, double L) {
    const double fmax = max_volume_fraction(m, L);
    if (!(f_target > 0.0 && f_target < fmax))
        throw std::domain_error("match_fraction: f_target must lie in (0, " +
                                std::to_string(fmax) + ")");
    // f(r) = fmax (r/L)^2, so the inversion is a square root.
    const double r = L * std::sqrt(f_target / fmax);
    if (m == 2.0) return Ellipse{r, r};
    return MConvex{m, r};
}

Vigdergauz vigdergauz_solve(double f) {
    if (!(f > 0.0 && f < 1.0))
        throw std::domain_error("vigdergauz_solve: fraction must lie in (0,1)");
    const double h = (1.0 - f) / (1.0 + f);
    auto kratio = [](double p) {
        return specfun::elliptic_k(specfun::EllipticParam(1.0 - p)) /
               specfun::elliptic_k(specfun::EllipticParam(p));
    };
    // K(1-p)/K(p) falls from 1 at p = 1/2 toward 0 as p -> 1; bracket on
    // (1/2, 1 - 1e-12) and let the root finder report a failure beyond it.
    const double lo = 0.5;
    const double hi = 1.0 - 1e-12;
    const double p =
        specfun::find_root([&](double q) { return kratio(q) - h; }, lo, hi, 1e-15);
    const double M = (1.0 - p) * (1.0 - p) / (p * p);
    return Vigdergauz{f, p, h, M};
}

Vec2 vigdergauz_boundary(const Vigdergauz& v, double t) {
    if (!(t >= v.M && t <= 1.0))
        throw std::domain_error("vigdergauz_boundary: t must lie in [M, 1]");
    const specfun::EllipticParam p(v.p);
    const double scale = 1.0 / (2.0 * (1.0 + v.h) * specfun::elliptic_k(p));
    const double x = -scale * specfun::elliptic_f(std::sqrt(std::max(0.0, 1.0 - t)), p);
    const double y =
        scale * specfun::elliptic_f(std::sqrt(std::max(0.0, 1.0 - v.M / t)), p);
    return Vec2(x, y);
}

namespace {

std::vector<Vec2> polygonize_parametric(const InclusionShape& shape, int n) {
    std::vector<Vec2> poly;
    poly.reserve(n);
    const bool ellipse = std::holds_alternative<Ellipse>(shape);
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * kPi * k / n;
        if (ellipse) {
            const auto& e = std::get<Ellipse>(shape);
            poly.emplace_back(e.a * std::cos(th), e.b * std::sin(th));
        } else {
            const auto& s = std::get<MConvex>(shape);
            const double c = std::cos(th);
            const double sn = std::sin(th);
            const double q = 2.0 / s.m;
            poly.emplace_back(s.r * std::copysign(std::pow(std::abs(c), q), c),
                              s.r * std::copysign(std::pow(std::abs(sn), q), sn));
        }
    }
    return poly;
}

std::vector<Vec2> polygonize_vigdergauz(const Vigdergauz& v, int n) {
    // Quarter in the second quadrant from (x_min, 0) at t = M to (0, y_max)
    // at t = 1. The rounded corner sits at t = sqrt(M), which is tiny for
    // square-ish inclusions, so sample log-uniformly in t.
    const int q = std::max(4, n / 4);
    std::vector<Vec2> quarter(q + 1);
    for (int k = 0; k <= q; ++k) {
        const double t = std::pow(v.M, 1.0 - double(k) / q);
        quarter[k] = vigdergauz_boundary(v, std::clamp(t, v.M, 1.0));
    }
    std::vector<Vec2> poly;
    poly.reserve(4 * q);
    // Q1: mirror in x, t from M to 1 runs (r,0) -> (0,r).
    for (int k = 0; k < q; ++k) poly.emplace_back(-quarter[k].x(), quarter[k].y());
    // Q2: t from 1 down to M runs (0,r) -> (-r,0).
    for (int k = q; k > 0; --k) poly.emplace_back(quarter[k].x(), quarter[k].y());
    // Q3: both mirrored.
    for (int k = 0; k < q; ++k) poly.emplace_back(quarter[k].x(), -quarter[k].y());
    // Q4.
    for (int k = q; k > 0; --k) poly.emplace_back(-quarter[k].x(), -quarter[k].y());
    return poly;
}

}  // namespace

std::vector<Vec2> polygonize(const InclusionShape& shape, int n) {
    if (n < 8) throw std::domain_error("polygonize: need n >= 8");
    if (std::holds_alternative<Vigdergauz>(shape))
        return polygonize_vigdergauz(std::get<Vigdergauz>(shape), n);
    return polygonize_parametric(shape, n);
}

double polygon_area(const std::vector<Vec2>& poly) {
    double twice = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        twice += poly[j].x() * poly[i].y() - poly[i].x() * poly[j].y();
    return 0.5 * twice;
}

}  // namespace fkcell::geom
