#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fkcell/asymptotics.hpp"
#include "fkcell/errors.hpp"
#include "oracles.hpp"

using namespace fkcell;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("leading energy coefficients") {
    const LameParams lame{1.0, 1.0};
    // m = 2: pi mu / sqrt(kappa0) and pi (lambda + 2 mu) / sqrt(kappa0).
    const auto e1 = asym::leading_energy(1, 2.0, 1.0, lame);
    CHECK(e1.exponent == doctest::Approx(0.5));
    CHECK(e1.at(1e-4) == doctest::Approx(100.0 * kPi).epsilon(1e-13));
    const auto e2 = asym::leading_energy(2, 2.0, 1.0, lame);
    CHECK(e2.coefficient == doctest::Approx(3.0 * kPi).epsilon(1e-13));

    // m = 4 arithmetic.
    const auto e14 = asym::leading_energy(1, 4.0, 0.5, lame);
    CHECK(e14.exponent == doctest::Approx(0.75));
    CHECK(e14.at(1e-4) ==
          doctest::Approx(2.0 * kPi / (4.0 * std::sin(kPi / 4.0)) *
                          std::pow(0.5, -0.25) * 1000.0)
              .epsilon(1e-12));
    CHECK(e14.at(1e-4) == doctest::Approx(2641.7).epsilon(1e-4));

    // m -> 2 continuity: the m-formula at m = 2 is exactly the m = 2 law.
    CHECK(asym::leading_energy(1, 2.0, 1.3, lame).coefficient ==
          doctest::Approx(kPi * lame.mu / std::sqrt(1.3)).epsilon(1e-14));

    CHECK_THROWS_AS(asym::leading_energy(1, 2.0, -1.0, lame), std::domain_error);
    CHECK_THROWS_AS(asym::leading_energy(1, 1.5, 1.0, lame), std::domain_error);
}

TEST_CASE("leading moduli equal moduli of leading energies") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int k = 0; k < 100; ++k) {
        const double mu = u(rng);
        double lambda = u(rng) - 1.0;
        if (lambda + mu <= 0.05) lambda = -mu + 0.1;
        const LameParams lame{lambda, mu};
        const double m = k % 2 == 0 ? 2.0 : 2.0 + u(rng);
        const double kappa0 = u(rng);
        const auto cell = geom::make_cell(geom::Ellipse{1.0, 1.0}, 0.01, 1.3);
        const auto [mu_star, e_star] = asym::leading_moduli(m, kappa0, lame, cell);
        const auto e1 = asym::leading_energy(1, m, kappa0, lame);
        const auto e2 = asym::leading_energy(2, m, kappa0, lame);
        const double ratio = cell.L2 / cell.L1;
        CHECK(mu_star.coefficient ==
              doctest::Approx(ratio * e1.coefficient).epsilon(1e-14));
        CHECK(e_star.coefficient ==
              doctest::Approx(lame.young() / (lame.lambda + 2.0 * lame.mu) * ratio *
                              e2.coefficient)
                  .epsilon(1e-14));
        // E*/mu* = E/mu for all eps.
        CHECK(e_star.coefficient / mu_star.coefficient ==
              doctest::Approx(lame.young() / lame.mu).epsilon(1e-13));
    }
}

TEST_CASE("moduli from the volume-fraction distance") {
    const LameParams lame{1.0, 1.0};
    // delta2 = 0.01 reproduces 12.53 pi mu.
    const auto [mu2, e2] = asym::moduli_from_fraction(2.0, lame, 0.01);
    CHECK(mu2 / kPi == doctest::Approx(12.53).epsilon(0.005));
    CHECK(mu2 == doctest::Approx(kPi * std::sqrt(kPi / 2.0) * 10.0).epsilon(1e-12));
    CHECK(e2 == doctest::Approx(mu2 * lame.young() / lame.mu).epsilon(1e-12));

    // 1/sqrt(delta) scaling at m = 2.
    const auto [mu2b, e2b] = asym::moduli_from_fraction(2.0, lame, 0.04);
    CHECK(mu2b == doctest::Approx(0.5 * mu2).epsilon(1e-12));
    CHECK(e2b == doctest::Approx(0.5 * e2).epsilon(1e-12));

    // m = 4 with delta4 implied by delta2 = 0.01.
    const double delta4 = geom::max_volume_fraction(4.0) - (kPi / 4.0 - 0.01);
    CHECK(delta4 == doctest::Approx(0.151639).epsilon(1e-5));
    const auto [mu4, e4] = asym::moduli_from_fraction(4.0, lame, delta4);
    CHECK(mu4 / kPi == doctest::Approx(5.56).epsilon(0.015));
    CHECK(mu4 / kPi > 5.4);
    CHECK(mu4 / kPi < 5.6);

    CHECK_THROWS_AS(asym::moduli_from_fraction(2.0, lame, 0.0), std::domain_error);
}

TEST_CASE("fraction route and eps route agree near touching") {
    // The corollaries substitute the touching-limit eps(delta_f) into the
    // eps-asymptotics; agreement tightens as delta_f -> 0.
    const LameParams lame{0.8, 1.7};
    for (double m : {2.0, 4.0}) {
        double prev_rel = 1e300;
        for (double delta_f : {0.05, 0.01, 0.002}) {
            const double fmax = geom::max_volume_fraction(m);
            const double f = fmax - delta_f;
            const auto shape = geom::match_fraction(f, m, 1.0);
            const double r = m == 2.0 ? std::get<geom::Ellipse>(shape).a
                                      : std::get<geom::MConvex>(shape).r;
            const double eps = 2.0 * (1.0 - r);  // square cell, L = 1
            const double kappa0 = geom::curvature_at_gap(shape);
            const auto cell = geom::make_cell(shape, eps, 1.0, 1.0);
            const auto [mu_lead, e_lead] = asym::leading_moduli(m, kappa0, lame, cell);
            const auto [mu_f, e_f] = asym::moduli_from_fraction(m, lame, delta_f);
            const double rel = std::abs(mu_lead.at(eps) / mu_f - 1.0);
            CHECK(rel < prev_rel);
            prev_rel = rel;
        }
        CHECK(prev_rel < 5e-3);
    }
}

TEST_CASE("gap integral against the arctangent antiderivative") {
    // m = 2 closed form: int dx/(eps + k x^2) = (2/sqrt(k eps)) atan(s sqrt(k/eps)).
    const auto gi = asym::gap_integral(2.0, 1.0, 1e-4, 0.5);
    CHECK(gi.numeric == doctest::Approx(200.0 * std::atan(50.0)).epsilon(1e-12));
    CHECK(gi.leading == doctest::Approx(100.0 * kPi).epsilon(1e-13));
    CHECK(gi.residual == doctest::Approx(gi.numeric - gi.leading));
    CHECK(gi.residual == doctest::Approx(-4.0).epsilon(2e-4));

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ue(-5.0, -2.0);
    std::uniform_real_distribution<double> us(0.1, 2.0);
    std::uniform_real_distribution<double> uk(0.2, 3.0);
    for (int k = 0; k < 20; ++k) {
        const double eps = std::pow(10.0, ue(rng));
        const double s = us(rng);
        const double kap = uk(rng);
        const double ref =
            2.0 / std::sqrt(kap * eps) * std::atan(s * std::sqrt(kap / eps));
        CHECK(asym::gap_integral(2.0, kap, eps, s).numeric ==
              doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("gap integral properties") {
    // Positive, increasing in s, decreasing in eps.
    const double base = asym::gap_integral(3.0, 0.7, 1e-3, 0.4).numeric;
    CHECK(base > 0.0);
    CHECK(asym::gap_integral(3.0, 0.7, 1e-3, 0.8).numeric > base);
    CHECK(asym::gap_integral(3.0, 0.7, 1e-4, 0.4).numeric > base);

    // Quadrature agrees with the independent oracle for m = 4.
    for (double eps : {1e-3, 1e-4}) {
        const double ref = oracle::integrate(
            [eps](double x) { return 1.0 / (eps + 0.5 * std::pow(std::abs(x), 4.0)); },
            -0.5, 0.5, 1e-12);
        CHECK(asym::gap_integral(4.0, 0.5, eps, 0.5).numeric ==
              doctest::Approx(ref).epsilon(1e-9));
    }

    // m = 4 residual stays bounded across the eps sweep.
    double lo = 1e300, hi = 0.0;
    for (double eps : {1e-3, 1e-4, 1e-5}) {
        const double r = std::abs(asym::gap_integral(4.0, 0.5, eps, 0.5).residual);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(hi / lo < 1.10);
}

TEST_CASE("sweep on a coarse mesh produces consistent rows") {
    asym::SweepSpec spec;
    spec.shape = geom::Ellipse{1.0, 1.0};
    spec.lame = LameParams{1.0, 1.0};
    spec.eps_list = {0.08, 0.04, 0.02};
    spec.solver = {48, 64, 100.0, 1e-10};
    const auto rows = asym::run_sweep(spec);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(!r.failed);
        CHECK(r.E1 > 0.0);
        CHECK(r.E2 > r.E1);  // (lambda + 2 mu) > mu
        CHECK(r.res1 == doctest::Approx(r.E1 - r.lead1));
        CHECK(r.mu_star == doctest::Approx(r.E1));  // L1 = L2
        // Galerkin upper bound row by row.
        CHECK(r.E1 <= r.E1_interp * (1.0 + 1e-12));
        CHECK(r.E2 <= r.E2_interp * (1.0 + 1e-12));
        CHECK(r.dofs > 0);
        CHECK(r.iters > 0);
    }
    CHECK(asym::fit_slope(rows, false) < 0.0);
    CHECK(asym::residual_spread(rows, false) >= 1.0);

    // A failing row is marked, not thrown.
    spec.eps_list = {0.08, 0.04, 0.0004};
    const auto rows2 = asym::run_sweep(spec);
    CHECK(!rows2[0].failed);
    CHECK(rows2[2].failed);
    CHECK(!rows2[2].error.empty());

    spec.eps_list = {0.01, 0.02};
    CHECK_THROWS_AS(asym::run_sweep(spec), std::domain_error);
}
