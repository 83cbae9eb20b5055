#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fkcell/specfun.hpp"
#include "oracles.hpp"

using namespace fkcell;
using specfun::EllipticParam;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("gamma at pinned points") {
    CHECK(specfun::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(specfun::gamma(0.5) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-13));
    // Oracle: high-precision quadrature of the defining integral.
    const double g14 = oracle::gamma_integral(0.25);
    CHECK(g14 == doctest::Approx(3.6256099082).epsilon(1e-9));
    CHECK(specfun::gamma(0.25) == doctest::Approx(g14).epsilon(1e-12));
}

TEST_CASE("gamma against quadrature across the working range") {
    for (double x : {0.1, 0.3, 0.75, 1.5, 2.25, 4.0, 6.5, 10.0}) {
        const double ref = oracle::gamma_integral(x);
        CHECK(specfun::gamma(x) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("gamma recurrence property") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int k = 0; k < 100; ++k) {
        const double x = u(rng);
        CHECK(specfun::gamma(x + 1.0) ==
              doctest::Approx(x * specfun::gamma(x)).epsilon(1e-12));
    }
}

TEST_CASE("gamma domain error") {
    CHECK_THROWS_AS(specfun::gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(specfun::gamma(-1.0), std::domain_error);
}

TEST_CASE("elliptic_f pinned values") {
    CHECK(specfun::elliptic_f(0.0, EllipticParam(0.5)) == 0.0);
    // K(p -> 0) = pi/2.
    CHECK(specfun::elliptic_f(1.0, EllipticParam(1e-12)) ==
          doctest::Approx(kPi / 2.0).epsilon(1e-10));
    const double ref = oracle::elliptic_f_integral(1.0, 0.5);
    CHECK(ref == doctest::Approx(1.8540746773).epsilon(1e-9));
    CHECK(specfun::elliptic_f(1.0, EllipticParam(0.5)) ==
          doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("elliptic_f against quadrature at interior points") {
    for (double p : {0.1, 0.5, 0.9, 0.99}) {
        for (double x : {0.2, 0.6, 0.95, 1.0}) {
            const double ref = oracle::elliptic_f_integral(x, p);
            CHECK(specfun::elliptic_f(x, EllipticParam(p)) ==
                  doctest::Approx(ref).epsilon(1e-10));
        }
    }
}

TEST_CASE("elliptic_f strictly increasing in x") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const EllipticParam p(0.7);
    std::vector<double> xs(50);
    for (auto& x : xs) x = u(rng);
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 1; k < xs.size(); ++k) {
        if (xs[k] == xs[k - 1]) continue;
        CHECK(specfun::elliptic_f(xs[k], p) > specfun::elliptic_f(xs[k - 1], p));
    }
}

TEST_CASE("elliptic_f domain errors") {
    CHECK_THROWS_AS(specfun::elliptic_f(1.5, EllipticParam(0.5)), std::domain_error);
    CHECK_THROWS_AS(specfun::elliptic_f(-0.1, EllipticParam(0.5)), std::domain_error);
    CHECK_THROWS_AS(EllipticParam(0.0), std::domain_error);
    CHECK_THROWS_AS(EllipticParam(1.0), std::domain_error);
}

TEST_CASE("elliptic_k equals elliptic_f(1, p)") {
    CHECK(specfun::elliptic_k(EllipticParam(0.5)) ==
          doctest::Approx(1.8540746773).epsilon(1e-9));
    for (double p = 0.1; p < 0.95; p += 0.1) {
        CHECK(specfun::elliptic_k(EllipticParam(p)) ==
              doctest::Approx(specfun::elliptic_f(1.0, EllipticParam(p)))
                  .epsilon(1e-10));
    }
    // Monotone increasing in p.
    CHECK(specfun::elliptic_k(EllipticParam(0.96)) >
          specfun::elliptic_k(EllipticParam(0.5)));
}

TEST_CASE("find_root basics") {
    const double r = specfun::find_root([](double x) { return x * x - 2.0; }, 1.0, 2.0,
                                        1e-12);
    CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
    const double z = specfun::find_root([](double x) { return x; }, -1.0, 1.0, 1e-14);
    CHECK(std::abs(z) < 1e-13);
}

TEST_CASE("find_root on the K-ratio equation") {
    auto kratio = [](double p) {
        return specfun::elliptic_k(EllipticParam(1.0 - p)) /
               specfun::elliptic_k(EllipticParam(p));
    };
    const double p =
        specfun::find_root([&](double q) { return kratio(q) - 0.2; }, 0.5, 1.0 - 1e-9,
                           1e-15);
    CHECK(kratio(p) == doctest::Approx(0.2).epsilon(1e-10));
}

TEST_CASE("find_root error contracts") {
    CHECK_THROWS_AS(
        specfun::find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12),
        NoBracketError);
}

TEST_CASE("find_root residual bound on monotone functions") {
    auto f = [](double x) { return std::exp(x) - 2.0; };
    const double tol = 1e-11;
    const double r = specfun::find_root(f, 0.0, 2.0, tol);
    CHECK(std::abs(f(r)) <= tol * (1.0 + std::abs(f(0.0)) + std::abs(f(2.0))));
}
