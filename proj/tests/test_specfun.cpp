#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "helmscat/specfun.hpp"

using namespace helmscat;

// 40-term power series evaluated with 50-digit decimal arithmetic.
static constexpr double J0_1 = 0.7651976865579665514497175261026632209092742897553;
static constexpr double J1_1 = 0.4400505857449335159596822037189149131273723019928;
static constexpr double J0_5 = -0.1775967713143383043473970130747587110711303560086;
static constexpr double I1_OVER_I0_1 = 0.4463899658965345070476817951926426697762531474004;

TEST_CASE("series oracle values") {
    CHECK(cyl_bessel(0, 1.0).j == doctest::Approx(J0_1).epsilon(1e-13));
    CHECK(cyl_bessel(1, 1.0).j == doctest::Approx(J1_1).epsilon(1e-13));
    CHECK(cyl_bessel(0, 5.0).j == doctest::Approx(J0_5).epsilon(1e-12));
    const ModPair m0 = mod_bessel(0, 1.0);
    const ModPair m1 = mod_bessel(1, 1.0);
    CHECK(m1.i / m0.i == doctest::Approx(I1_OVER_I0_1).epsilon(1e-13));
}

TEST_CASE("cylinder Wronskian J_m Y'_m - J'_m Y_m = 2/(pi x)") {
    for (const double x : {0.5, 1.0, 5.0, 20.0, 100.0, 650.0}) {
        for (const int m : {0, 1, 2, 5, 13, 37, 60}) {
            const CylPair p = cyl_bessel(m, x);
            const double w = p.j * p.yp - p.jp * p.y;
            CHECK(w == doctest::Approx(2.0 / (pi * x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("three-term recurrence residual") {
    for (const double x : {0.7, 3.0, 17.0, 90.0}) {
        for (int m = 1; m <= 40; ++m) {
            const CylPair lo = cyl_bessel(m - 1, x);
            const CylPair mid = cyl_bessel(m, x);
            const CylPair hi = cyl_bessel(m + 1, x);
            const double scale =
                std::max({std::abs(lo.j), std::abs(mid.j), std::abs(hi.j)});
            CHECK(std::abs(lo.j + hi.j - (2.0 * m / x) * mid.j) <= 1e-11 * scale);
            const double yscale =
                std::max({std::abs(lo.y), std::abs(mid.y), std::abs(hi.y)});
            CHECK(std::abs(lo.y + hi.y - (2.0 * m / x) * mid.y) <= 1e-11 * yscale);
        }
    }
}

TEST_CASE("modified Wronskian I_m K'_m - I'_m K_m = -1/x") {
    for (const double x : {0.5, 2.0, 10.0, 50.0}) {
        for (const int m : {0, 1, 2, 7, 23, 60}) {
            const ModPair p = mod_bessel(m, x);
            const double w = p.i * p.kp - p.ip * p.k;
            CHECK(w == doctest::Approx(-1.0 / x).epsilon(1e-12));
        }
    }
}

TEST_CASE("modified limits near zero") {
    double prev_i = mod_bessel(0, 1e-6).i;
    CHECK(prev_i == doctest::Approx(1.0).epsilon(1e-10));
    double prev_k = mod_bessel(0, 1e-6).k;
    for (const double x : {1e-4, 1e-2, 0.1, 0.5}) {
        const ModPair p = mod_bessel(0, x);
        CHECK(p.i >= prev_i);
        CHECK(p.k < prev_k);
        prev_i = p.i;
        prev_k = p.k;
    }
}

TEST_CASE("hankel parity and decay") {
    const Hankel1 h3 = hankel1(3, 2.5);
    const Hankel1 hm3 = hankel1(-3, 2.5);
    CHECK(hm3.h.real() == doctest::Approx(-h3.h.real()));
    CHECK(hm3.h.imag() == doctest::Approx(-h3.h.imag()));

    double prev = std::abs(hankel1(0, 1.0).h);
    for (double x = 1.5; x <= 50.0; x += 0.5) {
        const double cur = std::abs(hankel1(0, x).h);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("hankel large-argument asymptotics") {
    const double x = 100.0;
    const Hankel1 h = hankel1(0, x);
    const cplx ref = std::sqrt(2.0 / (pi * x)) *
                     std::exp(cplx(0.0, 1.0) * (x - pi / 4.0));
    CHECK(std::abs(h.h - ref) / std::abs(ref) < 0.01);
}

TEST_CASE("hankel derivative identity") {
    for (const double x : {0.3, 4.0, 33.0}) {
        for (int m = 0; m <= 12; ++m) {
            const Hankel1 h = hankel1(m, x);
            const Hankel1 lo = hankel1(m - 1, x);
            const cplx rhs = lo.h - (static_cast<double>(m) / x) * h.h;
            CHECK(std::abs(h.hp - rhs) <= 1e-11 * std::abs(h.h));
        }
    }
}

TEST_CASE("error paths") {
    CHECK_THROWS_AS(cyl_bessel(0, 0.0), PreconditionError);
    CHECK_THROWS_AS(cyl_bessel(0, -1.0), PreconditionError);
    CHECK_THROWS_AS(cyl_bessel(201, 10.0), PreconditionError);
    CHECK_THROWS_AS(cyl_bessel(150, 1e-3), std::range_error);  // Y overflow
    CHECK_THROWS_AS(mod_bessel(0, -2.0), PreconditionError);
}

TEST_CASE("batch variants agree with scalar calls") {
    const auto cyl = cyl_bessel_upto(25, 7.3);
    for (int m = 0; m <= 25; ++m) {
        const CylPair p = cyl_bessel(m, 7.3);
        CHECK(cyl[m].j == doctest::Approx(p.j).epsilon(1e-14));
        CHECK(cyl[m].y == doctest::Approx(p.y).epsilon(1e-14));
    }
    const auto mod = mod_bessel_upto(18, 2.2);
    for (int m = 0; m <= 18; ++m) {
        const ModPair p = mod_bessel(m, 2.2);
        CHECK(mod[m].i == doctest::Approx(p.i).epsilon(1e-14));
        CHECK(mod[m].k == doctest::Approx(p.k).epsilon(1e-14));
    }
}
