#include <doctest.h>

#include <cmath>

#include "helmscat/mie.hpp"

using namespace helmscat;

TEST_CASE("robin degenerations") {
    const double a = 1.0, k = 2.0;
    const MieSolution neu = mie_coefficients(MieBc::neumann, a, k);
    const MieSolution rob0 = mie_coefficients(MieBc::robin, a, k, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < neu.c.size(); ++i) CHECK(neu.c[i] == rob0.c[i]);

    const MieSolution dir = mie_coefficients(MieBc::dirichlet, a, k);
    const MieSolution robinf = mie_coefficients(MieBc::robin, a, k, cplx(1e8, 0.0));
    for (std::size_t i = 0; i < dir.c.size(); ++i)
        CHECK(std::abs(dir.c[i] - robinf.c[i]) <= 1e-6 * (std::abs(dir.c[i]) + 1e-12));
}

TEST_CASE("boundary-condition residuals are tiny (self-certification)") {
    for (const double k : {0.7, 2.0, 6.0}) {
        CHECK(mie_bc_residual(mie_coefficients(MieBc::dirichlet, 1.0, k)) <= 1e-12);
        CHECK(mie_bc_residual(mie_coefficients(MieBc::neumann, 1.0, k)) <= 1e-12);
        CHECK(mie_bc_residual(mie_coefficients(MieBc::robin, 1.0, k, cplx(1.0, 0.5))) <=
              1e-12);
        CHECK(mie_bc_residual(mie_coefficients(MieBc::robin_intrinsic, 1.0, k,
                                               cplx(1.0, 0.5))) <= 1e-12);
    }
}

TEST_CASE("dirichlet total field vanishes on the boundary") {
    const MieSolution sol = mie_coefficients(MieBc::dirichlet, 1.0, 3.0, {}, 0.4);
    for (const double th : {0.0, 0.7, 2.1, 4.4})
        CHECK(std::abs(mie_boundary_trace(sol, th)) <= 1e-12);
}

TEST_CASE("far-field mirror symmetry for incidence along +x") {
    const MieSolution sol = mie_coefficients(MieBc::dirichlet, 1.0, 2.5);
    for (const double th : {0.3, 1.1, 2.9}) {
        const cplx up = mie_far_field(sol, th);
        const cplx dn = mie_far_field(sol, -th);
        CHECK(std::abs(up - dn) <= 1e-13 * std::abs(up));
    }
}

TEST_CASE("optical theorem / modal unitarity") {
    auto unitarity = [](const MieSolution& sol) {
        double acc = 0.0, scale = 0.0;
        for (int m = -sol.M; m <= sol.M; ++m) {
            const cplx inc = [&] {
                cplx r(1.0, 0.0);
                const cplx i1(0.0, 1.0);
                for (int j = 0; j < std::abs(m); ++j) r *= i1;
                return r * std::exp(cplx(0.0, -m * sol.theta_d));
            }();
            const cplx c = sol.c[m + sol.M];
            acc += std::norm(c) + (c * std::conj(inc)).real();
            scale += std::norm(c);
        }
        return std::abs(acc) / scale;
    };
    CHECK(unitarity(mie_coefficients(MieBc::dirichlet, 1.0, 2.0)) <= 1e-10);
    CHECK(unitarity(mie_coefficients(MieBc::neumann, 1.0, 2.0)) <= 1e-10);
    CHECK(unitarity(mie_coefficients(MieBc::robin, 1.0, 2.0, cplx(0.8, 0.0))) <= 1e-10);
}

TEST_CASE("series tail is negligible") {
    const MieSolution sol = mie_coefficients(MieBc::dirichlet, 1.0, 4.0);
    double cmax = 0.0;
    for (const cplx& c : sol.c) cmax = std::max(cmax, std::abs(c));
    CHECK(std::abs(sol.c.front()) <= 1e-12 * cmax);
    CHECK(std::abs(sol.c.back()) <= 1e-12 * cmax);

    // truncating ten modes changes the far field by < 1e-12
    MieSolution trunc = sol;
    for (int m = -sol.M; m <= sol.M; ++m)
        if (std::abs(m) > sol.M - 10) trunc.c[m + sol.M] = 0.0;
    for (const double th : {0.2, 1.5, 3.9})
        CHECK(std::abs(mie_far_field(sol, th) - mie_far_field(trunc, th)) <= 1e-12);
}

TEST_CASE("error paths") {
    CHECK_THROWS_AS(mie_coefficients(MieBc::dirichlet, -1.0, 2.0), PreconditionError);
    CHECK_THROWS_AS(mie_coefficients(MieBc::dirichlet, 1.0, 0.0), PreconditionError);
    const MieSolution sol = mie_coefficients(MieBc::dirichlet, 1.0, 2.0);
    CHECK_THROWS_AS(mie_scattered(sol, {0.5, 0.0}), PreconditionError);
}
