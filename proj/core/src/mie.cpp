#include "helmscat/mie.hpp"

#include <cmath>

#include "helmscat/specfun.hpp"

namespace helmscat {

namespace {

cplx ipow(int m) {  // i^m for m >= 0
    switch (m & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

cplx mipow(int m) {  // (-i)^m for m >= 0
    return std::conj(ipow(m));
}

} // namespace

MieSolution mie_coefficients(MieBc bc, double a, double k, cplx lambda,
                             double theta_d) {
    if (!(a > 0.0) || !(k > 0.0))
        throw PreconditionError("mie_coefficients: a, k must be positive");
    MieSolution sol;
    sol.bc = bc;
    sol.a = a;
    sol.k = k;
    sol.lambda = lambda;
    sol.theta_d = theta_d;
    sol.M = static_cast<int>(std::ceil(k * a)) + 30;

    const auto cyl = cyl_bessel_upto(sol.M, k * a, std::max(200, sol.M + 1));
    std::vector<ModPair> mod;
    if (bc == MieBc::robin_intrinsic)
        mod = mod_bessel_upto(sol.M, a, std::max(200, sol.M + 1));

    sol.c.assign(2 * sol.M + 1, cplx(0.0, 0.0));
    for (int m = -sol.M; m <= sol.M; ++m) {
        const int n = std::abs(m);
        const cplx J(cyl[n].j, 0.0), Jp(cyl[n].jp, 0.0);
        const cplx H(cyl[n].j, cyl[n].y), Hp(cyl[n].jp, cyl[n].yp);
        cplx num, den;
        switch (bc) {
            case MieBc::dirichlet:
                num = J;
                den = H;
                break;
            case MieBc::neumann:
                num = Jp;
                den = Hp;
                break;
            case MieBc::robin:
                num = k * Jp + lambda * J;
                den = k * Hp + lambda * H;
                break;
            case MieBc::robin_intrinsic: {
                const cplx t = cplx(mod[n].ip / mod[n].i, 0.0);
                num = k * Jp + lambda * t * J;
                den = k * Hp + lambda * t * H;
                break;
            }
        }
        if (std::abs(den) < 1e-14 * (std::abs(num) + std::abs(den) + 1.0))
            throw SolverError("mie_coefficients: boundary-condition resonance "
                              "(vanishing modal denominator)");
        sol.c[m + sol.M] =
            -ipow(n) * std::exp(cplx(0.0, -m * theta_d)) * (num / den);
    }
    return sol;
}

cplx mie_incident(const MieSolution& sol, const Vec2& p) {
    const Vec2 d{std::cos(sol.theta_d), std::sin(sol.theta_d)};
    return std::exp(cplx(0.0, sol.k * d.dot(p)));
}

cplx mie_scattered(const MieSolution& sol, const Vec2& p) {
    const double r = p.norm();
    if (r <= sol.a)
        throw PreconditionError("mie_scattered: point inside the disk");
    const double th = std::atan2(p.y, p.x);
    const auto hank = hankel1_upto(sol.M, sol.k * r, std::max(200, sol.M + 1));
    cplx s(0.0, 0.0);
    for (int m = -sol.M; m <= sol.M; ++m)
        s += sol.c[m + sol.M] * hank[std::abs(m)].h * std::exp(cplx(0.0, m * th));
    return s;
}

cplx mie_total(const MieSolution& sol, const Vec2& p) {
    return mie_incident(sol, p) + mie_scattered(sol, p);
}

cplx mie_far_field(const MieSolution& sol, double theta) {
    cplx s(0.0, 0.0);
    for (int m = -sol.M; m <= sol.M; ++m)
        s += sol.c[m + sol.M] * mipow(std::abs(m)) * std::exp(cplx(0.0, m * theta));
    return std::sqrt(2.0 / (pi * sol.k)) * std::exp(cplx(0.0, -pi / 4.0)) * s;
}

cplx mie_boundary_trace(const MieSolution& sol, double theta) {
    const auto cyl = cyl_bessel_upto(sol.M, sol.k * sol.a, std::max(200, sol.M + 1));
    cplx s(0.0, 0.0);
    for (int m = -sol.M; m <= sol.M; ++m) {
        const int n = std::abs(m);
        const cplx inc = ipow(n) * std::exp(cplx(0.0, -m * sol.theta_d)) *
                         cplx(cyl[n].j, 0.0);
        const cplx sc = sol.c[m + sol.M] * cplx(cyl[n].j, cyl[n].y);
        s += (inc + sc) * std::exp(cplx(0.0, m * theta));
    }
    return s;
}

cplx mie_boundary_flux(const MieSolution& sol, double theta) {
    const auto cyl = cyl_bessel_upto(sol.M, sol.k * sol.a, std::max(200, sol.M + 1));
    cplx s(0.0, 0.0);
    for (int m = -sol.M; m <= sol.M; ++m) {
        const int n = std::abs(m);
        const cplx inc = ipow(n) * std::exp(cplx(0.0, -m * sol.theta_d)) *
                         cplx(cyl[n].jp, 0.0);
        const cplx sc = sol.c[m + sol.M] * cplx(cyl[n].jp, cyl[n].yp);
        s += (inc + sc) * std::exp(cplx(0.0, m * theta));
    }
    return sol.k * s;
}

double mie_bc_residual(const MieSolution& sol) {
    const auto cyl = cyl_bessel_upto(sol.M, sol.k * sol.a, std::max(200, sol.M + 1));
    std::vector<ModPair> mod;
    if (sol.bc == MieBc::robin_intrinsic)
        mod = mod_bessel_upto(sol.M, sol.a, std::max(200, sol.M + 1));
    double worst = 0.0;
    for (int m = -sol.M; m <= sol.M; ++m) {
        const int n = std::abs(m);
        const cplx inc = ipow(n) * std::exp(cplx(0.0, -m * sol.theta_d));
        const cplx J(cyl[n].j, 0.0), Jp(cyl[n].jp, 0.0);
        const cplx H(cyl[n].j, cyl[n].y), Hp(cyl[n].jp, cyl[n].yp);
        const cplx cm = sol.c[m + sol.M];
        const cplx tr = inc * J + cm * H;
        const cplx fl = sol.k * (inc * Jp + cm * Hp);
        cplx res;
        switch (sol.bc) {
            case MieBc::dirichlet: res = tr; break;
            case MieBc::neumann: res = fl / sol.k; break;
            case MieBc::robin: res = fl + sol.lambda * tr; break;
            case MieBc::robin_intrinsic:
                res = fl + sol.lambda * cplx(mod[n].ip / mod[n].i, 0.0) * tr;
                break;
        }
        const double scale = std::abs(inc * J) + std::abs(cm * H) + 1e-30;
        worst = std::max(worst, std::abs(res) / scale);
    }
    return worst;
}

} // namespace helmscat
