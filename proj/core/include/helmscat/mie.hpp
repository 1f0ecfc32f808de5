#ifndef HELMSCAT_MIE_HPP
#define HELMSCAT_MIE_HPP

#include <vector>

#include "helmscat/common.hpp"

namespace helmscat {

enum class MieBc { dirichlet, neumann, robin, robin_intrinsic };

/// Separation-of-variables solution for plane-wave scattering by the disk of
/// radius a. Coefficients are stored against H_{|m|}(kr) e^{im theta},
/// m = -M..M (index m + M).
struct MieSolution {
    MieBc bc = MieBc::dirichlet;
    double a = 1.0;
    double k = 1.0;
    cplx lambda{0.0, 0.0};
    double theta_d = 0.0;  // incidence direction angle
    int M = 0;
    std::vector<cplx> c;
};

/// robin: k J' + lambda J over k H' + lambda H (classical impedance).
/// robin_intrinsic: lambda is multiplied per mode by the disk eigenvalue
/// I'_m(a)/I_m(a) of the interior (-Lap+1) Poincare-Steklov operator,
/// matching the variational Robin condition dnu u + lambda Lam_i Tr u = 0.
MieSolution mie_coefficients(MieBc bc, double a, double k, cplx lambda = {},
                             double theta_d = 0.0);

cplx mie_incident(const MieSolution& sol, const Vec2& p);
cplx mie_scattered(const MieSolution& sol, const Vec2& p);  // requires |p| > a
cplx mie_total(const MieSolution& sol, const Vec2& p);

/// Far-field amplitude with the convention u_s ~ e^{ikr} r^{-1/2} F(theta).
cplx mie_far_field(const MieSolution& sol, double theta);

/// Trace and radial derivative of the total field on r = a.
cplx mie_boundary_trace(const MieSolution& sol, double theta);
cplx mie_boundary_flux(const MieSolution& sol, double theta);

/// Max per-mode residual of the boundary condition (self-certification).
double mie_bc_residual(const MieSolution& sol);

} // namespace helmscat

#endif
