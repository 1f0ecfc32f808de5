#ifndef HELMSCAT_SPECFUN_HPP
#define HELMSCAT_SPECFUN_HPP

#include <vector>

#include "helmscat/common.hpp"

namespace helmscat {

/// J_m, Y_m and their derivatives at a common argument.
struct CylPair {
    double j = 0.0;
    double y = 0.0;
    double jp = 0.0;
    double yp = 0.0;
};

struct ModPair {
    double i = 0.0;
    double k = 0.0;
    double ip = 0.0;
    double kp = 0.0;
};

/// Cylinder Bessel functions of the first and second kind with derivatives.
/// Miller backward recurrence for J, series/asymptotic seeds plus upward
/// recurrence for Y. Throws PreconditionError for x <= 0 or m out of range,
/// std::range_error when Y_m overflows.
CylPair cyl_bessel(int m, double x, int max_order = 200);

/// All orders 0..mmax at once (shares the recurrence work).
std::vector<CylPair> cyl_bessel_upto(int mmax, double x, int max_order = 200);

struct Hankel1 {
    cplx h;  // H^{(1)}_m(x)
    cplx hp; // d/dx H^{(1)}_m(x)
};

/// Hankel function of the first kind; negative orders via H_{-m} = (-1)^m H_m.
Hankel1 hankel1(int m, double x, int max_order = 200);
std::vector<Hankel1> hankel1_upto(int mmax, double x, int max_order = 200);

/// Modified Bessel functions I_m, K_m with derivatives.
ModPair mod_bessel(int m, double x, int max_order = 200);
std::vector<ModPair> mod_bessel_upto(int mmax, double x, int max_order = 200);

} // namespace helmscat

#endif
