#include "helmscat/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace helmscat {

namespace {

using ld = long double;

constexpr ld pi_l = 3.14159265358979323846264338327950288L;
constexpr ld euler_gamma_l = 0.57721566490153286060651209008240243L;

void check_args(int m, double x, int max_order) {
    if (x <= 0.0) throw PreconditionError("bessel: argument must be > 0");
    if (m < 0 || m > max_order)
        throw PreconditionError("bessel: order outside [0, max_order]");
}

// J_0..J_n by Miller's backward recurrence, normalised with
// J_0 + 2*sum J_{2k} = 1.
std::vector<ld> bessel_j_array(int n, ld x) {
    const int start = std::max(n, static_cast<int>(x)) + 24 +
                      static_cast<int>(2.0L * std::sqrt(static_cast<ld>(
                                           std::max(n, static_cast<int>(x)))));
    std::vector<ld> j(static_cast<std::size_t>(n) + 1, 0.0L);
    ld jp1 = 0.0L, jc = 1e-30L, sum = 0.0L;
    for (int k = start; k >= 0; --k) {
        const ld jm1 = (2.0L * (k + 1) / x) * jc - jp1;
        jp1 = jc;
        jc = jm1;
        if (k <= n) j[static_cast<std::size_t>(k)] = jc;
        if (k > 0 && k % 2 == 0) sum += 2.0L * jc;
        if (std::fabs(jc) > 1e280L) {
            // rescale to avoid overflow
            jp1 /= 1e280L;
            jc /= 1e280L;
            sum /= 1e280L;
            for (auto& v : j) v /= 1e280L;
        }
    }
    sum += jc; // jc now holds J_0 candidate
    for (auto& v : j) v /= sum;
    return j;
}

// Series seeds for Y_0, Y_1 (small/moderate x).
void bessel_y01_series(ld x, ld j0, ld j1, ld& y0, ld& y1) {
    const ld q = x * x / 4.0L;
    const ld lg = std::log(x / 2.0L) + euler_gamma_l;

    ld term = 1.0L, hk = 0.0L, s0 = 0.0L;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<ld>(k) * k);
        hk += 1.0L / k;
        const ld add = ((k % 2) ? hk : -hk) * term;
        s0 += add;
        if (std::fabs(add) < 1e-24L * (std::fabs(s0) + 1e-30L)) break;
    }
    y0 = (2.0L / pi_l) * (lg * j0 + s0);

    // Y_1 = (2/pi) ln(x/2) J_1 - 2/(pi x)
    //       - (x/(2 pi)) sum_k (psi(k+1)+psi(k+2)) (-q)^k / (k! (k+1)!)
    ld s1 = 0.0L;
    term = 1.0L; // q^k / (k! (k+1)!) at k=0 is 1
    ld hk1 = 1.0L;
    hk = 0.0L;
    for (int k = 0; k < 200; ++k) {
        if (k > 0) {
            term *= q / (static_cast<ld>(k) * (k + 1));
            hk += 1.0L / k;
            hk1 += 1.0L / (k + 1);
        }
        const ld psi_sum = -2.0L * euler_gamma_l + hk + hk1;
        const ld add = ((k % 2) ? -psi_sum : psi_sum) * term;
        s1 += add;
        if (std::fabs(add) < 1e-24L * (std::fabs(s1) + 1e-30L) && k > 2) break;
    }
    y1 = (2.0L / pi_l) * std::log(x / 2.0L) * j1 - 2.0L / (pi_l * x) -
         (x / (2.0L * pi_l)) * s1;
}

// Hankel asymptotic P/Q expansions, orders 0 and 1, for large x.
// P = 1 - t_2 + t_4 - ..., Q = t_1 - t_3 + ... with
// t_j = t_{j-1} (mu - (2j-1)^2) / (8 j x).
void pq_asym(int n, ld x, ld& p, ld& q) {
    const ld mu = 4.0L * n * n;
    p = 1.0L;
    q = 0.0L;
    ld t = 1.0L, prev = std::numeric_limits<ld>::max();
    for (int j = 1; j < 80; ++j) {
        t *= (mu - (2.0L * j - 1.0L) * (2.0L * j - 1.0L)) / (8.0L * j * x);
        if (std::fabs(t) > prev) break; // divergence onset
        prev = std::fabs(t);
        const int pair = j / 2; // sign (-1)^(j/2): + - - + + - ...
        const ld signed_t = (pair % 2) ? -t : t;
        if (j % 2)
            q += signed_t;
        else
            p += signed_t;
        if (std::fabs(t) < 1e-22L) break;
    }
}

void bessel_y01_asym(ld x, ld& y0, ld& y1) {
    const ld amp = std::sqrt(2.0L / (pi_l * x));
    ld p, q;
    pq_asym(0, x, p, q);
    {
        const ld chi = x - pi_l / 4.0L;
        y0 = amp * (p * std::sin(chi) + q * std::cos(chi));
    }
    pq_asym(1, x, p, q);
    {
        const ld chi = x - 3.0L * pi_l / 4.0L;
        y1 = amp * (p * std::sin(chi) + q * std::cos(chi));
    }
}

// K_0 via Thompson-Barnett continued fraction (x >= 2).
ld bessel_k0_cf2(ld x) {
    const ld eps = 1e-20L;
    ld b = 2.0L * (1.0L + x);
    ld d = 1.0L / b;
    ld h = d, delh = d;
    ld q1 = 0.0L, q2 = 1.0L;
    const ld a1 = 0.25L;
    ld q = a1, c = a1, a = -a1;
    ld s = 1.0L + q * delh;
    for (int i = 2; i < 20000; ++i) {
        a -= 2.0L * (i - 1);
        c = -a * c / i;
        const ld qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0L;
        d = 1.0L / (b + a * d);
        delh = (b * d - 1.0L) * delh;
        h += delh;
        const ld dels = q * delh;
        s += dels;
        if (std::fabs(dels / s) < eps) break;
    }
    return std::sqrt(pi_l / (2.0L * x)) * std::exp(-x) / s;
}

ld bessel_k0_series(ld x, ld i0) {
    const ld q = x * x / 4.0L;
    ld term = 1.0L, hk = 0.0L, s = 0.0L;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<ld>(k) * k);
        hk += 1.0L / k;
        s += hk * term;
        if (term * hk < 1e-24L * (std::fabs(s) + 1e-30L)) break;
    }
    return -(std::log(x / 2.0L) + euler_gamma_l) * i0 + s;
}

std::vector<ld> bessel_i_array(int n, ld x) {
    const int start = std::max(n, static_cast<int>(x)) + 24 +
                      static_cast<int>(2.0L * std::sqrt(static_cast<ld>(
                                           std::max(n, static_cast<int>(x)))));
    std::vector<ld> iv(static_cast<std::size_t>(n) + 1, 0.0L);
    ld ip1 = 0.0L, ic = 1e-30L, sum = 0.0L;
    for (int k = start; k >= 0; --k) {
        const ld im1 = (2.0L * (k + 1) / x) * ic + ip1;
        ip1 = ic;
        ic = im1;
        if (k <= n) iv[static_cast<std::size_t>(k)] = ic;
        if (k > 0) sum += 2.0L * ic;
        if (std::fabs(ic) > 1e280L) {
            ip1 /= 1e280L;
            ic /= 1e280L;
            sum /= 1e280L;
            for (auto& v : iv) v /= 1e280L;
        }
    }
    sum += ic;
    const ld norm = std::exp(x) / sum;
    for (auto& v : iv) v *= norm;
    return iv;
}

} // namespace

std::vector<CylPair> cyl_bessel_upto(int mmax, double x, int max_order) {
    check_args(mmax, x, max_order);
    const ld xl = x;
    // Need orders up to mmax+1 for derivatives.
    const auto j = bessel_j_array(mmax + 1, xl);

    ld y0, y1;
    if (x < 12.0)
        bessel_y01_series(xl, j[0], j[1], y0, y1);
    else
        bessel_y01_asym(xl, y0, y1);

    std::vector<ld> y(static_cast<std::size_t>(mmax) + 2);
    y[0] = y0;
    if (mmax + 1 >= 1) y[1] = y1;
    for (int m = 1; m <= mmax; ++m) {
        y[static_cast<std::size_t>(m) + 1] = (2.0L * m / xl) * y[m] - y[m - 1];
        if (std::fabs(y[static_cast<std::size_t>(m) + 1]) >
            std::numeric_limits<double>::max() / 4)
            throw std::range_error("cyl_bessel: Y_m overflow");
    }

    std::vector<CylPair> out(static_cast<std::size_t>(mmax) + 1);
    for (int m = 0; m <= mmax; ++m) {
        CylPair p;
        p.j = static_cast<double>(j[m]);
        p.y = static_cast<double>(y[m]);
        if (m == 0) {
            p.jp = static_cast<double>(-j[1]);
            p.yp = static_cast<double>(-y[1]);
        } else {
            p.jp = static_cast<double>(j[m - 1] - (static_cast<ld>(m) / xl) * j[m]);
            p.yp = static_cast<double>(y[m - 1] - (static_cast<ld>(m) / xl) * y[m]);
        }
        out[static_cast<std::size_t>(m)] = p;
    }
    return out;
}

CylPair cyl_bessel(int m, double x, int max_order) {
    return cyl_bessel_upto(m, x, max_order)[static_cast<std::size_t>(m)];
}

Hankel1 hankel1(int m, double x, int max_order) {
    const int am = std::abs(m);
    const CylPair p = cyl_bessel(am, x, max_order);
    Hankel1 h{cplx(p.j, p.y), cplx(p.jp, p.yp)};
    if (m < 0 && (am % 2)) {
        h.h = -h.h;
        h.hp = -h.hp;
    }
    return h;
}

std::vector<Hankel1> hankel1_upto(int mmax, double x, int max_order) {
    const auto ps = cyl_bessel_upto(mmax, x, max_order);
    std::vector<Hankel1> out(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i)
        out[i] = {cplx(ps[i].j, ps[i].y), cplx(ps[i].jp, ps[i].yp)};
    return out;
}

std::vector<ModPair> mod_bessel_upto(int mmax, double x, int max_order) {
    check_args(mmax, x, max_order);
    const ld xl = x;
    const auto iv = bessel_i_array(mmax + 1, xl);

    ld k0;
    if (x <= 2.0)
        k0 = bessel_k0_series(xl, iv[0]);
    else
        k0 = bessel_k0_cf2(xl);
    // Wronskian I_0 K_1 + I_1 K_0 = 1/x pins K_1.
    const ld k1 = (1.0L / xl - iv[1] * k0) / iv[0];

    std::vector<ld> kv(static_cast<std::size_t>(mmax) + 2);
    kv[0] = k0;
    kv[1] = k1;
    for (int m = 1; m <= mmax; ++m) {
        kv[static_cast<std::size_t>(m) + 1] = kv[m - 1] + (2.0L * m / xl) * kv[m];
        if (std::fabs(kv[static_cast<std::size_t>(m) + 1]) >
            std::numeric_limits<double>::max() / 4)
            throw std::range_error("mod_bessel: K_m overflow");
    }

    std::vector<ModPair> out(static_cast<std::size_t>(mmax) + 1);
    for (int m = 0; m <= mmax; ++m) {
        ModPair p;
        p.i = static_cast<double>(iv[m]);
        p.k = static_cast<double>(kv[m]);
        if (m == 0) {
            p.ip = static_cast<double>(iv[1]);
            p.kp = static_cast<double>(-kv[1]);
        } else {
            p.ip = static_cast<double>(iv[m - 1] - (static_cast<ld>(m) / xl) * iv[m]);
            p.kp = static_cast<double>(-kv[m - 1] - (static_cast<ld>(m) / xl) * kv[m]);
        }
        out[static_cast<std::size_t>(m)] = p;
    }
    return out;
}

ModPair mod_bessel(int m, double x, int max_order) {
    return mod_bessel_upto(m, x, max_order)[static_cast<std::size_t>(m)];
}

} // namespace helmscat
