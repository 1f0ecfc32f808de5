// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Everything is deterministic; tolerances are pinned here and only
// here.

#include <cmath>
#include <cstdio>
#include <map>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "helmscat/boundary_ops.hpp"
#include "helmscat/impedance_opt.hpp"
#include "helmscat/io.hpp"
#include "helmscat/mie.hpp"
#include "helmscat/specfun.hpp"

using namespace helmscat;

namespace {

int failures = 0;
std::map<int, std::string> lines;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s %2d %-28s %s", ok ? "PASS" : "FAIL", id,
                  name.c_str(), detail.c_str());
    lines[id] = buf;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

struct Lab {
    TransmissionMesh mesh;
    DtNForm dtn;
};

Lab make_lab(const Polyline& obstacle, double R, double h, double k = 2.0) {
    DomainSpec spec;
    spec.obstacle = obstacle;
    spec.ball_radius = R;
    spec.wavenumber = cplx(k, 0.0);
    Lab lab;
    lab.mesh = triangulate(spec, h);
    lab.dtn = assemble_dtn(lab.mesh, k, default_mode_cutoff(k, R));
    return lab;
}

const IncidentField inc_x{{1.0, 0.0}, 2.0};

double ring_error(const Lab& lab, const ExteriorSolution& us,
                  const MieSolution& mie) {
    double num = 0.0, den = 0.0;
    for (const int v : lab.mesh.outer_ring) {
        const cplx exact = mie_scattered(mie, lab.mesh.nodes[v]);
        num += std::norm(us.field.values(v) - exact);
        den += std::norm(exact);
    }
    return std::sqrt(num / den);
}

double far_error(const FarField& ff, const MieSolution& mie) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ff.theta.size(); ++i) {
        const cplx exact = mie_far_field(mie, ff.theta[i]);
        num += std::norm(ff.amplitude(i) - exact);
        den += std::norm(exact);
    }
    return std::sqrt(num / den);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// criteria 1 and 2: Mie equivalence at a = 1, k = 2, R = 3
void mie_equivalence() {
    double trace_coarse = 0.0, far_coarse = 0.0;
    {
        const Lab coarse = make_lab(make_disk(1.0, 0.11), 3.0, 0.05);
        const ExteriorSolution us =
            scattered_field(inc_x, ScatterBc::dirichlet, coarse.mesh, coarse.dtn);
        const MieSolution mie = mie_coefficients(MieBc::dirichlet, 1.0, 2.0);
        trace_coarse = ring_error(coarse, us, mie);
        const FarField ff = far_field(far_field_context(
            us, coarse.mesh, coarse.dtn, FarFieldRoute::dtn_modes));
        far_coarse = far_error(ff, mie);
    }

    const Lab fine = make_lab(make_disk(1.0, 0.055), 3.0, 0.025);
    const MieSolution mie = mie_coefficients(MieBc::dirichlet, 1.0, 2.0);
    const ExteriorSolution us =
        scattered_field(inc_x, ScatterBc::dirichlet, fine.mesh, fine.dtn);
    const double trace_fine = ring_error(fine, us, mie);
    const FarField ff = far_field(
        far_field_context(us, fine.mesh, fine.dtn, FarFieldRoute::dtn_modes));
    const double far_fine = far_error(ff, mie);
    const double ratio =
        std::min(trace_coarse / trace_fine, far_coarse / far_fine);
    report(1, "mie equivalence dirichlet",
           trace_fine <= 0.02 && far_fine <= 0.02 && ratio >= 3.0,
           "trace " + fmt(trace_fine) + ", far " + fmt(far_fine) +
               " (tol 0.02); h-refinement ratio " + fmt(ratio) + " (>= 3)");

    // criterion 2 on the same fine discretisation
    const Eigen::MatrixXd S = steklov_matrix(fine.mesh);
    const ImpedanceSpec L = ImpedanceSpec::constant(cplx(1.0, 0.5));
    const ExteriorSolution ur = scattered_field(inc_x, ScatterBc::robin,
                                                fine.mesh, fine.dtn, &L, &S);
    const MieSolution mier =
        mie_coefficients(MieBc::robin_intrinsic, 1.0, 2.0, cplx(1.0, 0.5));
    const FarField ffr = far_field(
        far_field_context(ur, fine.mesh, fine.dtn, FarFieldRoute::dtn_modes));
    const double far_robin = far_error(ffr, mier);

    // lambda = 0 byte-matches the neumann run through the file format
    const ImpedanceSpec L0 = ImpedanceSpec::constant(cplx(0.0, 0.0));
    const ExteriorSolution u0 = scattered_field(inc_x, ScatterBc::robin,
                                                fine.mesh, fine.dtn, &L0, &S);
    const ExteriorSolution un =
        scattered_field(inc_x, ScatterBc::neumann, fine.mesh, fine.dtn);
    std::filesystem::create_directories("acceptance_tmp");
    write_far_field_csv("acceptance_tmp/robin0.csv",
                        far_field(far_field_context(u0, fine.mesh, fine.dtn,
                                                    FarFieldRoute::dtn_modes)));
    write_far_field_csv("acceptance_tmp/neumann.csv",
                        far_field(far_field_context(un, fine.mesh, fine.dtn,
                                                    FarFieldRoute::dtn_modes)));
    const bool bytes = slurp("acceptance_tmp/robin0.csv") ==
                       slurp("acceptance_tmp/neumann.csv");
    report(2, "mie equivalence robin", far_robin <= 0.02 && bytes,
           "far " + fmt(far_robin) + " (tol 0.02); lambda=0 byte-match " +
               (bytes ? "yes" : "NO"));
}

// criteria 3 and 4 on the shared coarse disk lab
void jump_and_green(const Lab& lab) {
    const TransmissionSolver solver =
        TransmissionSolver::helmholtz(lab.mesh, 2.0, lab.dtn);
    std::mt19937 rng(12345);
    std::normal_distribution<double> gauss;
    const int nb = lab.mesh.interface_count();
    double worst_jump = 0.0, worst_green = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        TraceVector f;
        CotraceVector g;
        f.v.resize(nb);
        g.v.resize(nb);
        for (int i = 0; i < nb; ++i) {
            f.v(i) = cplx(gauss(rng), gauss(rng));
            g.v(i) = cplx(gauss(rng), gauss(rng));
        }
        const TransmissionField Sg = single_layer(solver, g);
        const TransmissionField Df = double_layer(solver, f);
        worst_jump = std::max(
            {worst_jump,
             Sg.trace_jump_error / f.v.lpNorm<Eigen::Infinity>(),
             Sg.flux_jump_error,
             Df.trace_jump_error / f.v.lpNorm<Eigen::Infinity>(),
             Df.flux_jump_error});
        const TransmissionField Gu = solver.solve(f, g);
        worst_green = std::max(
            worst_green,
            (Gu.field.values - (Sg.field.values - Df.field.values)).norm() /
                Gu.field.values.norm());
    }
    report(3, "jump relations", worst_jump <= 1e-10,
           "worst relative defect " + fmt(worst_jump) + " (tol 1e-10)");
    report(4, "green third identity", worst_green <= 1e-10,
           "worst relative residual " + fmt(worst_green) + " (tol 1e-10)");
}

bool calderon_pair(const CalderonReport& coarse, const CalderonReport& fine,
                   std::string& detail) {
    // the variational realisation satisfies the relations to rounding at
    // every h, so the refinement comparison carries a floor at solver
    // precision: residual(h/2) <= max(0.6 residual(h), 1e-12)
    const double rc[4] = {coarse.quarter_k, coarse.quarter_kstar,
                          coarse.commute_kv, coarse.commute_wk};
    const double rf[4] = {fine.quarter_k, fine.quarter_kstar, fine.commute_kv,
                          fine.commute_wk};
    bool ok = true;
    for (int i = 0; i < 4; ++i) {
        if (!std::isfinite(rc[i]) || !std::isfinite(rf[i])) ok = false;
        else if (rf[i] > std::max(0.6 * rc[i], 1e-12)) ok = false;
    }
    detail = "h: " + fmt(coarse.worst()) + " -> h/2: " + fmt(fine.worst());
    return ok;
}

// shared fine-disk operator build feeds criteria 5 (disk part) and 7
void calderon_and_spectrum(const Lab& coarse_disk) {
    const TransmissionSolver cs =
        TransmissionSolver::helmholtz(coarse_disk.mesh, 2.0, coarse_disk.dtn);
    const CalderonReport disk_coarse = calderon_residuals(build_operators(cs));

    const Lab fine = make_lab(make_disk(1.0, 0.055), 2.0, 0.025);
    const TransmissionSolver fs =
        TransmissionSolver::helmholtz(fine.mesh, 2.0, fine.dtn);
    const BoundaryOperatorSet fine_ops = build_operators(fs);
    const CalderonReport disk_fine = calderon_residuals(fine_ops);

    std::string d1, d2;
    const bool disk_ok = calderon_pair(disk_coarse, disk_fine, d1);

    bool koch_ok = false;
    {
        const Polyline koch = generate_prefractal(PrefractalKind::koch, 2,
                                                  make_square(1.0));
        const Lab kc = make_lab(koch, 1.6, 0.05);
        const TransmissionSolver ks =
            TransmissionSolver::helmholtz(kc.mesh, 2.0, kc.dtn);
        const CalderonReport koch_coarse = calderon_residuals(build_operators(ks));
        const Lab kf = make_lab(koch, 1.6, 0.035);
        const TransmissionSolver kfs =
            TransmissionSolver::helmholtz(kf.mesh, 2.0, kf.dtn);
        const CalderonReport koch_fine = calderon_residuals(build_operators(kfs));
        koch_ok = calderon_pair(koch_coarse, koch_fine, d2);
    }
    report(5, "calderon relations", disk_ok && koch_ok,
           "disk " + d1 + "; koch-2 " + d2 +
               " (floor max(0.6 r, 1e-12))");

    // criterion 7: V_k eigenvalues on Fourier modes at h = a/40
    const auto cyl = cyl_bessel_upto(8, 2.0);
    const Eigen::SparseMatrix<double> Mb = interface_mass(fine.mesh);
    double worst = 0.0;
    for (int m = 0; m <= 8; ++m) {
        Eigen::VectorXcd em(fine.mesh.interface_count());
        for (int j = 0; j < fine.mesh.interface_count(); ++j) {
            const Vec2 p = fine.mesh.nodes[fine.mesh.interface_pairs[j].first];
            em(j) = std::exp(cplx(0.0, m * std::atan2(p.y, p.x)));
        }
        const Eigen::VectorXcd Vg = fine_ops.V * (Mb.cast<cplx>() * em);
        const cplx lam = cplx(0.0, pi / 2.0) * cyl[m].j * cplx(cyl[m].j, cyl[m].y);
        worst = std::max(worst,
                         (Vg - lam * em).norm() / (std::abs(lam) * em.norm()));
    }
    report(7, "disk operator spectrum", worst <= 0.05,
           "worst eigenvalue error " + fmt(worst) + " for |m| <= 8 (tol 0.05)");
}

void dtn_sign(const Lab& lab) {
    std::mt19937 rng(777);
    std::normal_distribution<double> gauss;
    const int nr = static_cast<int>(lab.dtn.ring.size());
    double worst = -1e300;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXcd v(nr);
        for (int i = 0; i < nr; ++i) v(i) = cplx(gauss(rng), gauss(rng));
        worst = std::max(worst, (v.dot(lab.dtn.T * v)).real() / v.squaredNorm());
    }
    report(6, "dtn sign", worst <= 1e-12,
           "max Re(v^H T v)/|v|^2 = " + fmt(worst) + " (tol 1e-12)");
}

struct FarData {
    double Q = 0.0;
    double ext = 0.0;
    double route_gap = 0.0;
};

FarData dirichlet_far(const Lab& lab) {
    const ExteriorSolution us =
        scattered_field(inc_x, ScatterBc::dirichlet, lab.mesh, lab.dtn);
    const FarFieldContext ca =
        far_field_context(us, lab.mesh, lab.dtn, FarFieldRoute::density);
    const FarFieldContext cb =
        far_field_context(us, lab.mesh, lab.dtn, FarFieldRoute::dtn_modes);
    const FarField fa = far_field(ca);
    const FarField fb = far_field(cb);
    FarData out;
    out.route_gap = (fa.amplitude - fb.amplitude).norm() / fb.amplitude.norm();
    out.Q = total_far_field_power(fb);
    out.ext = extinction_power(cb, 0.0);
    return out;
}

void far_field_and_optical(const Lab& disk) {
    const FarData dd = dirichlet_far(disk);

    const Polyline koch =
        generate_prefractal(PrefractalKind::koch, 2, make_square(1.0));
    const Lab kl = make_lab(koch, 1.6, 0.05);
    const FarData kd = dirichlet_far(kl);

    report(8, "far-field route agreement",
           dd.route_gap <= 0.02 && kd.route_gap <= 0.02,
           "disk " + fmt(dd.route_gap) + ", koch-2 " + fmt(kd.route_gap) +
               " (tol 0.02)");

    // criterion 9: calibrate the optical-theorem surrogate on the disk, then
    // test it on the prefractals
    const double c = dd.Q / dd.ext;
    const Polyline mink =
        generate_prefractal(PrefractalKind::minkowski, 1, make_square(1.0));
    const Lab ml = make_lab(mink, 1.6, 0.05);
    const FarData md = dirichlet_far(ml);
    const double ek = std::abs(kd.Q - c * kd.ext) / kd.Q;
    const double em = std::abs(md.Q - c * md.ext) / md.Q;
    report(9, "optical theorem surrogate", ek <= 0.03 && em <= 0.03,
           "calibration c = " + fmt(c) + "; koch-2 " + fmt(ek) +
               ", minkowski-1 " + fmt(em) + " (tol 0.03)");
}

void optimisation(const Lab& disk) {
    const Eigen::MatrixXd S = steklov_matrix(disk.mesh);
    const std::vector<std::pair<double, double>> window{
        {pi / 6.0, pi / 3.0}};  // Theta = [30 deg, 60 deg]
    const RobinPowerObjective objective(disk.mesh, disk.dtn, S, inc_x, window);

    ImpedanceClass cls;
    cls.re_lo = -0.5;
    cls.re_hi = 0.5;
    cls.im_lo = 0.0;
    cls.im_hi = 2.0;
    const OptimisationResult r = optimize(cls, objective);

    bool margins_ok = true;
    for (const OptIterate& it : r.trace)
        margins_ok = margins_ok && it.margin >= -1e-10;

    double oracle = -1.0;
    for (int i = 0; i < 41; ++i)
        for (int j = 0; j < 41; ++j) {
            const cplx lam(-0.5 + 1.0 * i / 40.0, 2.0 * j / 40.0);
            oracle =
                std::max(oracle, objective(ImpedanceSpec::constant(lam)));
        }
    report(10, "optimisation correctness",
           margins_ok && r.best_Q >= 0.99 * oracle,
           "best Q " + fmt(r.best_Q) + " vs 41x41 oracle " + fmt(oracle) +
               " (within 1%); margins " + (margins_ok ? "ok" : "VIOLATED"));

    // criterion 12: repeated runs produce identical traces
    const OptimisationResult r2 = optimize(cls, objective);
    bool same = r.trace.size() == r2.trace.size() &&
                r.best_Q == r2.best_Q &&
                (r.best_lambda - r2.best_lambda).norm() == 0.0;
    for (std::size_t i = 0; same && i < r.trace.size(); ++i)
        same = r.trace[i].Q == r2.trace[i].Q &&
               (r.trace[i].lambda - r2.trace[i].lambda).norm() == 0.0 &&
               r.trace[i].phase == r2.trace[i].phase;
    report(12, "reproducibility", same,
           same ? "two optimize runs identical bit for bit"
                : "traces differ between runs");
}

void specfun_residuals() {
    double worst = 0.0;
    for (const double x : {0.3, 0.7, 1.0, 2.0, 3.5, 6.0, 10.0, 20.0, 40.0}) {
        const auto cp = cyl_bessel_upto(30, x);
        const double w_exact = 2.0 / (pi * x);
        for (int m = 0; m <= 30; ++m) {
            worst = std::max(worst, std::abs(cp[m].j * cp[m].yp -
                                             cp[m].jp * cp[m].y - w_exact) /
                                        w_exact);
            if (m >= 1 && m + 1 <= 30) {
                // recurrence J_{m-1} + J_{m+1} = (2m/x) J_m, scaled by the
                // dominant term
                const double lhs = cp[m - 1].j + cp[m + 1].j;
                const double rhs = 2.0 * m / x * cp[m].j;
                const double scale = std::max(
                    {std::abs(cp[m - 1].j), std::abs(cp[m + 1].j),
                     std::abs(rhs), 1e-300});
                worst = std::max(worst, std::abs(lhs - rhs) / scale);
            }
        }
        const auto mp = mod_bessel_upto(30, x);
        for (int m = 0; m <= 30; ++m) {
            // I_m(x) K'_m(x) - I'_m(x) K_m(x) = -1/x
            const double w = mp[m].i * mp[m].kp - mp[m].ip * mp[m].k;
            worst = std::max(worst, std::abs(w + 1.0 / x) * x);
        }
    }
    report(11, "special functions", worst <= 1e-11,
           "worst Wronskian/recurrence residual " + fmt(worst) +
               " (tol 1e-11)");
}

} // namespace

int main() {
    std::printf("acceptance gate (12 criteria)\n");
    mie_equivalence();

    const Lab disk = make_lab(make_disk(1.0, 0.11), 2.0, 0.05);
    jump_and_green(disk);
    calderon_and_spectrum(disk);
    dtn_sign(disk);
    far_field_and_optical(disk);
    optimisation(disk);
    specfun_residuals();

    for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
    std::printf(failures == 0 ? "all criteria passed\n"
                              : "%d criteria FAILED\n",
                failures);
    return failures == 0 ? 0 : 1;
}
