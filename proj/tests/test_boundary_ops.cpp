#include <doctest.h>

#include <Eigen/LU>
#include <cmath>

#include "helmscat/boundary_ops.hpp"
#include "helmscat/mie.hpp"
#include "helmscat/specfun.hpp"

using namespace helmscat;

namespace {

struct DiskLab {
    TransmissionMesh mesh;
    TransmissionSolver solver;
    BoundaryOperatorSet ops;
};

// unit disk, k = 2, h = 0.05; operators built once and shared
const DiskLab& disk_lab() {
    static const DiskLab lab = [] {
        DomainSpec spec;
        spec.obstacle = make_disk(1.0, 0.11);
        spec.ball_radius = 2.0;
        TransmissionMesh mesh = triangulate(spec, 0.05);
        const DtNForm dtn =
            assemble_dtn(mesh, 2.0, default_mode_cutoff(2.0, mesh.ball_radius));
        TransmissionSolver solver = TransmissionSolver::helmholtz(mesh, 2.0, dtn);
        BoundaryOperatorSet ops = build_operators(solver);
        return DiskLab{std::move(mesh), std::move(solver), std::move(ops)};
    }();
    return lab;
}

Eigen::VectorXcd fourier_mode(const TransmissionMesh& m, int mm) {
    Eigen::VectorXcd em(m.interface_count());
    for (int j = 0; j < m.interface_count(); ++j) {
        const Vec2 p = m.nodes[m.interface_pairs[j].first];
        em(j) = std::exp(cplx(0.0, mm * std::atan2(p.y, p.x)));
    }
    return em;
}

} // namespace

TEST_CASE("jump relations hold column-wise") {
    CHECK(disk_lab().ops.jump_relation_error <= 1e-10);
}

TEST_CASE("K* is the duality adjoint of K; V and W are symmetric") {
    const BoundaryOperatorSet& ops = disk_lab().ops;
    // the bilinear duality adjoint is the plain transpose
    CHECK((ops.Kstar - ops.K.transpose()).norm() <= 1e-10 * ops.K.norm());
    CHECK((ops.V - ops.V.transpose()).norm() <= 1e-10 * ops.V.norm());
    CHECK((ops.W - ops.W.transpose()).norm() <= 1e-10 * ops.W.norm());

    // pairing(g, K conj(f)) = pairing(Kstar g, conj(f)): the conjugation
    // accounts for the pairing's conjugate-linear trace slot
    const TransmissionMesh& m = disk_lab().mesh;
    const Eigen::VectorXcd f = fourier_mode(m, 3) + 0.5 * fourier_mode(m, -1);
    const Eigen::VectorXcd g = fourier_mode(m, -2) + cplx(0.0, 0.3) * fourier_mode(m, 5);
    const cplx lhs = pairing(CotraceVector{g}, TraceVector{(ops.K * f).conjugate()});
    const cplx rhs = pairing(CotraceVector{Eigen::VectorXcd(ops.Kstar * g)},
                             TraceVector{f.conjugate()});
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
}

TEST_CASE("Calderon relations hold to solver precision") {
    const CalderonReport rep = calderon_residuals(disk_lab().ops);
    INFO("quarter_k ", rep.quarter_k, " quarter_kstar ", rep.quarter_kstar,
         " commute_kv ", rep.commute_kv, " commute_wk ", rep.commute_wk,
         " projector ", rep.projector);
    CHECK(rep.worst() <= 1e-12);

    // the quarter relation on the constant trace vector
    const int nb = static_cast<int>(disk_lab().ops.V.rows());
    const Eigen::VectorXcd one = Eigen::VectorXcd::Ones(nb);
    const Eigen::VectorXcd r = disk_lab().ops.K * (disk_lab().ops.K * one) +
                               disk_lab().ops.V * (disk_lab().ops.W * one) -
                               0.25 * one;
    CHECK(r.norm() <= 1e-12 * one.norm());
}

TEST_CASE("Calderon residuals stay at the roundoff floor under refinement") {
    // The variational realization makes the Calderon calculus exact: the
    // residuals are roundoff at every h, so refinement keeps them below the
    // floor rather than shrinking them geometrically.
    DomainSpec spec;
    spec.obstacle = generate_prefractal(PrefractalKind::koch, 2, make_square(1.0));
    spec.ball_radius = 1.6;
    const double k = 2.0;
    double prev = -1.0;
    for (const double h : {0.05, 0.035}) {
        const TransmissionMesh mesh = triangulate(spec, h);
        const DtNForm dtn =
            assemble_dtn(mesh, k, default_mode_cutoff(k, mesh.ball_radius));
        const TransmissionSolver solver = TransmissionSolver::helmholtz(mesh, k, dtn);
        const CalderonReport rep = calderon_residuals(build_operators(solver));
        INFO("koch-2, h = ", h, ": worst residual ", rep.worst());
        CHECK(std::isfinite(rep.worst()));
        if (prev >= 0.0) CHECK(rep.worst() <= std::max(0.6 * prev, 1e-12));
        prev = rep.worst();
    }
}

TEST_CASE("V diagonalizes on disk Fourier modes") {
    const DiskLab& lab = disk_lab();
    const Eigen::SparseMatrix<double> Mb = interface_mass(lab.mesh);
    const auto cyl = cyl_bessel_upto(8, 2.0);
    for (int mm = 0; mm <= 8; ++mm) {
        const Eigen::VectorXcd em = fourier_mode(lab.mesh, mm);
        const Eigen::VectorXcd Vg = lab.ops.V * (Mb.cast<cplx>() * em);
        const cplx lam =
            cplx(0.0, pi / 2.0) * cyl[mm].j * cplx(cyl[mm].j, cyl[mm].y);
        const double err = (Vg - lam * em).norm() / (std::abs(lam) * em.norm());
        INFO("mode ", mm, ": eigenvalue error ", err);
        CHECK(err <= 0.05);
    }
}

TEST_CASE("dirichlet_slp recovers the Mie density") {
    // the first-kind equation amplifies discretization error, so use a finer
    // mesh than the shared one
    DomainSpec spec;
    spec.obstacle = make_disk(1.0, 0.066);
    spec.ball_radius = 2.0;
    const TransmissionMesh m = triangulate(spec, 0.03);
    const DtNForm dtn = assemble_dtn(m, 2.0, default_mode_cutoff(2.0, m.ball_radius));
    const TransmissionSolver solver = TransmissionSolver::helmholtz(m, 2.0, dtn);
    const BoundaryOperatorSet ops = build_operators(solver);
    const MieSolution mie = mie_coefficients(MieBc::dirichlet, 1.0, 2.0);
    const int nb = m.interface_count();

    // V g = -Tr u_inc; the exact density is -dnu u_tot as a cotrace
    Eigen::VectorXcd h(nb), gexact(nb);
    for (int j = 0; j < nb; ++j) {
        const Vec2 p = m.nodes[m.interface_pairs[j].first];
        h(j) = -mie_incident(mie, p);
        gexact(j) = -mie_boundary_flux(mie, std::atan2(p.y, p.x));
    }
    gexact = interface_mass(m).cast<cplx>() * gexact;

    const Eigen::VectorXcd g =
        solve_boundary_equation(BoundaryEquationKind::dirichlet_slp, h, ops);
    const double err = (g - gexact).norm() / gexact.norm();
    INFO("density error ", err);
    CHECK(err <= 0.03);

    // round trip
    CHECK((ops.V * g - h).norm() <= 1e-10 * h.norm());
}

TEST_CASE("robin_slp with L = 0 degenerates to the Neumann-type equation") {
    const DiskLab& lab = disk_lab();
    const int nb = static_cast<int>(lab.ops.V.rows());
    const Eigen::VectorXcd h = fourier_mode(lab.mesh, 2) -
                               cplx(0.0, 0.4) * fourier_mode(lab.mesh, -3);
    const Eigen::MatrixXcd L0 = Eigen::MatrixXcd::Zero(nb, nb);
    const Eigen::MatrixXd S = steklov_matrix(lab.mesh);
    const Eigen::VectorXcd g = solve_boundary_equation(
        BoundaryEquationKind::robin_slp, h, lab.ops, &L0, &S);
    const Eigen::MatrixXcd A =
        -0.5 * Eigen::MatrixXcd::Identity(nb, nb) + lab.ops.Kstar;
    const Eigen::VectorXcd gref = A.partialPivLu().solve(h);
    CHECK((g - gref).norm() <= 1e-10 * gref.norm());
}

TEST_CASE("robin_dlp round trip with a constant impedance") {
    const DiskLab& lab = disk_lab();
    const int nb = static_cast<int>(lab.ops.V.rows());
    const Eigen::VectorXcd h = fourier_mode(lab.mesh, 1);
    const Eigen::MatrixXcd L =
        cplx(0.7, 0.2) * Eigen::MatrixXcd::Identity(nb, nb);
    const Eigen::MatrixXd S = steklov_matrix(lab.mesh);
    const Eigen::VectorXcd f = solve_boundary_equation(
        BoundaryEquationKind::robin_dlp, h, lab.ops, &L, &S);
    const Eigen::MatrixXcd A =
        -lab.ops.W + S.cast<cplx>() * L *
                         (0.5 * Eigen::MatrixXcd::Identity(nb, nb) + lab.ops.K);
    CHECK((A * f - h).norm() <= 1e-10 * h.norm());
}

TEST_CASE("error paths") {
    const DiskLab& lab = disk_lab();
    const int nb = static_cast<int>(lab.ops.V.rows());
    const Eigen::VectorXcd h = Eigen::VectorXcd::Ones(nb);
    CHECK_THROWS_AS(solve_boundary_equation(BoundaryEquationKind::robin_slp, h,
                                            lab.ops),
                    PreconditionError);
    CHECK_THROWS_AS(solve_boundary_equation(BoundaryEquationKind::dirichlet_slp,
                                            h.head(3), lab.ops),
                    PreconditionError);
    // an artificially low condition threshold trips the near-resonance error
    CHECK_THROWS_AS(solve_boundary_equation(BoundaryEquationKind::dirichlet_slp,
                                            h, lab.ops, nullptr, nullptr, 1.0),
                    SolverError);
}
