#include "helmscat/boundary_ops.hpp"

#include <Eigen/LU>

namespace helmscat {

namespace {

struct SideData {
    Eigen::VectorXcd tr_i, tr_e, dn_i, dn_e;
};

SideData sides(const TransmissionSolver& solver, const TransmissionField& u) {
    const TransmissionMesh& m = solver.mesh();
    const int nb = m.interface_count();
    const Eigen::VectorXcd r = solver.system() * u.field.values;
    SideData s;
    s.tr_i.resize(nb);
    s.tr_e.resize(nb);
    s.dn_i.resize(nb);
    s.dn_e.resize(nb);
    for (int j = 0; j < nb; ++j) {
        const auto& [ic, ec] = m.interface_pairs[j];
        s.tr_i(j) = u.field.values(ic);
        s.tr_e(j) = u.field.values(ec);
        s.dn_i(j) = r(ic);
        s.dn_e(j) = -r(ec);
    }
    return s;
}

} // namespace

BoundaryOperatorSet build_operators(const TransmissionSolver& solver) {
    const TransmissionMesh& m = solver.mesh();
    const int nb = m.interface_count();
    BoundaryOperatorSet ops;
    ops.k = solver.wavenumber();
    ops.V.resize(nb, nb);
    ops.K.resize(nb, nb);
    ops.Kstar.resize(nb, nb);
    ops.W.resize(nb, nb);

    double defect = 0.0;
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(nb);
    for (int j = 0; j < nb; ++j) {
        e(j) = 1.0;

        const SideData sl = sides(solver, single_layer(solver, CotraceVector{e}));
        ops.V.col(j) = 0.5 * (sl.tr_i + sl.tr_e);
        ops.Kstar.col(j) = 0.5 * (sl.dn_i + sl.dn_e);
        defect = std::max(defect, (sl.tr_i - sl.tr_e).lpNorm<Eigen::Infinity>());
        defect = std::max(defect, (sl.dn_i - sl.dn_e - e).lpNorm<Eigen::Infinity>());

        const SideData dl = sides(solver, double_layer(solver, TraceVector{e}));
        ops.K.col(j) = 0.5 * (dl.tr_i + dl.tr_e);
        ops.W.col(j) = -0.5 * (dl.dn_i + dl.dn_e);
        defect = std::max(defect, (dl.tr_i - dl.tr_e + e).lpNorm<Eigen::Infinity>());
        defect = std::max(defect, (dl.dn_i - dl.dn_e).lpNorm<Eigen::Infinity>());

        e(j) = 0.0;
    }
    ops.jump_relation_error = defect;
    return ops;
}

double CalderonReport::worst() const {
    return std::max({quarter_k, quarter_kstar, commute_kv, commute_wk, projector});
}

CalderonReport calderon_residuals(const BoundaryOperatorSet& ops) {
    const auto& V = ops.V;
    const auto& K = ops.K;
    const auto& Ks = ops.Kstar;
    const auto& W = ops.W;
    const int nb = static_cast<int>(V.rows());
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(nb, nb);

    CalderonReport rep;
    rep.quarter_k = (K * K + V * W - 0.25 * I).norm() /
                    (K.norm() * K.norm() + V.norm() * W.norm() + 0.25 * I.norm());
    rep.quarter_kstar = (Ks * Ks + W * V - 0.25 * I).norm() /
                        (Ks.norm() * Ks.norm() + W.norm() * V.norm() +
                         0.25 * I.norm());
    rep.commute_kv = (K * V - V * Ks).norm() / (2.0 * K.norm() * V.norm());
    rep.commute_wk = (W * K - Ks * W).norm() / (2.0 * W.norm() * K.norm());

    Eigen::MatrixXcd C(2 * nb, 2 * nb);
    C.topLeftCorner(nb, nb) = 0.5 * I - K;
    C.topRightCorner(nb, nb) = V;
    C.bottomLeftCorner(nb, nb) = W;
    C.bottomRightCorner(nb, nb) = 0.5 * I + Ks;
    rep.projector = (C * C - C).norm() / (C.norm() * C.norm() + C.norm());
    return rep;
}

Eigen::VectorXcd solve_boundary_equation(BoundaryEquationKind kind,
                                         const Eigen::VectorXcd& data,
                                         const BoundaryOperatorSet& ops,
                                         const Eigen::MatrixXcd* impedance,
                                         const Eigen::MatrixXd* steklov,
                                         double cond_threshold) {
    const int nb = static_cast<int>(ops.V.rows());
    if (data.size() != nb)
        throw PreconditionError("solve_boundary_equation: data dimension mismatch");
    const bool robin = kind == BoundaryEquationKind::robin_slp ||
                       kind == BoundaryEquationKind::robin_dlp;
    if (robin && (!impedance || !steklov))
        throw PreconditionError(
            "solve_boundary_equation: robin kinds need the impedance and "
            "Steklov matrices");

    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(nb, nb);
    Eigen::MatrixXcd A;
    switch (kind) {
        case BoundaryEquationKind::dirichlet_slp:
            A = ops.V;
            break;
        case BoundaryEquationKind::neumann_dlp:
            A = -ops.W;
            break;
        case BoundaryEquationKind::robin_slp:
            A = -0.5 * I + ops.Kstar +
                steklov->cast<cplx>() * (*impedance) * ops.V;
            break;
        case BoundaryEquationKind::robin_dlp:
            A = -ops.W +
                steklov->cast<cplx>() * (*impedance) * (0.5 * I + ops.K);
            break;
    }

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const Eigen::MatrixXcd inv = lu.inverse();
    const double cond =
        A.cwiseAbs().rowwise().sum().maxCoeff() *
        inv.cwiseAbs().rowwise().sum().maxCoeff();
    if (!(cond < cond_threshold))
        throw SolverError(
            "boundary equation close to an interior resonance (condition "
            "number " + std::to_string(cond) + "); change k or the "
            "formulation");
    return inv * data;
}

} // namespace helmscat
