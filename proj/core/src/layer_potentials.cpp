#include "helmscat/layer_potentials.hpp"

namespace helmscat {

void TransmissionSolver::factorize() {
    const int n = mesh_->node_count();
    // identify interface copies: x[ic] = x[ec] (+ jump offset at solve time);
    // for the 1-harmonic problem additionally pin the outer ring to zero
    std::vector<int> reduced(n, -2);
    for (const auto& [ic, ec] : mesh_->interface_pairs) reduced[ic] = -1;
    for (const int v : ring_pins_) reduced[v] = -1;
    int nr = 0;
    for (int i = 0; i < n; ++i)
        if (reduced[i] == -2) reduced[i] = nr++;

    std::vector<Eigen::Triplet<cplx>> pt;
    pt.reserve(n);
    for (int i = 0; i < n; ++i)
        if (reduced[i] >= 0) pt.emplace_back(i, reduced[i], cplx(1.0, 0.0));
    for (const auto& [ic, ec] : mesh_->interface_pairs)
        pt.emplace_back(ic, reduced[ec], cplx(1.0, 0.0));
    P_.resize(n, nr);
    P_.setFromTriplets(pt.begin(), pt.end());

    Ared_ = P_.transpose() * A_ * P_;
    lu_ = std::make_shared<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>>();
    lu_->analyzePattern(Ared_);
    lu_->factorize(Ared_);
    if (lu_->info() != Eigen::Success)
        throw SolverError(
            "transmission solver: factorization of the truncated problem failed "
            "(the truncated transmission problem should be uniquely solvable)");
}

TransmissionSolver TransmissionSolver::helmholtz(const TransmissionMesh& mesh,
                                                 double k, const DtNForm& dtn) {
    if (!(k > 0.0))
        throw PreconditionError("transmission solver: k must be real positive");
    TransmissionSolver s;
    s.mesh_ = &mesh;
    s.k_ = k;
    s.helmholtz_ = true;
    const auto [K, M] = assemble(mesh, AssemblyRegion::both);
    s.A_ = K.matrix - (k * k) * M.matrix - dtn.scatter(mesh.node_count());
    s.factorize();
    return s;
}

TransmissionSolver TransmissionSolver::one_harmonic(const TransmissionMesh& mesh) {
    TransmissionSolver s;
    s.mesh_ = &mesh;
    s.helmholtz_ = false;
    const auto [K, M] = assemble(mesh, AssemblyRegion::both);
    s.A_ = K.matrix + M.matrix;
    s.ring_pins_ = mesh.outer_ring;
    s.factorize();
    return s;
}

Eigen::VectorXcd TransmissionSolver::solve_raw(const Eigen::VectorXcd& rhs_full,
                                               const TraceVector* jump,
                                               SolveReport* report) const {
    const int n = mesh_->node_count();
    if (rhs_full.size() != n)
        throw PreconditionError("transmission solve: rhs dimension mismatch");
    Eigen::VectorXcd d = Eigen::VectorXcd::Zero(n);
    if (jump) {
        if (jump->v.size() != mesh_->interface_count())
            throw PreconditionError("transmission solve: jump dimension mismatch");
        for (int j = 0; j < mesh_->interface_count(); ++j)
            d(mesh_->interface_pairs[j].first) = jump->v(j);
    }
    const Eigen::VectorXcd bred = P_.transpose() * (rhs_full - A_ * d).eval();
    Eigen::VectorXcd y = lu_->solve(bred);
    y += lu_->solve((bred - Ared_ * y).eval());
    if (report) {
        const double bn = bred.norm();
        report->residual = bn > 0.0 ? (bred - Ared_ * y).norm() / bn : 0.0;
    }
    return P_ * y + d;
}

TransmissionField TransmissionSolver::solve(const TraceVector& f,
                                            const CotraceVector& g) const {
    const int n = mesh_->node_count();
    const int nb = mesh_->interface_count();
    if (f.v.size() != nb || g.v.size() != nb)
        throw PreconditionError("transmission solve: jump dimension mismatch");

    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    for (int j = 0; j < nb; ++j) b(mesh_->interface_pairs[j].second) += g.v(j);

    TransmissionField out;
    out.field.values = solve_raw(b, &f, &out.report);
    out.field.covers_both = true;
    out.field.pde = helmholtz_ ? PdeTag::helmholtz : PdeTag::one_harmonic;
    out.field.k = k_;

    // jump certificates
    const Eigen::VectorXcd r = A_ * out.field.values;
    double terr = 0.0;
    Eigen::VectorXcd ferr(nb);
    for (int j = 0; j < nb; ++j) {
        const auto& [ic, ec] = mesh_->interface_pairs[j];
        terr = std::max(terr,
                        std::abs(out.field.values(ic) - out.field.values(ec) - f.v(j)));
        // interior cotrace r(ic), exterior cotrace -r(ec)
        ferr(j) = r(ic) + r(ec) - g.v(j);
    }
    out.trace_jump_error = terr;
    out.flux_jump_error = ferr.norm() / std::max(1.0, g.v.norm());
    return out;
}

TransmissionField solve_transmission(const TraceVector& f, const CotraceVector& g,
                                     double k, const TransmissionMesh& mesh,
                                     const DtNForm& dtn) {
    return TransmissionSolver::helmholtz(mesh, k, dtn).solve(f, g);
}

TransmissionField single_layer(const TransmissionSolver& solver,
                               const CotraceVector& g) {
    TraceVector zero{Eigen::VectorXcd::Zero(solver.mesh().interface_count())};
    return solver.solve(zero, g);
}

TransmissionField double_layer(const TransmissionSolver& solver,
                               const TraceVector& f) {
    TraceVector mf{-f.v};
    CotraceVector zero{Eigen::VectorXcd::Zero(solver.mesh().interface_count())};
    return solver.solve(mf, zero);
}

TransmissionField harmonic_double_layer(const TransmissionSolver& solver,
                                        const TraceVector& f) {
    if (solver.is_helmholtz())
        throw PreconditionError(
            "harmonic_double_layer requires a one_harmonic solver");
    return double_layer(solver, f);
}

} // namespace helmscat
