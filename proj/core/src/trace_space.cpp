#include "helmscat/trace_space.hpp"

#include <Eigen/SparseCholesky>

namespace helmscat {

namespace {

void check_side(const Field& u, Region side) {
    if (!u.covers_both && u.region != side)
        throw PreconditionError("field is not defined on the requested side");
}

} // namespace

TraceVector trace(const TransmissionMesh& mesh, const Field& u, Region side) {
    check_side(u, side);
    TraceVector t;
    t.v.resize(mesh.interface_count());
    for (int i = 0; i < mesh.interface_count(); ++i) {
        const auto& [ic, ec] = mesh.interface_pairs[i];
        t.v(i) = u.values(side == Region::interior ? ic : ec);
    }
    return t;
}

CotraceVector normal_derivative(const TransmissionMesh& mesh, const Field& u,
                                Region side) {
    check_side(u, side);
    if (u.pde == PdeTag::none)
        throw PreconditionError(
            "normal_derivative: field is not flagged as a PDE solution");
    const auto [K, M] = assemble(mesh, side == Region::interior
                                           ? AssemblyRegion::interior
                                           : AssemblyRegion::exterior);
    const cplx coef = u.pde == PdeTag::helmholtz ? -u.k * u.k : cplx(1.0, 0.0);
    const Eigen::VectorXcd r = K.matrix * u.values + coef * (M.matrix * u.values);
    CotraceVector c;
    c.v.resize(mesh.interface_count());
    for (int i = 0; i < mesh.interface_count(); ++i) {
        const auto& [ic, ec] = mesh.interface_pairs[i];
        c.v(i) = (side == Region::interior) ? r(ic) : -r(ec);
    }
    return c;
}

namespace {

// Schur complement of the (-Lap + 1) region form over the interface DOFs.
// `b_ids` are the interface copies of the side, `i_ids` the remaining
// region DOFs kept in the elimination.
Eigen::MatrixXd schur_steklov(const TransmissionMesh& mesh, AssemblyRegion region,
                              const std::vector<int>& b_ids,
                              const std::vector<int>& i_ids) {
    const auto [K, M] = assemble(mesh, region);
    // the form is real-valued; work in real arithmetic
    Eigen::SparseMatrix<double> A = (K.matrix + M.matrix).real();

    const int nb = static_cast<int>(b_ids.size());
    const int ni = static_cast<int>(i_ids.size());
    std::vector<int> where(mesh.node_count(), -1);  // >=0: i-index
    std::vector<int> bwhere(mesh.node_count(), -1);
    for (int i = 0; i < ni; ++i) where[i_ids[i]] = i;
    for (int i = 0; i < nb; ++i) bwhere[b_ids[i]] = i;

    std::vector<Eigen::Triplet<double>> ii, ib;
    Eigen::MatrixXd Abb = Eigen::MatrixXd::Zero(nb, nb);
    for (int c = 0; c < A.outerSize(); ++c) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int cc = static_cast<int>(it.col());
            if (where[r] >= 0 && where[cc] >= 0)
                ii.emplace_back(where[r], where[cc], it.value());
            else if (where[r] >= 0 && bwhere[cc] >= 0)
                ib.emplace_back(where[r], bwhere[cc], it.value());
            else if (bwhere[r] >= 0 && bwhere[cc] >= 0)
                Abb(bwhere[r], bwhere[cc]) += it.value();
        }
    }
    Eigen::SparseMatrix<double> Aii(ni, ni), Aib(ni, nb);
    Aii.setFromTriplets(ii.begin(), ii.end());
    Aib.setFromTriplets(ib.begin(), ib.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.compute(Aii);
    if (ldlt.info() != Eigen::Success)
        throw SolverError("steklov_matrix: interior block factorization failed");
    const Eigen::MatrixXd X = ldlt.solve(Eigen::MatrixXd(Aib));
    Eigen::MatrixXd S = Abb - Eigen::MatrixXd(Aib).transpose() * X;
    S = 0.5 * (S + S.transpose()).eval();
    return S;
}

} // namespace

Eigen::MatrixXd steklov_matrix(const TransmissionMesh& mesh) {
    std::vector<int> b_ids, i_ids;
    std::vector<char> is_b(mesh.node_count(), 0);
    for (const auto& [ic, ec] : mesh.interface_pairs) {
        b_ids.push_back(ic);
        is_b[ic] = 1;
    }
    for (const int v : mesh.region_dofs(Region::interior))
        if (!is_b[v]) i_ids.push_back(v);
    return schur_steklov(mesh, AssemblyRegion::interior, b_ids, i_ids);
}

Eigen::MatrixXd exterior_steklov_matrix(const TransmissionMesh& mesh) {
    std::vector<int> b_ids, i_ids;
    std::vector<char> skip(mesh.node_count(), 0);
    for (const auto& [ic, ec] : mesh.interface_pairs) {
        b_ids.push_back(ec);
        skip[ec] = 1;
    }
    for (const int v : mesh.outer_ring) skip[v] = 1;  // zero Dirichlet at ∂B
    for (const int v : mesh.region_dofs(Region::exterior))
        if (!skip[v]) i_ids.push_back(v);
    return schur_steklov(mesh, AssemblyRegion::exterior, b_ids, i_ids);
}

Eigen::SparseMatrix<double> interface_mass(const TransmissionMesh& mesh) {
    const int nb = mesh.interface_count();
    std::vector<Eigen::Triplet<double>> tr;
    tr.reserve(4 * nb);
    for (int j = 0; j < nb; ++j) {
        const int jn = (j + 1) % nb;
        const Vec2 p = mesh.nodes[mesh.interface_pairs[j].first];
        const Vec2 q = mesh.nodes[mesh.interface_pairs[jn].first];
        const double L = (q - p).norm();
        tr.emplace_back(j, j, L / 3.0);
        tr.emplace_back(jn, jn, L / 3.0);
        tr.emplace_back(j, jn, L / 6.0);
        tr.emplace_back(jn, j, L / 6.0);
    }
    Eigen::SparseMatrix<double> M(nb, nb);
    M.setFromTriplets(tr.begin(), tr.end());
    return M;
}

cplx pairing(const CotraceVector& g, const TraceVector& f) {
    if (g.v.size() != f.v.size())
        throw PreconditionError("pairing: dimension mismatch");
    return f.v.dot(g.v);  // Eigen's dot conjugates the first argument
}

} // namespace helmscat
