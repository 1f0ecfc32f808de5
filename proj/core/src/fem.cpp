#include "helmscat/fem.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

#include "helmscat/specfun.hpp"

namespace helmscat {

std::pair<SesquiForm, SesquiForm> assemble(const TransmissionMesh& mesh,
                                           AssemblyRegion region) {
    const int n = mesh.node_count();
    std::vector<Eigen::Triplet<cplx>> kt, mt;
    kt.reserve(mesh.triangles.size() * 9);
    mt.reserve(mesh.triangles.size() * 9);

    for (const auto& tri : mesh.triangles) {
        if (region == AssemblyRegion::interior && tri.region != Region::interior)
            continue;
        if (region == AssemblyRegion::exterior && tri.region != Region::exterior)
            continue;
        const Vec2 p0 = mesh.nodes[tri.v[0]], p1 = mesh.nodes[tri.v[1]],
                   p2 = mesh.nodes[tri.v[2]];
        const double area = 0.5 * (p1 - p0).cross(p2 - p0);
        const double scale = std::max({(p1 - p0).dot(p1 - p0),
                                       (p2 - p1).dot(p2 - p1),
                                       (p0 - p2).dot(p0 - p2)});
        if (!(area > 1e-14 * scale)) {
            std::ostringstream os;
            os << "degenerate triangle at (" << p0.x << "," << p0.y << ")";
            throw MeshError(os.str());
        }
        // grad of barycentric i = perp(opposite edge) / (2 area)
        const Vec2 e[3] = {p2 - p1, p0 - p2, p1 - p0};
        Vec2 g[3];
        for (int i = 0; i < 3; ++i) g[i] = Vec2{-e[i].y, e[i].x} * (1.0 / (2.0 * area));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                kt.emplace_back(tri.v[i], tri.v[j], cplx(area * g[i].dot(g[j]), 0.0));
                mt.emplace_back(tri.v[i], tri.v[j],
                                cplx(area / 12.0 * (i == j ? 2.0 : 1.0), 0.0));
            }
    }
    SesquiForm K, M;
    K.matrix.resize(n, n);
    M.matrix.resize(n, n);
    K.matrix.setFromTriplets(kt.begin(), kt.end());
    M.matrix.setFromTriplets(mt.begin(), mt.end());
    K.symmetry = SymmetryTag::symmetric;
    M.symmetry = SymmetryTag::symmetric;
    return {std::move(K), std::move(M)};
}

int default_mode_cutoff(double k, double R) {
    return std::max(16, static_cast<int>(std::ceil(k * R)) + 16);
}

namespace {

// phi0(z) = int_0^1 (1-s) e^{-izs} ds,  phi1(z) = int_0^1 s e^{-izs} ds
void edge_weights(double z, cplx& phi0, cplx& phi1) {
    if (std::abs(z) < 0.5) {
        cplx term(1.0, 0.0);
        phi0 = cplx(0.0, 0.0);
        phi1 = cplx(0.0, 0.0);
        for (int nn = 0; nn < 16; ++nn) {
            phi0 += term / static_cast<double>((nn + 1) * (nn + 2));
            phi1 += term / static_cast<double>(nn + 2);
            term *= cplx(0.0, -z) / static_cast<double>(nn + 1);
        }
        return;
    }
    const cplx iz(0.0, z);
    const cplx E = std::exp(-iz);
    const cplx total = (E - 1.0) / (-iz);        // int e^{-izs}
    phi1 = (E * (-iz - 1.0) + 1.0) / (-z * z);
    phi0 = total - phi1;
}

} // namespace

DtNForm assemble_dtn(const TransmissionMesh& mesh, double k, int M) {
    if (mesh.outer_ring.empty())
        throw PreconditionError("assemble_dtn: mesh has no outer ring");
    if (M < 1) throw PreconditionError("assemble_dtn: mode cutoff must be >= 1");
    if (!(k > 0.0)) throw PreconditionError("assemble_dtn: k must be positive");

    DtNForm form;
    form.mode_cutoff = M;
    form.wavenumber = k;
    form.radius = mesh.ball_radius;
    form.ring = mesh.outer_ring;
    const double R = mesh.ball_radius;

    const auto hank = hankel1_upto(M, k * R, std::max(200, M + 1));
    form.d.resize(M + 1);
    for (int m = 0; m <= M; ++m) form.d[m] = k * hank[m].hp / hank[m].h;

    const int nr = static_cast<int>(form.ring.size());
    std::vector<double> theta(nr);
    for (int i = 0; i < nr; ++i) {
        const Vec2 p = mesh.nodes[form.ring[i]];
        theta[i] = std::atan2(p.y, p.x);
        if (theta[i] < 0.0) theta[i] += 2.0 * pi;
    }

    form.B = Eigen::MatrixXcd::Zero(2 * M + 1, nr);
    for (int i = 0; i < nr; ++i) {
        const int j = (i + 1) % nr;
        double dth = theta[(i + 1) % nr] - theta[i];
        if (dth <= 0.0) dth += 2.0 * pi;
        for (int m = -M; m <= M; ++m) {
            cplx phi0, phi1;
            edge_weights(m * dth, phi0, phi1);
            const cplx pre = std::exp(cplx(0.0, -m * theta[i])) * dth / (2.0 * pi);
            form.B(m + M, i) += pre * phi0;
            form.B(m + M, j) += pre * phi1;
        }
    }

    Eigen::VectorXcd D(2 * M + 1);
    for (int m = -M; m <= M; ++m) D(m + M) = form.d[std::abs(m)];
    form.T = 2.0 * pi * R * (form.B.adjoint() * D.asDiagonal() * form.B);
    form.T = 0.5 * (form.T + form.T.transpose()).eval();  // exact complex symmetry
    return form;
}

SpMat DtNForm::scatter(int n) const {
    std::vector<Eigen::Triplet<cplx>> tr;
    const int nr = static_cast<int>(ring.size());
    tr.reserve(static_cast<std::size_t>(nr) * nr);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nr; ++j)
            if (T(i, j) != cplx(0.0, 0.0)) tr.emplace_back(ring[i], ring[j], T(i, j));
    SpMat out(n, n);
    out.setFromTriplets(tr.begin(), tr.end());
    return out;
}

Eigen::VectorXcd solve_linear(const SpMat& system, const Eigen::VectorXcd& rhs,
                              const AffineConstraints& constraints,
                              SolveReport* report) {
    const int n = static_cast<int>(system.rows());
    if (system.cols() != n || rhs.size() != n)
        throw PreconditionError("solve_linear: dimension mismatch");

    // Build prolongation x = P y + d from the constraint ties.
    std::vector<int> reduced(n, -2);  // -2 free-unnumbered, -1 slave
    for (const auto& t : constraints.ties) {
        if (t.slave < 0 || t.slave >= n)
            throw PreconditionError("solve_linear: constraint index out of range");
        reduced[t.slave] = -1;
    }
    for (const auto& t : constraints.ties)
        if (t.master >= 0 && reduced[t.master] == -1)
            throw PreconditionError("solve_linear: constraint master is itself constrained");
    int nr = 0;
    for (int i = 0; i < n; ++i)
        if (reduced[i] == -2) reduced[i] = nr++;

    Eigen::VectorXcd d = Eigen::VectorXcd::Zero(n);
    std::vector<Eigen::Triplet<cplx>> pt;
    pt.reserve(n);
    for (int i = 0; i < n; ++i)
        if (reduced[i] >= 0) pt.emplace_back(i, reduced[i], cplx(1.0, 0.0));
    for (const auto& t : constraints.ties) {
        d(t.slave) = t.offset;
        if (t.master >= 0) pt.emplace_back(t.slave, reduced[t.master], cplx(1.0, 0.0));
    }
    SpMat P(n, nr);
    P.setFromTriplets(pt.begin(), pt.end());

    const SpMat Ared = P.transpose() * system * P;
    const Eigen::VectorXcd bred =
        P.transpose() * (rhs - system * d).eval();

    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(Ared);
    lu.factorize(Ared);
    if (lu.info() != Eigen::Success)
        throw SolverError(
            "sparse LU factorization failed on the eliminated system "
            "(singular truncated problem?)");

    Eigen::VectorXcd y = lu.solve(bred);
    y += lu.solve((bred - Ared * y).eval());  // one refinement step

    if (report) {
        const double bn = bred.norm();
        report->residual = bn > 0.0 ? (bred - Ared * y).norm() / bn : 0.0;
    }
    return P * y + d;
}

} // namespace helmscat
