#include "helmscat/scattering.hpp"

#include <cmath>

#include "helmscat/specfun.hpp"

namespace helmscat {

cplx IncidentField::value(const Vec2& p) const {
    return std::exp(cplx(0.0, k * direction.dot(p)));
}

Eigen::VectorXcd IncidentField::interface_trace(const TransmissionMesh& mesh) const {
    Eigen::VectorXcd t(mesh.interface_count());
    for (int j = 0; j < mesh.interface_count(); ++j)
        t(j) = value(mesh.nodes[mesh.interface_pairs[j].first]);
    return t;
}

Eigen::VectorXcd IncidentField::interface_flux(const TransmissionMesh& mesh) const {
    const int nb = mesh.interface_count();
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(nb);
    // 4-point Gauss-Legendre on [0, 1]
    static const double gx[4] = {0.0694318442029737, 0.3300094782075719,
                                 0.6699905217924281, 0.9305681557970263};
    static const double gw[4] = {0.1739274225687269, 0.3260725774312731,
                                 0.3260725774312731, 0.1739274225687269};
    for (int j = 0; j < nb; ++j) {
        const int jn = (j + 1) % nb;
        const Vec2 p = mesh.nodes[mesh.interface_pairs[j].first];
        const Vec2 q = mesh.nodes[mesh.interface_pairs[jn].first];
        const Vec2 e = q - p;
        const double len = e.norm();
        // counter-clockwise boundary: outward normal is the edge rotated by -90
        const Vec2 nu{e.y / len, -e.x / len};
        const cplx dn_fac = cplx(0.0, k * direction.dot(nu));
        for (int g = 0; g < 4; ++g) {
            const Vec2 x{p.x + gx[g] * e.x, p.y + gx[g] * e.y};
            const cplx f = dn_fac * value(x) * gw[g] * len;
            c(j) += (1.0 - gx[g]) * f;
            c(jn) += gx[g] * f;
        }
    }
    return c;
}

ImpedanceSpec ImpedanceSpec::constant(cplx lambda) {
    ImpedanceSpec s;
    s.is_constant = true;
    s.lambda = lambda;
    return s;
}

ImpedanceSpec ImpedanceSpec::nodal(const Eigen::VectorXcd& values) {
    ImpedanceSpec s;
    s.is_constant = false;
    s.values = values;
    return s;
}

Eigen::VectorXcd ImpedanceSpec::diagonal(int nb) const {
    if (is_constant) return Eigen::VectorXcd::Constant(nb, lambda);
    if (values.size() != nb)
        throw PreconditionError("impedance: nodal value count mismatch");
    return values;
}

Eigen::MatrixXcd ImpedanceSpec::matrix(int nb) const {
    return diagonal(nb).asDiagonal();
}

ExteriorSolution solve_exterior(ScatterBc bc, const Eigen::VectorXcd& data,
                                double k, const TransmissionMesh& mesh,
                                const DtNForm& dtn, const ImpedanceSpec* L,
                                const Eigen::MatrixXd* steklov) {
    const int n = mesh.node_count();
    const int nb = mesh.interface_count();
    if (data.size() != nb)
        throw PreconditionError("solve_exterior: data dimension mismatch");
    if (bc == ScatterBc::robin && (!L || !steklov))
        throw PreconditionError(
            "solve_exterior: robin needs the impedance and Steklov matrices");
    if (!(k > 0.0)) throw PreconditionError("solve_exterior: k must be positive");

    const auto [K, M] = assemble(mesh, AssemblyRegion::exterior);
    SpMat A = K.matrix - (k * k) * M.matrix - dtn.scatter(n);

    AffineConstraints con;
    std::vector<char> ext(n, 0);
    for (const int v : mesh.region_dofs(Region::exterior)) ext[v] = 1;
    for (int i = 0; i < n; ++i)
        if (!ext[i]) con.ties.push_back({i, -1, cplx(0.0, 0.0)});

    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    if (bc == ScatterBc::dirichlet) {
        for (int j = 0; j < nb; ++j)
            con.ties.push_back({mesh.interface_pairs[j].second, -1, data(j)});
    } else {
        for (int j = 0; j < nb; ++j) b(mesh.interface_pairs[j].second) = -data(j);
        if (bc == ScatterBc::robin && !L->diagonal(nb).isZero(0.0)) {
            // boundary term -(Tr v)^H S L (Tr u); an identically zero
            // impedance is skipped entirely so the run degenerates to the
            // Neumann one bit for bit
            const Eigen::MatrixXcd SL =
                steklov->cast<cplx>() * L->diagonal(nb).asDiagonal();
            std::vector<Eigen::Triplet<cplx>> tr;
            tr.reserve(static_cast<std::size_t>(nb) * nb);
            for (int r = 0; r < nb; ++r)
                for (int cidx = 0; cidx < nb; ++cidx)
                    tr.emplace_back(mesh.interface_pairs[r].second,
                                    mesh.interface_pairs[cidx].second,
                                    -SL(r, cidx));
            SpMat Rob(n, n);
            Rob.setFromTriplets(tr.begin(), tr.end());
            A += Rob;
        }
    }

    ExteriorSolution out;
    out.field.values = solve_linear(A, b, con, &out.report);
    out.field.region = Region::exterior;
    out.field.covers_both = false;
    out.field.pde = PdeTag::helmholtz;
    out.field.k = k;
    return out;
}

ExteriorSolution scattered_field(const IncidentField& inc, ScatterBc bc,
                                 const TransmissionMesh& mesh, const DtNForm& dtn,
                                 const ImpedanceSpec* L,
                                 const Eigen::MatrixXd* steklov) {
    const int nb = mesh.interface_count();
    Eigen::VectorXcd data;
    switch (bc) {
        case ScatterBc::dirichlet:
            data = -inc.interface_trace(mesh);
            break;
        case ScatterBc::neumann:
            data = -inc.interface_flux(mesh);
            break;
        case ScatterBc::robin: {
            if (!L || !steklov)
                throw PreconditionError(
                    "scattered_field: robin needs the impedance and Steklov "
                    "matrices");
            if (L->diagonal(nb).isZero(0.0)) {
                data = -inc.interface_flux(mesh);  // exact Neumann degeneration
            } else {
                data = -(inc.interface_flux(mesh) +
                         steklov->cast<cplx>() * (L->diagonal(nb).asDiagonal() *
                                                  inc.interface_trace(mesh)));
            }
            break;
        }
    }
    return solve_exterior(bc, data, inc.k, mesh, dtn, L, steklov);
}

cplx FarFieldContext::at(double theta) const {
    if (route == FarFieldRoute::density) {
        const Vec2 dir{std::cos(theta), std::sin(theta)};
        // F(theta, y) = (1/4pi) e^{i pi/4} sqrt(2 pi / k) e^{-ik theta.y}
        const cplx pre = 0.25 / pi * std::sqrt(2.0 * pi / k) *
                         std::exp(cplx(0.0, pi / 4.0));
        cplx s(0.0, 0.0);
        for (int j = 0; j < q.size(); ++j)
            s += q(j) * std::exp(cplx(0.0, -k * (dir.x * y[j].x + dir.y * y[j].y)));
        return pre * s;
    }
    const int M = (static_cast<int>(c.size()) - 1) / 2;
    cplx s(0.0, 0.0);
    const cplx mi(0.0, -1.0);
    for (int m = -M; m <= M; ++m) {
        cplx ph(1.0, 0.0);
        for (int j = 0; j < std::abs(m); ++j) ph *= mi;
        s += c(m + M) * ph * std::exp(cplx(0.0, m * theta));
    }
    return std::sqrt(2.0 / (pi * k)) * std::exp(cplx(0.0, -pi / 4.0)) * s;
}

FarFieldContext far_field_context(const ExteriorSolution& us,
                                  const TransmissionMesh& mesh,
                                  const DtNForm& dtn, FarFieldRoute route) {
    FarFieldContext ctx;
    ctx.route = route;
    ctx.k = us.field.k.real();
    const int nb = mesh.interface_count();

    if (route == FarFieldRoute::dtn_modes) {
        const int nr = static_cast<int>(dtn.ring.size());
        Eigen::VectorXcd ur(nr);
        for (int i = 0; i < nr; ++i) ur(i) = us.field.values(dtn.ring[i]);
        const Eigen::VectorXcd uhat = dtn.B * ur;  // Fourier coefficients
        const int M = dtn.mode_cutoff;
        const auto hank =
            hankel1_upto(M, ctx.k * dtn.radius, std::max(200, M + 1));
        ctx.c.resize(2 * M + 1);
        for (int m = -M; m <= M; ++m) ctx.c(m + M) = uhat(m + M) / hank[std::abs(m)].h;
        return ctx;
    }

    // interior Dirichlet extension of Tr^e u^s, then the flux jump
    const auto [Ki, Mi] = assemble(mesh, AssemblyRegion::interior);
    const SpMat Ai = Ki.matrix - (ctx.k * ctx.k) * Mi.matrix;
    AffineConstraints con;
    std::vector<char> in(mesh.node_count(), 0);
    for (const int v : mesh.region_dofs(Region::interior)) in[v] = 1;
    const TraceVector tre = trace(mesh, us.field, Region::exterior);
    for (int j = 0; j < nb; ++j) {
        con.ties.push_back({mesh.interface_pairs[j].first, -1, tre.v(j)});
        in[mesh.interface_pairs[j].first] = 2;  // already pinned to the trace
    }
    for (int i = 0; i < mesh.node_count(); ++i)
        if (!in[i]) con.ties.push_back({i, -1, cplx(0.0, 0.0)});

    Field uext;
    uext.values = solve_linear(Ai, Eigen::VectorXcd::Zero(mesh.node_count()), con);
    uext.region = Region::interior;
    uext.covers_both = false;
    uext.pde = PdeTag::helmholtz;
    uext.k = ctx.k;

    const CotraceVector dn_i = normal_derivative(mesh, uext, Region::interior);
    const CotraceVector dn_e = normal_derivative(mesh, us.field, Region::exterior);
    ctx.q = dn_i.v - dn_e.v;
    ctx.y.resize(nb);
    for (int j = 0; j < nb; ++j) ctx.y[j] = mesh.nodes[mesh.interface_pairs[j].first];
    return ctx;
}

FarField far_field(const FarFieldContext& ctx, int n_angles) {
    if (n_angles < 8) throw PreconditionError("far_field: angle grid too small");
    FarField ff;
    ff.route = ctx.route;
    ff.k = ctx.k;
    ff.theta.resize(n_angles);
    ff.amplitude.resize(n_angles);
    for (int i = 0; i < n_angles; ++i) {
        ff.theta[i] = 2.0 * pi * i / n_angles;
        ff.amplitude(i) = ctx.at(ff.theta[i]);
    }
    return ff;
}

double far_field_power(const FarField& ff,
                       const std::vector<std::pair<double, double>>& intervals) {
    const int n = static_cast<int>(ff.theta.size());
    const double dth = 2.0 * pi / n;
    // accumulate per interval (each grid point counted once, at its first
    // containing interval) so that power over disjoint intervals is exactly
    // additive
    std::vector<double> part(intervals.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        for (std::size_t m = 0; m < intervals.size(); ++m)
            if (ff.theta[i] >= intervals[m].first &&
                ff.theta[i] < intervals[m].second) {
                part[m] += std::norm(ff.amplitude(i)) * dth;
                break;
            }
    }
    double Q = 0.0;
    for (const double p : part) Q += p;
    return Q;
}

double total_far_field_power(const FarField& ff) {
    return far_field_power(ff, {{0.0, 2.0 * pi}});
}

double extinction_power(const FarFieldContext& ctx, double theta_d) {
    const cplx fwd = ctx.at(theta_d);
    return -std::sqrt(8.0 * pi / ctx.k) *
           (std::exp(cplx(0.0, pi / 4.0)) * fwd).real();
}

} // namespace helmscat
