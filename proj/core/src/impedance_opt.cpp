#include "helmscat/impedance_opt.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "helmscat/specfun.hpp"

namespace helmscat {

FeasibilityReport feasibility(const ImpedanceSpec& L, double k,
                              const Eigen::MatrixXd& steklov,
                              const Eigen::MatrixXd* ext_steklov) {
    if (!(k > 0.0)) throw PreconditionError("feasibility: k must be positive");
    const int nb = static_cast<int>(steklov.rows());
    const Eigen::MatrixXcd SL =
        k * (steklov.cast<cplx>() * L.diagonal(nb).asDiagonal()).eval();
    const Eigen::MatrixXcd H = (SL - SL.adjoint()) / cplx(0.0, 2.0);

    FeasibilityReport rep;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(H,
                                                        Eigen::EigenvaluesOnly);
    rep.dissipativity_margin = eig.eigenvalues().minCoeff();
    rep.dissipative = rep.dissipativity_margin >= -1e-10;

    // ||S^{1/2} L S^{-1/2}||_2 via the spectral square root of the Gram matrix
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> se(steklov);
    const Eigen::MatrixXd sq =
        se.eigenvectors() *
        se.eigenvalues().cwiseSqrt().asDiagonal() *
        se.eigenvectors().transpose();
    const Eigen::MatrixXd isq =
        se.eigenvectors() *
        se.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
        se.eigenvectors().transpose();
    const Eigen::MatrixXcd T =
        sq.cast<cplx>() * L.diagonal(nb).asDiagonal() * isq.cast<cplx>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sv(T.adjoint() * T,
                                                       Eigen::EigenvaluesOnly);
    rep.coercivity_surrogate = std::sqrt(std::max(0.0, sv.eigenvalues().maxCoeff()));

    rep.coercivity_bound = 1.0;
    if (ext_steklov) {
        // generalized problem (S_int + S_ext) f = mu S_int f: mu_min stands in
        // for the inverse-square extension norm
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ge(
            steklov + *ext_steklov, steklov, Eigen::EigenvaluesOnly);
        rep.coercivity_bound = ge.eigenvalues().minCoeff();
    }
    rep.coercivity_surrogate_ok = rep.coercivity_surrogate < rep.coercivity_bound;
    return rep;
}

RobinPowerObjective::RobinPowerObjective(
    const TransmissionMesh& mesh, const DtNForm& dtn,
    const Eigen::MatrixXd& steklov, const IncidentField& inc,
    std::vector<std::pair<double, double>> theta_window, int n_angles)
    : nb_(mesh.interface_count()),
      k_(inc.k),
      arclength_(mesh.interface_arclength),
      S_(steklov),
      window_(std::move(theta_window)),
      n_angles_(n_angles) {
    if (n_angles_ < 8)
        throw PreconditionError("RobinPowerObjective: angle grid too small");
    flux_ = inc.interface_flux(mesh);
    tinc_ = inc.interface_trace(mesh);

    // reduced Neumann system over the exterior DOFs
    const int n = mesh.node_count();
    const auto [K, M] = assemble(mesh, AssemblyRegion::exterior);
    const SpMat A0 = K.matrix - (k_ * k_) * M.matrix - dtn.scatter(n);
    std::vector<int> red(n, -1);
    int nred = 0;
    for (const int v : mesh.region_dofs(Region::exterior)) red[v] = nred++;
    std::vector<Eigen::Triplet<cplx>> tr;
    for (int c = 0; c < A0.outerSize(); ++c)
        for (SpMat::InnerIterator it(A0, c); it; ++it)
            if (red[it.row()] >= 0 && red[it.col()] >= 0)
                tr.emplace_back(red[it.row()], red[it.col()], it.value());
    SpMat Ared(nred, nred);
    Ared.setFromTriplets(tr.begin(), tr.end());
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(Ared);
    lu.factorize(Ared);
    if (lu.info() != Eigen::Success)
        throw SolverError("RobinPowerObjective: Neumann system factorization "
                          "failed (near resonance?)");

    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(nred, nb_);
    for (int j = 0; j < nb_; ++j)
        rhs(red[mesh.interface_pairs[j].second], j) = 1.0;
    const Eigen::MatrixXcd W = lu.solve(rhs);  // A0^{-1} C^T

    E_.resize(nb_, nb_);
    for (int j = 0; j < nb_; ++j)
        E_.row(j) = W.row(red[mesh.interface_pairs[j].second]);
    const int nr = static_cast<int>(dtn.ring.size());
    Zr_.resize(nr, nb_);
    for (int i = 0; i < nr; ++i) Zr_.row(i) = W.row(red[dtn.ring[i]]);

    Bring_ = dtn.B;
    const int Mc = dtn.mode_cutoff;
    const auto hank = hankel1_upto(Mc, k_ * dtn.radius, std::max(200, Mc + 1));
    hinv_.resize(2 * Mc + 1);
    for (int m = -Mc; m <= Mc; ++m) hinv_(m + Mc) = 1.0 / hank[std::abs(m)].h;
    eval_.resize(n_angles_, 2 * Mc + 1);
    const cplx pre =
        std::sqrt(2.0 / (pi * k_)) * std::exp(cplx(0.0, -pi / 4.0));
    for (int i = 0; i < n_angles_; ++i) {
        const double th = 2.0 * pi * i / n_angles_;
        for (int m = -Mc; m <= Mc; ++m) {
            cplx ph(1.0, 0.0);
            for (int j = 0; j < std::abs(m); ++j) ph *= cplx(0.0, -1.0);
            eval_(i, m + Mc) = pre * ph * std::exp(cplx(0.0, m * th));
        }
    }
}

double RobinPowerObjective::operator()(const ImpedanceSpec& L) const {
    const Eigen::VectorXcd d = L.diagonal(nb_);
    const Eigen::MatrixXcd SL = S_.cast<cplx>() * d.asDiagonal();
    const Eigen::VectorXcd h = flux_ + SL * tinc_;
    const Eigen::MatrixXcd A =
        Eigen::MatrixXcd::Identity(nb_, nb_) - E_ * SL;
    const Eigen::VectorXcd y = A.partialPivLu().solve((-E_ * h).eval());
    const Eigen::VectorXcd xr = Zr_ * (SL * y - h).eval();
    const Eigen::VectorXcd amp =
        eval_ * (Bring_ * xr).cwiseProduct(hinv_).eval();

    const double dth = 2.0 * pi / n_angles_;
    double Q = 0.0;
    for (int i = 0; i < n_angles_; ++i) {
        const double th = 2.0 * pi * i / n_angles_;
        for (const auto& [a, b] : window_)
            if (th >= a && th < b) {
                Q += std::norm(amp(i)) * dth;
                break;
            }
    }
    return Q;
}

double RobinPowerObjective::margin(const ImpedanceSpec& L) const {
    const Eigen::MatrixXcd SL =
        k_ * (S_.cast<cplx>() * L.diagonal(nb_).asDiagonal()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
        (SL - SL.adjoint()) / cplx(0.0, 2.0), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

Eigen::VectorXcd RobinPowerObjective::nodal_values(
    const ImpedanceClass& cls, const Eigen::VectorXcd& seg_lambda) const {
    const int ns = cls.segment_count();
    if (seg_lambda.size() != ns)
        throw PreconditionError("nodal_values: segment count mismatch");
    if (ns == 1) return Eigen::VectorXcd::Constant(nb_, seg_lambda(0));
    Eigen::VectorXcd v(nb_);
    for (int j = 0; j < nb_; ++j) {
        const double s = arclength_[j];
        // segment i spans [bp_i, bp_{i+1}) cyclically
        int seg = ns - 1;
        for (int i = 0; i + 1 < ns; ++i)
            if (s >= cls.breakpoints[i] && s < cls.breakpoints[i + 1]) {
                seg = i;
                break;
            }
        if (s < cls.breakpoints[0]) seg = ns - 1;  // wrap-around piece
        v(j) = seg_lambda(seg);
    }
    return v;
}

namespace {

ImpedanceSpec spec_from(const RobinPowerObjective& obj, const ImpedanceClass& cls,
                        const Eigen::VectorXcd& seg_lambda) {
    if (cls.segment_count() == 1) return ImpedanceSpec::constant(seg_lambda(0));
    return ImpedanceSpec::nodal(obj.nodal_values(cls, seg_lambda));
}

Eigen::VectorXcd clamp_to_box(const ImpedanceClass& cls, Eigen::VectorXcd x) {
    for (int i = 0; i < x.size(); ++i)
        x(i) = cplx(std::clamp(x(i).real(), cls.re_lo, cls.re_hi),
                    std::clamp(x(i).imag(), cls.im_lo, cls.im_hi));
    return x;
}

} // namespace

OptimisationResult optimize(const ImpedanceClass& cls,
                            const RobinPowerObjective& objective,
                            const OptSettings& settings) {
    if (cls.re_hi < cls.re_lo || cls.im_hi < cls.im_lo)
        throw PreconditionError("optimize: empty impedance box");
    if (cls.im_lo < 0.0)
        throw PreconditionError(
            "optimize: the class box must keep Im(lambda) >= 0 (dissipativity)");
    const int ns = cls.segment_count();
    const int dim = 2 * ns;

    OptimisationResult res;
    res.best_Q = -1.0;

    auto evaluate = [&](const Eigen::VectorXcd& lam,
                        const std::string& phase) -> double {
        const ImpedanceSpec L = spec_from(objective, cls, lam);
        const double m = objective.margin(L);
        if (m < -1e-10) return -1.0;  // infeasible: rejected, not traced
        const double Q = objective(L);
        res.trace.push_back({lam, Q, m, phase});
        if (Q > res.best_Q) {
            res.best_Q = Q;
            res.best_lambda = lam;
            res.best_margin = m;
        }
        return Q;
    };

    // phase 1: coarse grid (axis count reduced for multi-segment classes so
    // the total stays bounded)
    int g = settings.grid_points;
    while (g > 2 && std::pow(static_cast<double>(g), dim) > 7000.0) --g;
    auto axis = [&](double lo, double hi) {
        std::vector<double> v;
        if (hi <= lo) {
            v.push_back(lo);
            return v;
        }
        for (int i = 0; i < g; ++i)
            v.push_back(lo + (hi - lo) * i / (g - 1));
        return v;
    };
    const std::vector<double> re_ax = axis(cls.re_lo, cls.re_hi);
    const std::vector<double> im_ax = axis(cls.im_lo, cls.im_hi);

    std::vector<int> idx(dim, 0);
    const auto axis_of = [&](int d) -> const std::vector<double>& {
        return (d % 2 == 0) ? re_ax : im_ax;
    };
    bool done = false;
    while (!done) {
        Eigen::VectorXcd lam(ns);
        for (int s = 0; s < ns; ++s)
            lam(s) = cplx(axis_of(2 * s)[idx[2 * s]],
                          axis_of(2 * s + 1)[idx[2 * s + 1]]);
        evaluate(lam, "grid");
        int d = 0;
        for (; d < dim; ++d) {
            if (++idx[d] < static_cast<int>(axis_of(d).size())) break;
            idx[d] = 0;
        }
        done = d == dim;
    }
    if (res.best_Q < 0.0)
        throw PreconditionError("optimize: every grid point of the class is "
                                "infeasible (dissipativity fails)");

    // phase 2: bound-constrained Nelder-Mead from the best grid point
    auto pack = [&](const Eigen::VectorXcd& lam) {
        Eigen::VectorXd x(dim);
        for (int s = 0; s < ns; ++s) {
            x(2 * s) = lam(s).real();
            x(2 * s + 1) = lam(s).imag();
        }
        return x;
    };
    auto unpack = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXcd lam(ns);
        for (int s = 0; s < ns; ++s) lam(s) = cplx(x(2 * s), x(2 * s + 1));
        return clamp_to_box(cls, lam);
    };
    std::vector<int> active;
    const double re_w = cls.re_hi - cls.re_lo, im_w = cls.im_hi - cls.im_lo;
    for (int d = 0; d < dim; ++d)
        if (((d % 2 == 0) ? re_w : im_w) > 0.0) active.push_back(d);
    if (active.empty()) {
        res.termination = "degenerate box";
        return res;
    }

    const int na = static_cast<int>(active.size());
    auto f = [&](const Eigen::VectorXd& x) {
        const double Q = evaluate(unpack(x), "refine");
        return Q < 0.0 ? 1e30 : -Q;  // minimize -Q; infeasible heavily penalized
    };

    std::vector<Eigen::VectorXd> pts(na + 1, pack(res.best_lambda));
    std::vector<double> fv(na + 1);
    for (int i = 0; i < na; ++i) {
        const int d = active[i];
        const double w = ((d % 2 == 0) ? re_w : im_w) / 10.0;
        const double hi = (d % 2 == 0) ? cls.re_hi : cls.im_hi;
        pts[i + 1](d) += (pts[i + 1](d) + w > hi) ? -w : w;
    }
    for (int i = 0; i <= na; ++i) fv[i] = f(pts[i]);

    res.termination = "max iterations";
    for (int it = 0; it < settings.max_iterations; ++it) {
        std::vector<int> ord(na + 1);
        for (int i = 0; i <= na; ++i) ord[i] = i;
        std::stable_sort(ord.begin(), ord.end(),
                         [&](int a, int b) { return fv[a] < fv[b]; });
        std::vector<Eigen::VectorXd> sp;
        std::vector<double> sf;
        for (const int i : ord) {
            sp.push_back(pts[i]);
            sf.push_back(fv[i]);
        }
        pts = sp;
        fv = sf;

        double spread = 0.0;
        for (int i = 1; i <= na; ++i)
            spread = std::max(spread, (pts[i] - pts[0]).lpNorm<Eigen::Infinity>());
        if (spread < settings.tolerance) {
            res.termination = "converged";
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i < na; ++i) centroid += pts[i];
        centroid /= na;

        const Eigen::VectorXd xr = centroid + (centroid - pts[na]);
        const double fr = f(xr);
        if (fr < fv[0]) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[na]);
            const double fe = f(xe);
            if (fe < fr) {
                pts[na] = xe;
                fv[na] = fe;
            } else {
                pts[na] = xr;
                fv[na] = fr;
            }
        } else if (fr < fv[na - 1]) {
            pts[na] = xr;
            fv[na] = fr;
        } else {
            const Eigen::VectorXd xc = centroid + 0.5 * (pts[na] - centroid);
            const double fc = f(xc);
            if (fc < fv[na]) {
                pts[na] = xc;
                fv[na] = fc;
            } else {
                for (int i = 1; i <= na; ++i) {
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
                    fv[i] = f(pts[i]);
                }
            }
        }
    }
    return res;
}

} // namespace helmscat
