#ifndef HELMSCAT_LAYER_POTENTIALS_HPP
#define HELMSCAT_LAYER_POTENTIALS_HPP

#include <Eigen/SparseLU>
#include <memory>

#include "helmscat/trace_space.hpp"

namespace helmscat {

/// Solution of a transmission problem with prescribed trace and flux jumps,
/// with the jump certificates measured at construction.
struct TransmissionField {
    Field field;  // covers both regions over the doubled-DOF mesh
    double trace_jump_error = 0.0;  // max |(u_i - u_e) - f| on the interface
    double flux_jump_error = 0.0;   // ||(c_i - c_e) - g|| / max(1, ||g||)
    SolveReport report;
};

/// Transmission solver over the duplicated-DOF mesh: assembles the region
/// forms (plus the DtN ring term for Helmholtz, or ring Dirichlet for the
/// 1-harmonic problem), identifies the interface copies up to a prescribed
/// jump, and factorizes the reduced system once for many right-hand sides.
class TransmissionSolver {
public:
    static TransmissionSolver helmholtz(const TransmissionMesh& mesh, double k,
                                        const DtNForm& dtn);
    static TransmissionSolver one_harmonic(const TransmissionMesh& mesh);

    /// Solve with trace jump f = u_i - u_e and flux jump g = dnu_i - dnu_e
    /// (both normals pointing out of the obstacle).
    TransmissionField solve(const TraceVector& f, const CotraceVector& g) const;

    /// General reduced solve: arbitrary full-DOF load vector, optional trace
    /// jump. Used for lift-route validation and operator assembly.
    Eigen::VectorXcd solve_raw(const Eigen::VectorXcd& rhs_full,
                               const TraceVector* jump = nullptr,
                               SolveReport* report = nullptr) const;

    const TransmissionMesh& mesh() const { return *mesh_; }
    const SpMat& system() const { return A_; }
    bool is_helmholtz() const { return helmholtz_; }
    double wavenumber() const { return k_; }

private:
    TransmissionSolver() = default;
    void factorize();

    const TransmissionMesh* mesh_ = nullptr;
    double k_ = 0.0;
    bool helmholtz_ = true;
    SpMat A_;   // full doubled-DOF system
    SpMat P_;   // prolongation reduced -> full (interface copies identified)
    SpMat Ared_;
    std::shared_ptr<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>> lu_;
    std::vector<int> ring_pins_;  // one-harmonic only
};

/// One-shot convenience wrapper.
TransmissionField solve_transmission(const TraceVector& f, const CotraceVector& g,
                                     double k, const TransmissionMesh& mesh,
                                     const DtNForm& dtn);

/// S_k g: zero trace jump, flux jump g.
TransmissionField single_layer(const TransmissionSolver& solver,
                               const CotraceVector& g);

/// D_k f: trace jump -f, zero flux jump.
TransmissionField double_layer(const TransmissionSolver& solver,
                               const TraceVector& f);

/// D_i f: the (-Lap + 1) double layer, ring truncated with zero Dirichlet.
/// `solver` must be a one_harmonic solver.
TransmissionField harmonic_double_layer(const TransmissionSolver& solver,
                                        const TraceVector& f);

} // namespace helmscat

#endif
