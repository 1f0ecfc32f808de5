#ifndef HELMSCAT_BOUNDARY_OPS_HPP
#define HELMSCAT_BOUNDARY_OPS_HPP

#include "helmscat/layer_potentials.hpp"

namespace helmscat {

/// Dense boundary operators over the interface DOFs, built column by column
/// from transmission solves (2 n_b solves on one factorization):
///   V  = Tr S_k            (cotrace -> trace)
///   K  = avg Tr D_k        (trace -> trace, Neumann-Poincare)
///   Ks = avg dnu S_k       (cotrace -> cotrace, its adjoint)
///   W  = -dnu D_k          (trace -> cotrace)
struct BoundaryOperatorSet {
    Eigen::MatrixXcd V, K, Kstar, W;
    double k = 0.0;
    /// worst column-wise jump-relation defect (should be solver precision):
    /// Tr^i D - Tr^e D = -I, dnu^i S - dnu^e S = I, and the continuity of
    /// Tr S and dnu D.
    double jump_relation_error = 0.0;
};

BoundaryOperatorSet build_operators(const TransmissionSolver& solver);

/// Normalized operator-norm residuals of the Calderon relations.
struct CalderonReport {
    double quarter_k = 0.0;      // K^2 + V W = I/4
    double quarter_kstar = 0.0;  // Ks^2 + W V = I/4
    double commute_kv = 0.0;     // K V = V Ks
    double commute_wk = 0.0;     // W K = Ks W
    double projector = 0.0;      // (C^i)^2 = C^i with C^i = I/2 + [[-K,V],[W,Ks]]
    double worst() const;
};

CalderonReport calderon_residuals(const BoundaryOperatorSet& ops);

enum class BoundaryEquationKind {
    dirichlet_slp,  // V g = h, data is a trace, returns the density g
    neumann_dlp,    // -W f = h, data is a cotrace, returns the density f
    robin_slp,      // (-I/2 + Ks + S L V) g = h
    robin_dlp       // (-W + S L (I/2 + K)) f = h
};

/// Solves the dense boundary equation. For the robin kinds, `impedance` is
/// the matrix of L over interface traces and `steklov` the intrinsic Gram
/// matrix realizing the B' pairing. Throws SolverError when the estimated
/// condition number exceeds `cond_threshold` (near-resonance).
Eigen::VectorXcd solve_boundary_equation(BoundaryEquationKind kind,
                                         const Eigen::VectorXcd& data,
                                         const BoundaryOperatorSet& ops,
                                         const Eigen::MatrixXcd* impedance = nullptr,
                                         const Eigen::MatrixXd* steklov = nullptr,
                                         double cond_threshold = 1e12);

} // namespace helmscat

#endif
