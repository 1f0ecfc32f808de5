#ifndef HELMSCAT_TRACE_SPACE_HPP
#define HELMSCAT_TRACE_SPACE_HPP

#include <Eigen/Dense>

#include "helmscat/fem.hpp"
#include "helmscat/field.hpp"

namespace helmscat {

/// Nodal boundary values at interface positions, in arclength order.
struct TraceVector {
    Eigen::VectorXcd v;
};

/// Dual coefficients against the interface nodal basis functions.
struct CotraceVector {
    Eigen::VectorXcd v;
};

/// Reads the interface-copy nodal values of the given side.
TraceVector trace(const TransmissionMesh& mesh, const Field& u, Region side);

/// Weak normal derivative through Green's formula. The field must be a
/// discrete PDE solution on its region (pde tag set); the cotrace reads the
/// region form residual at the interface rows, with both sides using the
/// normal pointing out of the obstacle.
CotraceVector normal_derivative(const TransmissionMesh& mesh, const Field& u,
                                Region side);

/// Interior (-Lap + 1) Schur complement over the interface DOFs: the discrete
/// Poincare-Steklov operator, which doubles as the trace-space Gram matrix.
/// Real symmetric positive definite.
Eigen::MatrixXd steklov_matrix(const TransmissionMesh& mesh);

/// Exterior analogue (zero Dirichlet on the outer ring); defines the
/// equivalent exterior trace norm. Used for reporting only.
Eigen::MatrixXd exterior_steklov_matrix(const TransmissionMesh& mesh);

/// <g, f>_{B',B} = sum_j g_j conj(f_j): linear in g, conjugate-linear in f.
cplx pairing(const CotraceVector& g, const TraceVector& f);

/// 1D P1 mass matrix along the interface polygon (pair order, periodic).
/// Maps nodal boundary values to dual (cotrace) coefficients.
Eigen::SparseMatrix<double> interface_mass(const TransmissionMesh& mesh);

} // namespace helmscat

#endif
