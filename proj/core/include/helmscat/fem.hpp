#ifndef HELMSCAT_FEM_HPP
#define HELMSCAT_FEM_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <utility>
#include <vector>

#include "helmscat/mesh.hpp"

namespace helmscat {

using SpMat = Eigen::SparseMatrix<cplx>;

enum class SymmetryTag { symmetric, hermitian, none };

struct SesquiForm {
    SpMat matrix;  // over all mesh DOFs; entries only on the requested region
    SymmetryTag symmetry = SymmetryTag::none;
};

enum class AssemblyRegion { interior, exterior, both };

/// Exact P1 stiffness and mass integrals per triangle, restricted to the
/// triangles of the region. Both matrices are sized over all mesh DOFs.
std::pair<SesquiForm, SesquiForm> assemble(const TransmissionMesh& mesh,
                                           AssemblyRegion region);

/// Truncated DtN map on the outer ring: T = 2piR B^H D B with
/// d_m = k H'_m(kR)/H_m(kR). The variational contribution is -T.
struct DtNForm {
    int mode_cutoff = 0;
    double wavenumber = 0.0;
    double radius = 0.0;
    std::vector<cplx> d;       // d_m for m = 0..M (d_{-m} = d_m)
    Eigen::MatrixXcd T;        // dense, ring-ordered
    std::vector<int> ring;     // mesh node ids, same order as T
    Eigen::MatrixXcd B;        // (2M+1) x n_ring, rows m = -M..M

    /// T placed at ring DOF positions of an n x n sparse matrix.
    SpMat scatter(int n) const;
};

int default_mode_cutoff(double k, double R);

DtNForm assemble_dtn(const TransmissionMesh& mesh, double k, int M);

/// Affine DOF constraints, eliminated by substitution before factorisation:
/// master < 0 pins x[slave] = offset, otherwise x[slave] = x[master] + offset.
struct AffineConstraints {
    struct Tie {
        int slave;
        int master;  // must itself be unconstrained
        cplx offset;
    };
    std::vector<Tie> ties;
    bool empty() const { return ties.empty(); }
};

struct SolveReport {
    double residual = 0.0;  // ||Ax - b|| / ||b|| on the eliminated system
};

/// Direct sparse LU with fill-reducing ordering and one step of iterative
/// refinement. Throws SolverError on singular factorisation.
Eigen::VectorXcd solve_linear(const SpMat& system, const Eigen::VectorXcd& rhs,
                              const AffineConstraints& constraints = {},
                              SolveReport* report = nullptr);

} // namespace helmscat

#endif
