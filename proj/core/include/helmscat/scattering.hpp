#ifndef HELMSCAT_SCATTERING_HPP
#define HELMSCAT_SCATTERING_HPP

#include <utility>
#include <vector>

#include "helmscat/trace_space.hpp"

namespace helmscat {

/// Plane wave e^{ik d.x}; traces and fluxes on the obstacle boundary are
/// computed from the closed form, not from a meshed field.
struct IncidentField {
    Vec2 direction{1.0, 0.0};
    double k = 1.0;

    cplx value(const Vec2& p) const;
    /// nodal values at the interface nodes (pair order)
    Eigen::VectorXcd interface_trace(const TransmissionMesh& mesh) const;
    /// cotrace coefficients of dnu u^i (normal out of the obstacle),
    /// per-edge Gauss quadrature against the boundary hat functions
    Eigen::VectorXcd interface_flux(const TransmissionMesh& mesh) const;
};

/// Multiplication impedance over the interface trace DOFs: a constant or a
/// nodal (interpolated Lipschitz) coefficient, realized as a diagonal matrix.
struct ImpedanceSpec {
    static ImpedanceSpec constant(cplx lambda);
    static ImpedanceSpec nodal(const Eigen::VectorXcd& values);

    bool is_constant = true;
    cplx lambda{0.0, 0.0};
    Eigen::VectorXcd values;  // nodal kind only

    Eigen::VectorXcd diagonal(int nb) const;
    Eigen::MatrixXcd matrix(int nb) const;
};

enum class ScatterBc { dirichlet, neumann, robin };

struct ExteriorSolution {
    Field field;  // exterior-region values, zero elsewhere
    SolveReport report;
};

/// Exterior solve on the truncated annulus with the DtN condition at the ring.
/// `data` is a nodal trace (dirichlet) or cotrace coefficients (neumann,
/// robin). The robin condition dnu u + L_B Tr u = h uses the intrinsic pairing
/// realized by the Steklov matrix: the boundary term is -(Tr v)^H S L (Tr u).
ExteriorSolution solve_exterior(ScatterBc bc, const Eigen::VectorXcd& data,
                                double k, const TransmissionMesh& mesh,
                                const DtNForm& dtn,
                                const ImpedanceSpec* L = nullptr,
                                const Eigen::MatrixXd* steklov = nullptr);

/// Scattered-field problem: the right-hand side is assembled from the incident
/// field so that the total field satisfies the homogeneous condition.
ExteriorSolution scattered_field(const IncidentField& inc, ScatterBc bc,
                                 const TransmissionMesh& mesh, const DtNForm& dtn,
                                 const ImpedanceSpec* L = nullptr,
                                 const Eigen::MatrixXd* steklov = nullptr);

enum class FarFieldRoute { density, dtn_modes };

/// Everything needed to evaluate u_inf at arbitrary angles, for either route:
/// (a) density: the flux jump of u^s (after an interior Dirichlet extension)
///     paired against the far-field kernel pattern;
/// (b) dtn_modes: Fourier analysis of u^s on the ring divided by H_m(kR).
struct FarFieldContext {
    FarFieldRoute route = FarFieldRoute::density;
    double k = 0.0;
    Eigen::VectorXcd q;       // density route: jump cotrace
    std::vector<Vec2> y;      // density route: interface node positions
    Eigen::VectorXcd c;       // mode route: modal coefficients, m = -M..M
    cplx at(double theta) const;
};

FarFieldContext far_field_context(const ExteriorSolution& us,
                                  const TransmissionMesh& mesh,
                                  const DtNForm& dtn, FarFieldRoute route);

/// Far-field samples with the convention u^s ~ e^{ikr} r^{-1/2} u_inf(theta).
struct FarField {
    std::vector<double> theta;  // uniform grid on [0, 2pi)
    Eigen::VectorXcd amplitude;
    FarFieldRoute route = FarFieldRoute::density;
    double k = 0.0;
};

FarField far_field(const FarFieldContext& ctx, int n_angles = 360);

/// Trapezoid quadrature of |u_inf|^2 over a union of angular intervals
/// (subsets of [0, 2pi)) on the far-field grid.
double far_field_power(const FarField& ff,
                       const std::vector<std::pair<double, double>>& intervals);

/// Full-circle power (total scattering cross-section quantity).
double total_far_field_power(const FarField& ff);

/// Extinction estimate from the forward amplitude (2D optical theorem):
/// sigma = -sqrt(8 pi / k) Re(e^{i pi/4} u_inf(theta_d)).
double extinction_power(const FarFieldContext& ctx, double theta_d);

} // namespace helmscat

#endif
