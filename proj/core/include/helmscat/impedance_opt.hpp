#ifndef HELMSCAT_IMPEDANCE_OPT_HPP
#define HELMSCAT_IMPEDANCE_OPT_HPP

#include <string>

#include "helmscat/scattering.hpp"

namespace helmscat {

/// Admissibility checks for an impedance against the dissipativity and
/// coercivity conditions. Only dissipativity gates; the coercivity check is a
/// discrete surrogate (no computable continuum constant exists) and is
/// reported, not enforced.
struct FeasibilityReport {
    double dissipativity_margin = 0.0;  // lambda_min of Im(kbar S L) as a form
    double coercivity_surrogate = 0.0;  // ||S^{1/2} L S^{-1/2}||_2
    double coercivity_bound = 0.0;      // surrogate for ||E_i||^{-2}
    bool dissipative = false;           // margin >= -1e-10
    bool coercivity_surrogate_ok = false;
    bool pass() const { return dissipative; }
};

/// `ext_steklov` sharpens the coercivity bound estimate; when absent the
/// bound falls back to 1 (interior-only normalization).
FeasibilityReport feasibility(const ImpedanceSpec& L, double k,
                              const Eigen::MatrixXd& steklov,
                              const Eigen::MatrixXd* ext_steklov = nullptr);

/// Compact search class: a box in the complex plane (Im >= 0 enforced by the
/// box), applied to a constant impedance or per arclength segment.
struct ImpedanceClass {
    double re_lo = 0.0, re_hi = 1.0;
    double im_lo = 0.0, im_hi = 1.0;
    /// arclength breakpoints; empty = constant impedance (one segment)
    std::vector<double> breakpoints;
    int segment_count() const {
        return breakpoints.empty() ? 1 : static_cast<int>(breakpoints.size());
    }
};

/// Precomputed far-field-power objective Q_Theta(lambda) for the intrinsic
/// Robin scattering problem at fixed geometry/incidence. The Robin term only
/// touches the interface block, so one factorization of the Neumann system
/// plus dense interface algebra evaluates the objective for any impedance
/// (Woodbury identity); each evaluation costs O(n_b^2) after setup.
class RobinPowerObjective {
public:
    RobinPowerObjective(const TransmissionMesh& mesh, const DtNForm& dtn,
                        const Eigen::MatrixXd& steklov, const IncidentField& inc,
                        std::vector<std::pair<double, double>> theta_window,
                        int n_angles = 360);

    /// Q_Theta for the given impedance.
    double operator()(const ImpedanceSpec& L) const;
    /// dissipativity margin of the impedance (cheap re-check per iterate)
    double margin(const ImpedanceSpec& L) const;
    int interface_count() const { return nb_; }
    /// nodal impedance values for a piecewise-constant parameterization
    Eigen::VectorXcd nodal_values(const ImpedanceClass& cls,
                                  const Eigen::VectorXcd& seg_lambda) const;

private:
    int nb_ = 0;
    double k_ = 0.0;
    std::vector<double> arclength_;
    Eigen::MatrixXd S_;
    Eigen::VectorXcd flux_;    // incident cotrace
    Eigen::VectorXcd tinc_;    // incident trace
    Eigen::MatrixXcd E_;       // C A0^{-1} C^T (interface block of the inverse)
    Eigen::MatrixXcd Zr_;      // ring rows of A0^{-1} C^T
    Eigen::MatrixXcd Bring_;   // Fourier analysis on the ring
    Eigen::VectorXcd hinv_;    // 1 / H_m(kR), m = -M..M
    Eigen::MatrixXcd eval_;    // angle-grid evaluation of the modal far field
    std::vector<std::pair<double, double>> window_;
    int n_angles_ = 360;
};

struct OptSettings {
    int grid_points = 9;        // per real parameter axis
    int max_iterations = 300;   // Nelder-Mead iterations
    double tolerance = 1e-7;    // simplex size stop
};

struct OptIterate {
    Eigen::VectorXcd lambda;  // one entry per segment
    double Q = 0.0;
    double margin = 0.0;
    std::string phase;  // "grid" or "refine"
};

struct OptimisationResult {
    Eigen::VectorXcd best_lambda;
    double best_Q = 0.0;
    double best_margin = 0.0;
    std::vector<OptIterate> trace;
    std::string termination;
};

/// Two-phase maximisation of Q_Theta over the class box: coarse grid, then
/// bound-constrained Nelder-Mead from the best grid point. Trial points are
/// clamped to the box and rejected if the dissipativity margin fails.
/// Deterministic for fixed settings.
OptimisationResult optimize(const ImpedanceClass& cls,
                            const RobinPowerObjective& objective,
                            const OptSettings& settings = {});

} // namespace helmscat

#endif
