#ifndef HELMSCAT_FIELD_HPP
#define HELMSCAT_FIELD_HPP

#include <Eigen/Dense>

#include "helmscat/mesh.hpp"

namespace helmscat {

enum class PdeTag { none, helmholtz, one_harmonic };

/// Complex P1 coefficient vector over the full duplicated-DOF node set.
/// Only the DOFs of `region` are meaningful; the rest are zero.
struct Field {
    Eigen::VectorXcd values;
    Region region = Region::interior;
    bool covers_both = false;  // set when the field spans interior and exterior
    PdeTag pde = PdeTag::none;
    cplx k{0.0, 0.0};
};

} // namespace helmscat

#endif
