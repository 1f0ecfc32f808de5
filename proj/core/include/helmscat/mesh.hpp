#ifndef HELMSCAT_MESH_HPP
#define HELMSCAT_MESH_HPP

#include <array>
#include <string>
#include <vector>

#include "helmscat/geometry.hpp"

namespace helmscat {

enum class Region { interior, exterior };

/// Conforming triangulation of the ball B_R(0) with the obstacle boundary as
/// a constrained interface. Interface nodes are duplicated: interior triangles
/// reference the interior copies, exterior triangles the exterior copies.
struct TransmissionMesh {
    struct Triangle {
        std::array<int, 3> v;
        Region region;
    };

    std::vector<Vec2> nodes;
    std::vector<Triangle> triangles;
    /// (interior copy, exterior copy), ordered by arclength along the obstacle.
    std::vector<std::pair<int, int>> interface_pairs;
    /// Arclength coordinate of each interface pair along the obstacle.
    std::vector<double> interface_arclength;
    /// Node ids on the circle of radius R, ordered by angle.
    std::vector<int> outer_ring;
    double h = 0.0;
    double ball_radius = 0.0;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int interface_count() const { return static_cast<int>(interface_pairs.size()); }

    double triangle_area(const Triangle& t) const {
        const Vec2 a = nodes[t.v[0]], b = nodes[t.v[1]], c = nodes[t.v[2]];
        return 0.5 * (b - a).cross(c - a);
    }
    double region_area(Region r) const;
    /// DOF indices owned by a region (interface copies of that side included).
    std::vector<int> region_dofs(Region r) const;
};

struct MeshParams {
    double min_angle_deg = 20.0;
    double size_factor = 0.7;   // circumradius cap as a fraction of h
    int max_insertions = 2000000;
};

/// Constrained Delaunay triangulation of the ball with Ruppert-style
/// refinement to the angle threshold. Deterministic.
TransmissionMesh triangulate(const DomainSpec& spec, double h,
                             const MeshParams& params = {});

struct MetricsReport {
    int nodes = 0;
    int interior_triangles = 0;
    int exterior_triangles = 0;
    int interface_dofs = 0;
    double min_angle_deg = 0.0;
    double max_angle_deg = 0.0;
    double interior_area = 0.0;
    double exterior_area = 0.0;
    std::string summary() const;
};

MetricsReport mesh_metrics(const TransmissionMesh& mesh);

} // namespace helmscat

#endif
