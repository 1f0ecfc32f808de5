#ifndef HELMSCAT_GEOMETRY_HPP
#define HELMSCAT_GEOMETRY_HPP

#include <string>
#include <vector>

#include "helmscat/common.hpp"

namespace helmscat {

/// Closed or open polygonal chain. When representing an obstacle boundary,
/// the chain is closed and counter-clockwise oriented.
struct Polyline {
    std::vector<Vec2> vertices;
    bool closed = true;

    std::size_t segment_count() const {
        if (vertices.size() < 2) return 0;
        return closed ? vertices.size() : vertices.size() - 1;
    }
    Vec2 segment_start(std::size_t i) const { return vertices[i]; }
    Vec2 segment_end(std::size_t i) const {
        return vertices[(i + 1) % vertices.size()];
    }

    double perimeter() const;
    double signed_area() const;
    double min_edge_length() const;
    bool self_intersects(std::size_t* seg_a = nullptr,
                         std::size_t* seg_b = nullptr) const;
    /// Winding-number containment test. Points on the boundary are unreliable.
    bool contains(const Vec2& p) const;
};

/// Obstacle plus the truncation ball B_R(0) and the wavenumber of the run.
struct DomainSpec {
    Polyline obstacle;
    double ball_radius = 0.0;
    cplx wavenumber{1.0, 0.0};
};

enum class PrefractalKind { koch, minkowski, polygon };

PrefractalKind prefractal_kind_from_string(const std::string& s);

/// Replaces every edge of `base` by the level-`level` generator curve.
/// Generators bump outward (counter-clockwise base assumed). Throws
/// GeometryError if the generated curve self-intersects.
Polyline generate_prefractal(PrefractalKind kind, int level, const Polyline& base,
                             int max_level = 7);

struct ValidationReport {
    bool closed_ok = false;
    bool orientation_ok = false;
    bool containment_ok = false;
    bool origin_inside = false;
    bool no_self_intersection = false;
    bool no_repeated_vertices = false;
    double clearance = 0.0;      // ball_radius - max vertex radius
    double min_edge_length = 0.0;
    double signed_area = 0.0;

    bool pass() const {
        return closed_ok && orientation_ok && containment_ok && origin_inside &&
               no_self_intersection && no_repeated_vertices;
    }
    std::string summary() const;
};

ValidationReport validate_domain(const DomainSpec& spec);

/// Regular N-gon approximation of the circle of radius `a`, N chosen so the
/// edge length is at most `h`.
Polyline make_disk(double a, double h);
Polyline make_square(double side = 1.0);

} // namespace helmscat

#endif
