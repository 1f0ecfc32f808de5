#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "helmscat/mesh.hpp"

using namespace helmscat;

namespace {

DomainSpec square_spec(double R = 3.0) {
    DomainSpec s;
    s.obstacle = make_square(1.0);
    s.ball_radius = R;
    return s;
}

} // namespace

TEST_CASE("square obstacle mesh: areas and counts") {
    const DomainSpec spec = square_spec();
    const TransmissionMesh mesh = triangulate(spec, 0.2);
    const MetricsReport m = mesh_metrics(mesh);

    CHECK(m.interior_area == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.exterior_triangles >= 1);
    CHECK(m.min_angle_deg >= 20.0 - 1e-9);

    // total area equals the inscribed ring polygon area exactly, and the
    // circle area up to the polygonal defect
    const int N = static_cast<int>(mesh.outer_ring.size());
    const double R = spec.ball_radius;
    const double poly_area = 0.5 * N * R * R * std::sin(2.0 * pi / N);
    CHECK(m.interior_area + m.exterior_area == doctest::Approx(poly_area).epsilon(1e-9));
    const double defect = (pi - 0.5 * N * std::sin(2.0 * pi / N)) / pi;
    CHECK(std::abs(m.interior_area + m.exterior_area - pi * R * R) / (pi * R * R) <=
          defect + 1e-12);
}

TEST_CASE("ring nodes on the circle, ordered by angle") {
    const TransmissionMesh mesh = triangulate(square_spec(), 0.25);
    const double R = mesh.ball_radius;
    REQUIRE(mesh.outer_ring.size() >= static_cast<std::size_t>(
                std::ceil(2.0 * pi * R / 0.25)));
    double prev = -1.0;
    for (const int id : mesh.outer_ring) {
        const Vec2 p = mesh.nodes[id];
        CHECK(std::abs(p.norm() - R) <= 1e-12 * R);
        const double th = std::fmod(std::atan2(p.y, p.x) + 2.0 * pi, 2.0 * pi);
        CHECK(th > prev);
        prev = th;
    }
}

TEST_CASE("interface duplication invariants") {
    const TransmissionMesh mesh = triangulate(square_spec(), 0.2);
    REQUIRE(!mesh.interface_pairs.empty());

    std::set<int> int_copies, ext_copies;
    for (const auto& [ic, ec] : mesh.interface_pairs) {
        CHECK(mesh.nodes[ic].x == mesh.nodes[ec].x);
        CHECK(mesh.nodes[ic].y == mesh.nodes[ec].y);
        int_copies.insert(ic);
        ext_copies.insert(ec);
    }
    // interior triangles reference only interior copies and vice versa
    for (const auto& t : mesh.triangles) {
        for (const int v : t.v) {
            if (t.region == Region::interior)
                CHECK(!ext_copies.count(v));
            else
                CHECK(!int_copies.count(v));
        }
    }
    // arclength strictly increasing
    for (std::size_t i = 1; i < mesh.interface_arclength.size(); ++i)
        CHECK(mesh.interface_arclength[i] > mesh.interface_arclength[i - 1]);
    // pre-split square with h = 0.2: 4 edges of length 1 -> 5 nodes each
    CHECK(mesh.interface_count() >= 20);
}

TEST_CASE("interface edges match across regions") {
    const TransmissionMesh mesh = triangulate(square_spec(), 0.25);
    // map interface copies to pair index
    std::map<int, int> pair_of;
    for (std::size_t i = 0; i < mesh.interface_pairs.size(); ++i) {
        pair_of[mesh.interface_pairs[i].first] = static_cast<int>(i);
        pair_of[mesh.interface_pairs[i].second] = static_cast<int>(i);
    }
    // collect boundary edges (both endpoints on interface) per region
    std::set<std::pair<int, int>> int_edges, ext_edges;
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            const int a = t.v[e], b = t.v[(e + 1) % 3];
            if (!pair_of.count(a) || !pair_of.count(b)) continue;
            int pa = pair_of[a], pb = pair_of[b];
            if (pa > pb) std::swap(pa, pb);
            (t.region == Region::interior ? int_edges : ext_edges).insert({pa, pb});
        }
    }
    // every interface edge is seen from both sides
    CHECK(int_edges == ext_edges);
    CHECK(int_edges.size() == mesh.interface_pairs.size());
}

TEST_CASE("refinement scaling h -> h/2") {
    const TransmissionMesh coarse = triangulate(square_spec(), 0.3);
    const TransmissionMesh fine = triangulate(square_spec(), 0.15);
    const double ratio = static_cast<double>(fine.triangles.size()) /
                         static_cast<double>(coarse.triangles.size());
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 6.0);
}

TEST_CASE("koch prefractal meshes cleanly") {
    DomainSpec spec;
    spec.obstacle = generate_prefractal(PrefractalKind::koch, 1, make_square(1.0));
    spec.ball_radius = 2.5;
    const double h = 0.5 * spec.obstacle.min_edge_length();
    const TransmissionMesh mesh = triangulate(spec, h);
    const MetricsReport m = mesh_metrics(mesh);
    CHECK(m.min_angle_deg >= 20.0 - 1e-9);
    CHECK(m.interior_area == doctest::Approx(spec.obstacle.signed_area()).epsilon(1e-10));
    CHECK(m.interface_dofs == mesh.interface_count());
}

TEST_CASE("precondition errors") {
    CHECK_THROWS_AS(triangulate(square_spec(), 0.6), PreconditionError);  // h > e/2
    CHECK_THROWS_AS(triangulate(square_spec(), -0.1), PreconditionError);
    DomainSpec tight = square_spec(0.9);
    CHECK_THROWS_AS(triangulate(tight, 0.2), PreconditionError);  // clearance
    DomainSpec cw = square_spec();
    std::reverse(cw.obstacle.vertices.begin(), cw.obstacle.vertices.end());
    CHECK_THROWS_AS(triangulate(cw, 0.2), PreconditionError);
}

TEST_CASE("determinism") {
    const TransmissionMesh a = triangulate(square_spec(), 0.22);
    const TransmissionMesh b = triangulate(square_spec(), 0.22);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].x == b.nodes[i].x);
        CHECK(a.nodes[i].y == b.nodes[i].y);
    }
    REQUIRE(a.triangles.size() == b.triangles.size());
}
