#include "helmscat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace helmscat {

double Vec2::norm() const { return std::hypot(x, y); }

double Polyline::perimeter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < segment_count(); ++i)
        s += (segment_end(i) - segment_start(i)).norm();
    return s;
}

double Polyline::signed_area() const {
    double a = 0.0;
    for (std::size_t i = 0; i < segment_count(); ++i)
        a += segment_start(i).cross(segment_end(i));
    return 0.5 * a;
}

double Polyline::min_edge_length() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < segment_count(); ++i)
        m = std::min(m, (segment_end(i) - segment_start(i)).norm());
    return m;
}

namespace {

bool proper_intersection(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const Vec2 ab = b - a, cd = d - c;
    const double den = ab.cross(cd);
    if (den == 0.0) {
        // Parallel. Overlap counts as intersection.
        if ((c - a).cross(ab) != 0.0) return false;
        const double L = ab.dot(ab);
        double t0 = (c - a).dot(ab) / L;
        double t1 = (d - a).dot(ab) / L;
        if (t0 > t1) std::swap(t0, t1);
        return t0 < 1.0 && t1 > 0.0;
    }
    const double t = (c - a).cross(cd) / den;
    const double s = (c - a).cross(ab) / den;
    return t > 0.0 && t < 1.0 && s > 0.0 && s < 1.0;
}

} // namespace

bool Polyline::self_intersects(std::size_t* seg_a, std::size_t* seg_b) const {
    const std::size_t n = segment_count();
    struct Box {
        double xmin, xmax, ymin, ymax;
        std::size_t idx;
    };
    std::vector<Box> boxes(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = segment_start(i), q = segment_end(i);
        boxes[i] = {std::min(p.x, q.x), std::max(p.x, q.x),
                    std::min(p.y, q.y), std::max(p.y, q.y), i};
    }
    std::sort(boxes.begin(), boxes.end(),
              [](const Box& a, const Box& b) { return a.xmin < b.xmin; });
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (boxes[j].xmin > boxes[i].xmax) break;
            if (boxes[j].ymin > boxes[i].ymax || boxes[i].ymin > boxes[j].ymax)
                continue;
            std::size_t ia = boxes[i].idx, ib = boxes[j].idx;
            if (ia > ib) std::swap(ia, ib);
            const bool adjacent =
                (ib == ia + 1) || (closed && ia == 0 && ib == n - 1);
            if (adjacent) continue;
            if (proper_intersection(segment_start(ia), segment_end(ia),
                                    segment_start(ib), segment_end(ib))) {
                if (seg_a) *seg_a = ia;
                if (seg_b) *seg_b = ib;
                return true;
            }
        }
    }
    return false;
}

bool Polyline::contains(const Vec2& p) const {
    // Crossing-number test on the closed chain.
    bool inside = false;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xc = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xc) inside = !inside;
        }
    }
    return inside;
}

PrefractalKind prefractal_kind_from_string(const std::string& s) {
    if (s == "koch") return PrefractalKind::koch;
    if (s == "minkowski") return PrefractalKind::minkowski;
    if (s == "polygon") return PrefractalKind::polygon;
    throw GeometryError("unknown prefractal kind: " + s);
}

namespace {

void koch_edge(const Vec2& p, const Vec2& q, std::vector<Vec2>& out) {
    const Vec2 d = q - p;
    const Vec2 outward{d.y, -d.x}; // outward for CCW orientation
    out.push_back(p);
    out.push_back(p + d * (1.0 / 3.0));
    out.push_back(p + d * 0.5 + outward * (std::sqrt(3.0) / 6.0));
    out.push_back(p + d * (2.0 / 3.0));
}

void minkowski_edge(const Vec2& p, const Vec2& q, std::vector<Vec2>& out) {
    const Vec2 d = (q - p) * 0.25;
    const Vec2 n{d.y, -d.x};
    out.push_back(p);
    out.push_back(p + d);
    out.push_back(p + d + n);
    out.push_back(p + d * 2.0 + n);
    out.push_back(p + d * 2.0);
    out.push_back(p + d * 2.0 - n);
    out.push_back(p + d * 3.0 - n);
    out.push_back(p + d * 3.0);
}

} // namespace

Polyline generate_prefractal(PrefractalKind kind, int level, const Polyline& base,
                             int max_level) {
    if (!base.closed || base.vertices.size() < 3)
        throw PreconditionError("prefractal base must be a closed polyline with >= 3 vertices");
    if (level < 0 || level > max_level) {
        std::ostringstream os;
        os << "prefractal level " << level << " outside [0, " << max_level << "]";
        throw PreconditionError(os.str());
    }
    Polyline cur = base;
    if (kind != PrefractalKind::polygon) {
        for (int l = 0; l < level; ++l) {
            Polyline next;
            next.closed = true;
            next.vertices.reserve(cur.vertices.size() *
                                  (kind == PrefractalKind::koch ? 4 : 8));
            for (std::size_t i = 0; i < cur.segment_count(); ++i) {
                if (kind == PrefractalKind::koch)
                    koch_edge(cur.segment_start(i), cur.segment_end(i), next.vertices);
                else
                    minkowski_edge(cur.segment_start(i), cur.segment_end(i), next.vertices);
            }
            cur = std::move(next);
        }
    }
    std::size_t sa = 0, sb = 0;
    if (cur.self_intersects(&sa, &sb)) {
        std::ostringstream os;
        os << "generated prefractal self-intersects (segments " << sa << " and "
           << sb << ")";
        throw GeometryError(os.str());
    }
    return cur;
}

ValidationReport validate_domain(const DomainSpec& spec) {
    ValidationReport r;
    const Polyline& p = spec.obstacle;
    r.closed_ok = p.closed && p.vertices.size() >= 3;
    if (!r.closed_ok) return r;

    r.no_repeated_vertices = true;
    for (std::size_t i = 0; i < p.segment_count(); ++i) {
        if ((p.segment_end(i) - p.segment_start(i)).norm() == 0.0)
            r.no_repeated_vertices = false;
    }
    r.signed_area = p.signed_area();
    r.orientation_ok = r.signed_area > 0.0;
    r.min_edge_length = p.min_edge_length();
    r.no_self_intersection = !p.self_intersects();

    double rmax = 0.0;
    for (const Vec2& v : p.vertices) rmax = std::max(rmax, v.norm());
    r.clearance = spec.ball_radius - rmax;
    r.containment_ok = r.clearance > 0.0;
    r.origin_inside = p.contains({0.0, 0.0});
    return r;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    os << (pass() ? "PASS" : "FAIL")
       << " closed=" << closed_ok << " orientation=" << orientation_ok
       << " containment=" << containment_ok << " origin_inside=" << origin_inside
       << " no_self_intersection=" << no_self_intersection
       << " no_repeated_vertices=" << no_repeated_vertices
       << " clearance=" << clearance << " min_edge=" << min_edge_length
       << " area=" << signed_area;
    return os.str();
}

Polyline make_disk(double a, double h) {
    if (a <= 0.0 || h <= 0.0) throw PreconditionError("make_disk: a, h must be > 0");
    const int n = std::max<int>(8, static_cast<int>(std::ceil(2.0 * pi * a / h)));
    Polyline p;
    p.closed = true;
    p.vertices.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * pi * i / n;
        p.vertices.push_back({a * std::cos(t), a * std::sin(t)});
    }
    return p;
}

Polyline make_square(double side) {
    const double s = side / 2.0;
    Polyline p;
    p.closed = true;
    p.vertices = {{-s, -s}, {s, -s}, {s, s}, {-s, s}};
    return p;
}

} // namespace helmscat
