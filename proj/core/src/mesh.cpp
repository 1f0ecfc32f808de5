#include "helmscat/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace helmscat {

namespace {

using ld = long double;

ld orient_ld(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (static_cast<ld>(b.x) - a.x) * (static_cast<ld>(c.y) - a.y) -
           (static_cast<ld>(b.y) - a.y) * (static_cast<ld>(c.x) - a.x);
}

// > 0 iff p lies strictly inside the circumcircle of the CCW triangle (a,b,c).
ld incircle_ld(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
    const ld ax = static_cast<ld>(a.x) - p.x, ay = static_cast<ld>(a.y) - p.y;
    const ld bx = static_cast<ld>(b.x) - p.x, by = static_cast<ld>(b.y) - p.y;
    const ld cx = static_cast<ld>(c.x) - p.x, cy = static_cast<ld>(c.y) - p.y;
    const ld a2 = ax * ax + ay * ay;
    const ld b2 = bx * bx + by * by;
    const ld c2 = cx * cx + cy * cy;
    return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) +
           a2 * (bx * cy - by * cx);
}

uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

struct SegInfo {
    int kind;  // 0 = obstacle interface (param = arclength), 1 = outer ring (param = angle)
    double pa, pb;
};

// Incremental constrained Delaunay triangulation (Bowyer-Watson insertion,
// cavity growth blocked by constrained edges) with Ruppert-style refinement.
class Mesher {
public:
    Mesher(const DomainSpec& spec, double h, const MeshParams& params)
        : spec_(spec), h_(h), params_(params) {}

    TransmissionMesh run();

private:
    struct Tri {
        int v[3];
        int nb[3];  // nb[i] faces the edge (v[(i+1)%3], v[(i+2)%3]); -1 = none
        bool alive;
    };
    struct VParam {
        int kind = -1;  // matches SegInfo::kind; -1 = free vertex
        double p = 0.0;
    };

    const DomainSpec& spec_;
    double h_;
    MeshParams params_;

    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    std::vector<int> vtri_;  // one alive triangle incident to each vertex
    std::vector<VParam> vparam_;
    std::unordered_map<uint64_t, SegInfo> constraints_;
    int insertions_ = 0;

    bool constrained(int a, int b) const {
        return constraints_.count(edge_key(a, b)) != 0;
    }

    int add_vertex(const Vec2& p, const VParam& vp) {
        pts_.push_back(p);
        vtri_.push_back(-1);
        vparam_.push_back(vp);
        return static_cast<int>(pts_.size()) - 1;
    }

    void init_box();
    int locate(const Vec2& p, int hint) const;
    int tri_index_of(const Tri& t, int v) const {
        for (int i = 0; i < 3; ++i)
            if (t.v[i] == v) return i;
        return -1;
    }

    struct Cavity {
        std::vector<int> tris;
        // boundary edges (u, w, outside neighbor), CCW as seen from the cavity
        struct BEdge {
            int u, w, outside;
        };
        std::vector<BEdge> boundary;
    };
    Cavity build_cavity(const Vec2& p, int t0) const;
    int commit_insert(const Vec2& p, const Cavity& cav, const VParam& vp,
                      std::vector<int>* new_tris);
    int insert_point(const Vec2& p, int hint, const VParam& vp,
                     std::vector<int>* new_tris);

    bool edge_exists(int a, int b) const;
    std::vector<int> star(int a) const;
    void flip(int t, int i);
    void recover_segment(int a, int b);

    // refinement
    struct TriKey {
        int t, v0, v1, v2;
    };
    std::deque<uint64_t> segq_;
    std::deque<TriKey> triq_;
    void push_tri(int t) {
        const Tri& tr = tris_[t];
        triq_.push_back({t, tr.v[0], tr.v[1], tr.v[2]});
    }
    bool seg_encroached(int a, int b) const;
    void split_segment(uint64_t key);
    void queue_encroached_around(const std::vector<int>& new_tris);
    void refine();
    double tri_quality(const Tri& t, double* circum_r, Vec2* circum_c) const;

    TransmissionMesh extract();
};

void Mesher::init_box() {
    const double S = 4.0 * spec_.ball_radius;
    add_vertex({-S, -S}, {});
    add_vertex({S, -S}, {});
    add_vertex({S, S}, {});
    add_vertex({-S, S}, {});
    tris_.push_back({{0, 1, 2}, {-1, 1, -1}, true});
    tris_.push_back({{0, 2, 3}, {-1, -1, 0}, true});
    vtri_ = {0, 0, 0, 1};
}

int Mesher::locate(const Vec2& p, int hint) const {
    int t = (hint >= 0 && hint < static_cast<int>(tris_.size()) && tris_[hint].alive)
                ? hint
                : -1;
    if (t < 0) {
        for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
            if (tris_[i].alive) {
                t = i;
                break;
            }
    }
    const int max_steps = static_cast<int>(tris_.size()) + 64;
    for (int step = 0; step < max_steps; ++step) {
        const Tri& tr = tris_[t];
        int next = -1;
        for (int s = 0; s < 3; ++s) {
            const int i = (s + step) % 3;  // vary start edge to dodge cycles
            const int u = tr.v[(i + 1) % 3], w = tr.v[(i + 2) % 3];
            if (orient_ld(pts_[u], pts_[w], p) < 0.0L) {
                next = tr.nb[i];
                break;
            }
        }
        if (next < 0) return t;
        t = next;
    }
    // Walk failed (shouldn't happen); exhaustive fallback.
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
        if (!tris_[i].alive) continue;
        const Tri& tr = tris_[i];
        bool ok = true;
        for (int e = 0; e < 3 && ok; ++e)
            ok = orient_ld(pts_[tr.v[(e + 1) % 3]], pts_[tr.v[(e + 2) % 3]], p) >= 0.0L;
        if (ok) return i;
    }
    throw MeshError("point location failed");
}

Mesher::Cavity Mesher::build_cavity(const Vec2& p, int t0) const {
    Cavity cav;
    std::vector<int> stack{t0};
    std::unordered_map<int, bool> in;
    in[t0] = true;
    while (!stack.empty()) {
        const int t = stack.back();
        stack.pop_back();
        cav.tris.push_back(t);
        const Tri& tr = tris_[t];
        for (int i = 0; i < 3; ++i) {
            const int u = tr.v[(i + 1) % 3], w = tr.v[(i + 2) % 3];
            const int n = tr.nb[i];
            bool grow = false;
            if (n >= 0 && !in.count(n) && !constrained(u, w)) {
                const Tri& nt = tris_[n];
                if (incircle_ld(pts_[nt.v[0]], pts_[nt.v[1]], pts_[nt.v[2]], p) > 0.0L)
                    grow = true;
                // p (numerically) on the shared edge: absorb the neighbor to
                // avoid creating a degenerate triangle
                else if (orient_ld(pts_[u], pts_[w], p) <= 0.0L)
                    grow = true;
            }
            if (grow) {
                in[n] = true;
                stack.push_back(n);
            } else if (n < 0 || !in.count(n)) {
                // may be finalized later if n joins; filter below
            }
        }
    }
    // collect boundary edges after the cavity is final
    for (const int t : cav.tris) {
        const Tri& tr = tris_[t];
        for (int i = 0; i < 3; ++i) {
            const int n = tr.nb[i];
            if (n >= 0 && in.count(n)) continue;
            cav.boundary.push_back({tr.v[(i + 1) % 3], tr.v[(i + 2) % 3], n});
        }
    }
    return cav;
}

int Mesher::commit_insert(const Vec2& p, const Cavity& cav, const VParam& vp,
                          std::vector<int>* new_tris) {
    if (++insertions_ > params_.max_insertions)
        throw MeshError("refinement did not terminate within the insertion budget");
    const int pid = add_vertex(p, vp);
    for (const int t : cav.tris) tris_[t].alive = false;

    std::unordered_map<int, int> start_at, end_at;  // boundary vertex -> new tri
    std::vector<int> created;
    created.reserve(cav.boundary.size());
    for (const auto& be : cav.boundary) {
        Tri nt;
        nt.v[0] = be.u;
        nt.v[1] = be.w;
        nt.v[2] = pid;
        nt.nb[0] = nt.nb[1] = -1;
        nt.nb[2] = be.outside;
        nt.alive = true;
        const int id = static_cast<int>(tris_.size());
        tris_.push_back(nt);
        created.push_back(id);
        start_at[be.u] = id;
        end_at[be.w] = id;
        if (be.outside >= 0) {
            Tri& out = tris_[be.outside];
            for (int i = 0; i < 3; ++i) {
                const int ou = out.v[(i + 1) % 3], ow = out.v[(i + 2) % 3];
                if ((ou == be.w && ow == be.u) || (ou == be.u && ow == be.w))
                    out.nb[i] = id;
            }
        }
        vtri_[be.u] = id;
        vtri_[be.w] = id;
    }
    for (const int id : created) {
        Tri& t = tris_[id];
        t.nb[0] = start_at.at(t.v[1]);  // across (w, pid)
        t.nb[1] = end_at.at(t.v[0]);    // across (pid, u)
    }
    vtri_[pid] = created.empty() ? -1 : created.front();
    if (new_tris) *new_tris = created;
    return pid;
}

int Mesher::insert_point(const Vec2& p, int hint, const VParam& vp,
                         std::vector<int>* new_tris) {
    const int t0 = locate(p, hint);
    // duplicate guard
    const double tol = 1e-12 * spec_.ball_radius;
    for (int i = 0; i < 3; ++i) {
        const int v = tris_[t0].v[i];
        if ((pts_[v] - p).norm() < tol) return v;
    }
    const Cavity cav = build_cavity(p, t0);
    return commit_insert(p, cav, vp, new_tris);
}

std::vector<int> Mesher::star(int a) const {
    std::vector<int> out;
    const int t0 = vtri_[a];
    int t = t0;
    for (std::size_t guard = 0; guard < tris_.size() + 4; ++guard) {
        out.push_back(t);
        const Tri& tr = tris_[t];
        const int i = tri_index_of(tr, a);
        const int next = tr.nb[(i + 1) % 3];  // rotate across edge (v[i+2], v[i])
        if (next == t0 || next < 0) break;
        t = next;
    }
    return out;
}

bool Mesher::edge_exists(int a, int b) const {
    for (const int t : star(a)) {
        const Tri& tr = tris_[t];
        for (int i = 0; i < 3; ++i)
            if (tr.v[i] == b) return true;
    }
    return false;
}

// Flip the edge of triangle t opposite to local vertex i.
void Mesher::flip(int t, int i) {
    Tri& T = tris_[t];
    const int n = T.nb[i];
    Tri& N = tris_[n];
    const int a = T.v[i];
    const int u = T.v[(i + 1) % 3];
    const int w = T.v[(i + 2) % 3];
    const int j = [&] {
        for (int s = 0; s < 3; ++s)
            if (N.v[s] != u && N.v[s] != w) return s;
        throw MeshError("broken adjacency during flip");
    }();
    const int b = N.v[j];
    // quad a-u-b-w; replace (u,w) by (a,b): new tris (a,u,b) and (a,b,w)
    const int tn_au = T.nb[(i + 2) % 3];  // across (a,u) in T
    const int tn_wa = T.nb[(i + 1) % 3];  // across (w,a) in T
    int n_ub = -1, n_bw = -1;             // N's neighbors across (u,b) and (b,w)
    for (int s = 0; s < 3; ++s) {
        const int eu = N.v[(s + 1) % 3], ew = N.v[(s + 2) % 3];
        if ((eu == u && ew == b) || (eu == b && ew == u)) n_ub = N.nb[s];
        if ((eu == b && ew == w) || (eu == w && ew == b)) n_bw = N.nb[s];
    }
    T.v[0] = a; T.v[1] = u; T.v[2] = b;
    N.v[0] = a; N.v[1] = b; N.v[2] = w;
    T.nb[0] = n_ub;  // across (u,b)
    T.nb[1] = n;     // across (b,a)
    T.nb[2] = tn_au; // across (a,u)
    N.nb[0] = n_bw;  // across (b,w)
    N.nb[1] = tn_wa; // across (w,a)
    N.nb[2] = t;     // across (a,b)
    auto fix_outside = [&](int out, int self, int other) {
        if (out < 0) return;
        Tri& O = tris_[out];
        for (int s = 0; s < 3; ++s)
            if (O.nb[s] == other) {
                // only rewire if the shared edge now belongs to `self`
                const int eu = O.v[(s + 1) % 3], ew = O.v[(s + 2) % 3];
                const Tri& S = tris_[self];
                for (int q = 0; q < 3; ++q) {
                    const int su = S.v[(q + 1) % 3], sw = S.v[(q + 2) % 3];
                    if ((su == eu && sw == ew) || (su == ew && sw == eu)) {
                        O.nb[s] = self;
                        return;
                    }
                }
            }
    };
    fix_outside(n_ub, t, n);
    fix_outside(n_bw, n, n);
    fix_outside(tn_au, t, t);
    fix_outside(tn_wa, n, t);
    vtri_[a] = t;
    vtri_[u] = t;
    vtri_[b] = t;
    vtri_[w] = n;
}

void Mesher::recover_segment(int a, int b) {
    const Vec2 pa = pts_[a], pb = pts_[b];
    for (int iter = 0; iter < 10000; ++iter) {
        if (edge_exists(a, b)) return;
        // find the triangle in star(a) whose opposite edge crosses (a,b)
        int ct = -1, ci = -1;
        for (const int t : star(a)) {
            const Tri& tr = tris_[t];
            const int i = tri_index_of(tr, a);
            const int u = tr.v[(i + 1) % 3], w = tr.v[(i + 2) % 3];
            const ld ou = orient_ld(pa, pb, pts_[u]);
            const ld ow = orient_ld(pa, pb, pts_[w]);
            if (ou > 0.0L && ow < 0.0L &&
                orient_ld(pts_[u], pts_[w], pa) * orient_ld(pts_[u], pts_[w], pb) < 0.0L) {
                ct = t;
                ci = i;
                break;
            }
        }
        if (ct < 0) throw MeshError("constrained edge recovery failed to start");
        // march along the segment and flip the first flippable crossing edge
        bool flipped = false;
        int t = ct, i = ci;
        for (int guard = 0; guard < 10000 && !flipped; ++guard) {
            const Tri& tr = tris_[t];
            const int A = tr.v[i];
            const int u = tr.v[(i + 1) % 3], w = tr.v[(i + 2) % 3];
            if (constrained(u, w))
                throw MeshError("constrained segments cross");
            const int n = tr.nb[i];
            if (n < 0) throw MeshError("constrained edge recovery left the mesh");
            const Tri& nt = tris_[n];
            int j = 0;
            for (int s = 0; s < 3; ++s)
                if (nt.v[s] != u && nt.v[s] != w) j = s;
            const int B = nt.v[j];
            // flippable iff quad A-u-B-w strictly convex
            const bool convex = orient_ld(pts_[A], pts_[u], pts_[B]) > 0.0L &&
                                orient_ld(pts_[u], pts_[B], pts_[w]) > 0.0L &&
                                orient_ld(pts_[B], pts_[w], pts_[A]) > 0.0L &&
                                orient_ld(pts_[w], pts_[A], pts_[u]) > 0.0L;
            if (convex) {
                flip(t, i);
                flipped = true;
                break;
            }
            if (B == b) throw MeshError("constrained edge recovery stalled");
            // advance: in n, the segment exits across the edge (u,B) or (B,w)
            const ld oB = orient_ld(pa, pb, pts_[B]);
            int exit_u, exit_w;
            if (oB > 0.0L) {
                exit_u = B;
                exit_w = w;
            } else {
                exit_u = u;
                exit_w = B;
            }
            t = n;
            i = tri_index_of(nt, (oB > 0.0L) ? u : w);
            (void)exit_u;
            (void)exit_w;
        }
        if (!flipped) throw MeshError("constrained edge recovery stalled");
    }
    throw MeshError("constrained edge recovery did not converge");
}

double Mesher::tri_quality(const Tri& t, double* circum_r, Vec2* circum_c) const {
    const Vec2 a = pts_[t.v[0]], b = pts_[t.v[1]], c = pts_[t.v[2]];
    const double la = (c - b).norm(), lb = (a - c).norm(), lc = (b - a).norm();
    const double area2 = (b - a).cross(c - a);  // 2*area, positive for CCW
    const double R = la * lb * lc / std::max(2.0 * area2, 1e-300);
    if (circum_r) *circum_r = R;
    if (circum_c) {
        const double d = 2.0 * area2;
        const double a2 = a.dot(a), b2 = b.dot(b), c2 = c.dot(c);
        circum_c->x = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
        circum_c->y = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    }
    const double lmin = std::min({la, lb, lc});
    // min angle from R: sin(min angle) = lmin / (2R)
    return std::asin(std::clamp(lmin / (2.0 * R), 0.0, 1.0)) * 180.0 / pi;
}

bool Mesher::seg_encroached(int a, int b) const {
    // test the apexes of the two adjacent triangles against the diametral circle
    for (const int t : star(a)) {
        const Tri& tr = tris_[t];
        int ia = -1, ib = -1;
        for (int i = 0; i < 3; ++i) {
            if (tr.v[i] == a) ia = i;
            if (tr.v[i] == b) ib = i;
        }
        if (ia < 0 || ib < 0) continue;
        const int apex = tr.v[3 - ia - ib];
        const Vec2 va = pts_[a] - pts_[apex], vb = pts_[b] - pts_[apex];
        if (va.dot(vb) < -1e-14) return true;
    }
    return false;
}

void Mesher::split_segment(uint64_t key) {
    const auto it = constraints_.find(key);
    if (it == constraints_.end()) return;
    const SegInfo info = it->second;
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    Vec2 mid;
    const double pm = 0.5 * (info.pa + info.pb);
    if (info.kind == 1) {
        const double R = spec_.ball_radius;
        mid = {R * std::cos(pm), R * std::sin(pm)};
    } else {
        mid = (pts_[a] + pts_[b]) * 0.5;
    }
    constraints_.erase(it);
    std::vector<int> created;
    const int pid = insert_point(mid, vtri_[a], {info.kind, pm}, &created);
    if (pid == a || pid == b) {  // segment too short to split
        constraints_[key] = info;
        return;
    }
    constraints_[edge_key(a, pid)] = {info.kind, info.pa, pm};
    constraints_[edge_key(pid, b)] = {info.kind, pm, info.pb};
    recover_segment(a, pid);
    recover_segment(pid, b);
    if (seg_encroached(a, pid)) segq_.push_back(edge_key(a, pid));
    if (seg_encroached(pid, b)) segq_.push_back(edge_key(pid, b));
    for (const int t : created)
        if (tris_[t].alive) push_tri(t);
    queue_encroached_around(created);
}

void Mesher::queue_encroached_around(const std::vector<int>& new_tris) {
    for (const int t : new_tris) {
        if (t >= static_cast<int>(tris_.size()) || !tris_[t].alive) continue;
        const Tri& tr = tris_[t];
        for (int i = 0; i < 3; ++i) {
            const int u = tr.v[(i + 1) % 3], w = tr.v[(i + 2) % 3];
            if (constrained(u, w) && seg_encroached(u, w))
                segq_.push_back(edge_key(u, w));
        }
    }
}

void Mesher::refine() {
    for (const auto& [key, info] : constraints_) {
        (void)info;
        const int a = static_cast<int>(key >> 32);
        const int b = static_cast<int>(key & 0xffffffffu);
        if (seg_encroached(a, b)) segq_.push_back(key);
    }
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
        if (tris_[t].alive) push_tri(t);

    const double size_cap = params_.size_factor * h_;
    const double angle_floor = params_.min_angle_deg;
    while (!segq_.empty() || !triq_.empty()) {
        if (!segq_.empty()) {
            const uint64_t key = segq_.front();
            segq_.pop_front();
            if (!constraints_.count(key)) continue;
            const int a = static_cast<int>(key >> 32);
            const int b = static_cast<int>(key & 0xffffffffu);
            if (seg_encroached(a, b)) split_segment(key);
            continue;
        }
        const TriKey tk = triq_.front();
        triq_.pop_front();
        if (tk.t >= static_cast<int>(tris_.size())) continue;
        const Tri& tr = tris_[tk.t];
        if (!tr.alive || tr.v[0] != tk.v0 || tr.v[1] != tk.v1 || tr.v[2] != tk.v2)
            continue;
        // super-box corner triangles live outside the ring; never refine them
        if (tr.v[0] < 4 || tr.v[1] < 4 || tr.v[2] < 4) continue;
        double circ_r;
        Vec2 cc;
        const double min_ang = tri_quality(tr, &circ_r, &cc);
        if (min_ang >= angle_floor && circ_r <= size_cap) continue;
        // If the circumcenter escapes the ring, split the ring segment hit by
        // the centroid-to-circumcenter ray instead (Ruppert boundary handling).
        if (cc.norm() >= spec_.ball_radius) {
            const Vec2 centroid = (pts_[tr.v[0]] + pts_[tr.v[1]] + pts_[tr.v[2]]) *
                                  (1.0 / 3.0);
            uint64_t hit = 0;
            bool found = false;
            std::vector<uint64_t> enc;
            for (const auto& [key, info] : constraints_) {
                if (info.kind != 1) continue;
                const int a = static_cast<int>(key >> 32);
                const int b = static_cast<int>(key & 0xffffffffu);
                const Vec2 va = pts_[a] - cc, vb = pts_[b] - cc;
                if (va.dot(vb) < 0.0) enc.push_back(key);
                if (!found &&
                    orient_ld(centroid, cc, pts_[a]) * orient_ld(centroid, cc, pts_[b]) <
                        0.0L &&
                    orient_ld(pts_[a], pts_[b], centroid) *
                            orient_ld(pts_[a], pts_[b], cc) <
                        0.0L) {
                    hit = key;
                    found = true;
                }
            }
            for (const uint64_t key : enc) split_segment(key);
            if (enc.empty() && found) split_segment(hit);
            if (!enc.empty() || found) push_tri(tk.t);
            continue;
        }
        // reject circumcenters encroaching a constrained segment: split instead
        const int t0 = locate(cc, tk.t);
        const Cavity cav = build_cavity(cc, t0);
        std::vector<uint64_t> enc;
        for (const auto& be : cav.boundary) {
            if (!constrained(be.u, be.w)) continue;
            const Vec2 va = pts_[be.u] - cc, vb = pts_[be.w] - cc;
            if (va.dot(vb) < 0.0) enc.push_back(edge_key(be.u, be.w));
        }
        if (!enc.empty()) {
            for (const uint64_t key : enc) split_segment(key);
            push_tri(tk.t);
            continue;
        }
        // duplicate guard (degenerate circumcenter collision)
        bool dup = false;
        const double tol = 1e-12 * spec_.ball_radius;
        for (int i = 0; i < 3; ++i)
            if ((pts_[tris_[t0].v[i]] - cc).norm() < tol) dup = true;
        if (dup) continue;
        std::vector<int> created;
        commit_insert(cc, cav, {}, &created);
        for (const int t : created) push_tri(t);
        queue_encroached_around(created);
    }
}

TransmissionMesh Mesher::run() {
    const ValidationReport vr = validate_domain(spec_);
    if (!vr.pass())
        throw PreconditionError("triangulate: invalid domain: " + vr.summary());
    if (h_ <= 0.0) throw PreconditionError("triangulate: h must be positive");
    if (h_ > 0.5 * vr.min_edge_length) {
        std::ostringstream os;
        os << "triangulate: h = " << h_ << " exceeds half the minimum obstacle edge length "
           << 0.5 * vr.min_edge_length;
        throw PreconditionError(os.str());
    }
    if (vr.clearance < 2.0 * h_)
        throw PreconditionError("triangulate: obstacle clearance below two mesh sizes");

    init_box();

    // Obstacle boundary points, pre-split so local size <= local edge length,
    // tagged with arclength.
    const Polyline& obs = spec_.obstacle;
    std::vector<int> bverts;
    std::vector<double> bparams;
    double s = 0.0;
    for (std::size_t e = 0; e < obs.segment_count(); ++e) {
        const Vec2 A = obs.segment_start(e), B = obs.segment_end(e);
        const double L = (B - A).norm();
        const int n = std::max(1, static_cast<int>(std::ceil(L / h_)));
        for (int j = 0; j < n; ++j) {
            const double t = static_cast<double>(j) / n;
            const Vec2 p = A + (B - A) * t;
            bparams.push_back(s + t * L);
            bverts.push_back(insert_point(p, -1, {0, bparams.back()}, nullptr));
        }
        s += L;
    }
    const double perimeter = s;

    // Ring points on |x| = R.
    const double R = spec_.ball_radius;
    const int N = std::max(8, static_cast<int>(std::ceil(2.0 * pi * R / h_)));
    std::vector<int> rverts;
    for (int i = 0; i < N; ++i) {
        const double th = 2.0 * pi * i / N;
        rverts.push_back(
            insert_point({R * std::cos(th), R * std::sin(th)}, -1, {1, th}, nullptr));
    }

    // Constrain and recover interface and ring edges.
    const int nb = static_cast<int>(bverts.size());
    for (int i = 0; i < nb; ++i) {
        const int a = bverts[i], b = bverts[(i + 1) % nb];
        const double pa = bparams[i];
        const double pb = (i + 1 < nb) ? bparams[i + 1] : perimeter;
        recover_segment(a, b);
        constraints_[edge_key(a, b)] = {0, pa, pb};
    }
    for (int i = 0; i < N; ++i) {
        const int a = rverts[i], b = rverts[(i + 1) % N];
        const double ta = 2.0 * pi * i / N;
        const double tb = 2.0 * pi * (i + 1) / N;
        recover_segment(a, b);
        constraints_[edge_key(a, b)] = {1, ta, tb};
    }

    refine();
    return extract();
}

TransmissionMesh Mesher::extract() {
    TransmissionMesh mesh;
    mesh.h = h_;
    mesh.ball_radius = spec_.ball_radius;

    // Keep triangles not touching the super-box corners: everything else lies
    // inside the ring polygon.
    std::vector<int> keep;
    double worst_angle = 180.0;
    int worst_tri = -1;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
        const Tri& tr = tris_[t];
        if (!tr.alive) continue;
        if (tr.v[0] < 4 || tr.v[1] < 4 || tr.v[2] < 4) continue;
        keep.push_back(t);
        const double ang = tri_quality(tr, nullptr, nullptr);
        if (ang < worst_angle) {
            worst_angle = ang;
            worst_tri = t;
        }
    }
    if (worst_angle < params_.min_angle_deg - 1e-9) {
        const Tri& tr = tris_[worst_tri];
        std::ostringstream os;
        os << "mesh quality below " << params_.min_angle_deg
           << " deg: worst triangle has min angle " << worst_angle << " deg at ("
           << pts_[tr.v[0]].x << "," << pts_[tr.v[0]].y << ") (" << pts_[tr.v[1]].x
           << "," << pts_[tr.v[1]].y << ") (" << pts_[tr.v[2]].x << ","
           << pts_[tr.v[2]].y << ")";
        throw MeshError(os.str());
    }

    // Renumber used vertices; duplicate interface vertices afterwards.
    std::vector<int> remap(pts_.size(), -1);
    for (const int t : keep)
        for (int i = 0; i < 3; ++i) {
            const int v = tris_[t].v[i];
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(mesh.nodes.size());
                mesh.nodes.push_back(pts_[v]);
            }
        }

    // Interface duplication: original id = exterior copy, new id = interior copy.
    struct IfaceNode {
        double arclen;
        int ext_id;
        int int_id;
    };
    std::vector<IfaceNode> iface;
    std::vector<int> interior_copy(pts_.size(), -1);
    for (std::size_t v = 0; v < pts_.size(); ++v) {
        if (vparam_[v].kind != 0 || remap[v] < 0) continue;
        const int ic = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(pts_[v]);
        interior_copy[v] = ic;
        iface.push_back({vparam_[v].p, remap[v], ic});
    }
    std::sort(iface.begin(), iface.end(),
              [](const IfaceNode& a, const IfaceNode& b) { return a.arclen < b.arclen; });
    for (const auto& n : iface) {
        mesh.interface_pairs.emplace_back(n.int_id, n.ext_id);
        mesh.interface_arclength.push_back(n.arclen);
    }

    for (const int t : keep) {
        const Tri& tr = tris_[t];
        const Vec2 centroid =
            (pts_[tr.v[0]] + pts_[tr.v[1]] + pts_[tr.v[2]]) * (1.0 / 3.0);
        const Region reg =
            spec_.obstacle.contains(centroid) ? Region::interior : Region::exterior;
        TransmissionMesh::Triangle out;
        out.region = reg;
        for (int i = 0; i < 3; ++i) {
            const int v = tr.v[i];
            out.v[i] = (reg == Region::interior && interior_copy[v] >= 0)
                           ? interior_copy[v]
                           : remap[v];
        }
        mesh.triangles.push_back(out);
    }

    // Ring nodes by angle.
    struct RingNode {
        double theta;
        int id;
    };
    std::vector<RingNode> ring;
    for (std::size_t v = 0; v < pts_.size(); ++v)
        if (vparam_[v].kind == 1 && remap[v] >= 0)
            ring.push_back({std::fmod(vparam_[v].p, 2.0 * pi), remap[v]});
    std::sort(ring.begin(), ring.end(),
              [](const RingNode& a, const RingNode& b) { return a.theta < b.theta; });
    for (const auto& r : ring) mesh.outer_ring.push_back(r.id);

    return mesh;
}

}  // namespace

TransmissionMesh triangulate(const DomainSpec& spec, double h, const MeshParams& params) {
    Mesher m(spec, h, params);
    return m.run();
}

double TransmissionMesh::region_area(Region r) const {
    double a = 0.0;
    for (const Triangle& t : triangles)
        if (t.region == r) a += triangle_area(t);
    return a;
}

std::vector<int> TransmissionMesh::region_dofs(Region r) const {
    std::vector<char> used(nodes.size(), 0);
    for (const Triangle& t : triangles)
        if (t.region == r)
            for (const int v : t.v) used[v] = 1;
    std::vector<int> out;
    for (std::size_t i = 0; i < used.size(); ++i)
        if (used[i]) out.push_back(static_cast<int>(i));
    return out;
}

MetricsReport mesh_metrics(const TransmissionMesh& mesh) {
    MetricsReport r;
    r.nodes = mesh.node_count();
    r.interface_dofs = mesh.interface_count();
    r.min_angle_deg = 180.0;
    r.max_angle_deg = 0.0;
    for (const auto& t : mesh.triangles) {
        if (t.region == Region::interior)
            ++r.interior_triangles;
        else
            ++r.exterior_triangles;
        const Vec2 a = mesh.nodes[t.v[0]], b = mesh.nodes[t.v[1]], c = mesh.nodes[t.v[2]];
        const Vec2 ea = c - b, eb = a - c, ec = b - a;
        const double angs[3] = {
            std::acos(std::clamp(-(eb.dot(ec)) / (eb.norm() * ec.norm()), -1.0, 1.0)),
            std::acos(std::clamp(-(ec.dot(ea)) / (ec.norm() * ea.norm()), -1.0, 1.0)),
            std::acos(std::clamp(-(ea.dot(eb)) / (ea.norm() * eb.norm()), -1.0, 1.0))};
        for (const double ang : angs) {
            r.min_angle_deg = std::min(r.min_angle_deg, ang * 180.0 / pi);
            r.max_angle_deg = std::max(r.max_angle_deg, ang * 180.0 / pi);
        }
    }
    r.interior_area = mesh.region_area(Region::interior);
    r.exterior_area = mesh.region_area(Region::exterior);
    return r;
}

std::string MetricsReport::summary() const {
    std::ostringstream os;
    os << "nodes=" << nodes << " tris=" << interior_triangles << "+"
       << exterior_triangles << " iface=" << interface_dofs
       << " angles=[" << min_angle_deg << "," << max_angle_deg << "]"
       << " areas=" << interior_area << "/" << exterior_area;
    return os.str();
}

} // namespace helmscat
