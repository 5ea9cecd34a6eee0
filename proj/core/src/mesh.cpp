#include "plrn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace plrn::fem {

namespace {

using geo::Point;
using geo::cross;
using geo::dot;
using geo::norm;

struct Tri {
    int v[3];  // CCW
    int nb[3]; // nb[i] across the edge opposite v[i]; -1 = none
    int region = kRegionUnknown;
    bool alive = true;

    static constexpr int kRegionUnknown = -3;
    static constexpr int kRegionExterior = -1;
    static constexpr int kRegionInterior = 0;
    // holes use 1 + hole index
};

uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

struct Segment {
    int a{}, b{};
    int tag{};
    bool alive = true;
};

class Triangulator {
public:
    std::vector<Point> pts;
    std::vector<Tri> tris;
    std::vector<int> vtri; // some live triangle touching each vertex
    std::vector<Segment> segs;
    std::unordered_map<uint64_t, int> seg_index;
    double scale = 1.0;
    std::size_t node_budget = 500000;

    int orient_sign(const Point& a, const Point& b, const Point& c, double* mag = nullptr) const {
        const double d = cross(b - a, c - a);
        const double m = std::abs(cross(b - a, c - a)) + norm(b - a) * norm(c - a) * 1e-300;
        if (mag) *mag = m;
        const double eps = 1e-13 * scale * scale;
        if (d > eps) return 1;
        if (d < -eps) return -1;
        return 0;
    }

    bool in_circle(const Point& a, const Point& b, const Point& c, const Point& d) const {
        const double ax = a.x - d.x, ay = a.y - d.y;
        const double bx = b.x - d.x, by = b.y - d.y;
        const double cx = c.x - d.x, cy = c.y - d.y;
        const double a2 = ax * ax + ay * ay;
        const double b2 = bx * bx + by * by;
        const double c2 = cx * cx + cy * cy;
        const double det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) +
                           a2 * (bx * cy - by * cx);
        const double mag = std::abs(ax * by * c2) + std::abs(ax * b2 * cy) +
                           std::abs(ay * bx * c2) + std::abs(ay * b2 * cx) +
                           std::abs(a2 * bx * cy) + std::abs(a2 * by * cx) + 1e-300;
        return det > 1e-12 * mag;
    }

    bool is_constrained(int a, int b) const {
        auto it = seg_index.find(edge_key(a, b));
        return it != seg_index.end() && segs[it->second].alive;
    }

    int live_seg(int a, int b) const {
        auto it = seg_index.find(edge_key(a, b));
        if (it == seg_index.end() || !segs[it->second].alive) return -1;
        return it->second;
    }

    void init_super(const Point& lo, const Point& hi) {
        const Point c{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
        const double r = 10.0 * (norm(hi - lo) + 1.0);
        scale = norm(hi - lo) + 1.0;
        pts = {Point{c.x - 2 * r, c.y - r}, Point{c.x + 2 * r, c.y - r}, Point{c.x, c.y + 2 * r}};
        tris.push_back(Tri{{0, 1, 2}, {-1, -1, -1}});
        vtri = {0, 0, 0};
    }

    int nb_slot(int t, int other) const {
        for (int i = 0; i < 3; ++i)
            if (tris[t].nb[i] == other) return i;
        throw solver_error("mesh: adjacency corrupted");
    }

    int vert_slot(int t, int v) const {
        for (int i = 0; i < 3; ++i)
            if (tris[t].v[i] == v) return i;
        throw solver_error("mesh: vertex slot missing");
    }

    void hook(int t, int i, int n) {
        tris[t].nb[i] = n;
        if (n >= 0) {
            // fix the reciprocal pointer by geometric match of the shared edge
            const int a = tris[t].v[(i + 1) % 3];
            const int b = tris[t].v[(i + 2) % 3];
            for (int j = 0; j < 3; ++j) {
                const int x = tris[n].v[(j + 1) % 3];
                const int y = tris[n].v[(j + 2) % 3];
                if ((x == a && y == b) || (x == b && y == a)) {
                    tris[n].nb[j] = t;
                    return;
                }
            }
            throw solver_error("mesh: hook failed");
        }
    }

    struct Location {
        int tri = -1;
        int on_edge = -1; // edge slot if the point lies on it
        int crossed_seg = -1;
    };

    // Straight walk toward p. If stop_at_constraints, report the first
    // constrained edge whose crossing would be required.
    Location locate(Point p, int hint, bool stop_at_constraints = false) const {
        int t = hint;
        if (t < 0 || t >= static_cast<int>(tris.size()) || !tris[t].alive) {
            t = -1;
            for (int i = static_cast<int>(tris.size()) - 1; i >= 0; --i)
                if (tris[i].alive) {
                    t = i;
                    break;
                }
        }
        int prev = -1;
        const int limit = static_cast<int>(tris.size()) * 4 + 64;
        for (int step = 0; step < limit; ++step) {
            const Tri& tr = tris[t];
            int exit_edge = -1;
            int zero_edge = -1;
            int back_edge = -1;
            double worst = 0.0;
            for (int i = 0; i < 3; ++i) {
                const Point& a = pts[tr.v[(i + 1) % 3]];
                const Point& b = pts[tr.v[(i + 2) % 3]];
                const double d = cross(b - a, p - a);
                const double eps = 1e-13 * scale * scale;
                if (d < -eps) {
                    if (tr.nb[i] != prev && d < worst) {
                        worst = d;
                        exit_edge = i;
                    }
                    if (tr.nb[i] == prev) back_edge = i;
                } else if (d <= eps) {
                    zero_edge = i;
                }
            }
            if (exit_edge < 0 && back_edge >= 0) exit_edge = back_edge;
            if (exit_edge < 0) {
                Location loc;
                loc.tri = t;
                loc.on_edge = zero_edge;
                return loc;
            }
            if (stop_at_constraints &&
                is_constrained(tr.v[(exit_edge + 1) % 3], tr.v[(exit_edge + 2) % 3])) {
                Location loc;
                loc.tri = t;
                loc.crossed_seg =
                    live_seg(tr.v[(exit_edge + 1) % 3], tr.v[(exit_edge + 2) % 3]);
                return loc;
            }
            const int next = tr.nb[exit_edge];
            if (next < 0) {
                Location loc;
                loc.tri = t;
                return loc;
            }
            prev = t;
            t = next;
        }
        // Degenerate walk; fall back to exhaustive scan.
        for (int i = 0; i < static_cast<int>(tris.size()); ++i) {
            if (!tris[i].alive) continue;
            const Tri& tr = tris[i];
            bool inside = true;
            int zero_edge = -1;
            for (int e = 0; e < 3 && inside; ++e) {
                const Point& a = pts[tr.v[(e + 1) % 3]];
                const Point& b = pts[tr.v[(e + 2) % 3]];
                const int s = orient_sign(a, b, p);
                if (s < 0) inside = false;
                if (s == 0) zero_edge = e;
            }
            if (inside) {
                Location loc;
                loc.tri = i;
                loc.on_edge = zero_edge;
                return loc;
            }
        }
        throw solver_error("mesh: point location failed");
    }

    void legalize_around(int w, std::vector<std::pair<int, int>>& stack,
                         std::vector<int>* touched) {
        while (!stack.empty()) {
            auto [t, i] = stack.back();
            stack.pop_back();
            if (!tris[t].alive) continue;
            if (tris[t].v[i] != w) {
                bool found = false;
                for (int k = 0; k < 3; ++k)
                    if (tris[t].v[k] == w) {
                        i = k;
                        found = true;
                    }
                if (!found) continue;
            }
            const int t2 = tris[t].nb[i];
            if (t2 < 0) continue;
            const int a = tris[t].v[(i + 1) % 3];
            const int b = tris[t].v[(i + 2) % 3];
            if (is_constrained(a, b)) continue;
            const int j = nb_slot(t2, t);
            const int d = tris[t2].v[j];
            if (!in_circle(pts[tris[t].v[0]], pts[tris[t].v[1]], pts[tris[t].v[2]], pts[d]))
                continue;
            flip(t, i);
            if (touched) {
                touched->push_back(t);
                touched->push_back(t2);
            }
            stack.push_back({t, vert_slot(t, w)});
            stack.push_back({t2, vert_slot(t2, w)});
        }
    }

    // Flip the edge opposite slot i of triangle t with its neighbor.
    void flip(int t, int i) {
        const int t2 = tris[t].nb[i];
        const int j = nb_slot(t2, t);
        const int p = tris[t].v[i];
        const int a = tris[t].v[(i + 1) % 3];
        const int b = tris[t].v[(i + 2) % 3];
        const int d = tris[t2].v[j];
        const int region = tris[t].region;

        const int nb_ta = tris[t].nb[(i + 1) % 3];  // across (b,p)
        const int nb_tb = tris[t].nb[(i + 2) % 3];  // across (p,a)
        const int ja = (j + 1) % 3, jb = (j + 2) % 3;
        int nb_t2a = -1, nb_t2b = -1; // across (a,d) and (d,b) in t2
        {
            // t2 holds edge (b,a) opposite d; identify its other two edges
            for (int k : {ja, jb}) {
                const int x = tris[t2].v[(k + 1) % 3];
                const int y = tris[t2].v[(k + 2) % 3];
                if ((x == a && y == d) || (x == d && y == a)) nb_t2a = tris[t2].nb[k];
                if ((x == d && y == b) || (x == b && y == d)) nb_t2b = tris[t2].nb[k];
            }
        }

        tris[t] = Tri{{p, a, d}, {-1, -1, -1}, region, true};
        tris[t2] = Tri{{p, d, b}, {-1, -1, -1}, region, true};
        // t: edges (a,d) opp p, (d,p) opp a, (p,a) opp d
        hook(t, 0, nb_t2a);
        hook(t, 1, t2);
        hook(t, 2, nb_tb);
        // t2: edges (d,b) opp p, (b,p) opp d, (p,d) opp b
        hook(t2, 0, nb_t2b);
        hook(t2, 1, nb_ta);
        vtri[p] = t;
        vtri[a] = t;
        vtri[d] = t;
        vtri[b] = t2;
    }

    int new_vertex(Point p) {
        if (pts.size() >= node_budget)
            throw solver_error("mesh: node budget exceeded (" + std::to_string(node_budget) +
                               " nodes) before reaching target size/quality");
        pts.push_back(p);
        vtri.push_back(-1);
        return static_cast<int>(pts.size()) - 1;
    }

    // Insert p strictly inside triangle t. Returns vertex id.
    int insert_in_triangle(int t, Point p, std::vector<int>* touched) {
        const int w = new_vertex(p);
        const Tri old = tris[t];
        const int t1 = static_cast<int>(tris.size());
        const int t2 = t1 + 1;
        tris[t] = Tri{{w, old.v[0], old.v[1]}, {-1, -1, -1}, old.region, true};
        tris.push_back(Tri{{w, old.v[1], old.v[2]}, {-1, -1, -1}, old.region, true});
        tris.push_back(Tri{{w, old.v[2], old.v[0]}, {-1, -1, -1}, old.region, true});
        hook(t, 0, old.nb[2]);
        hook(t, 1, t1);
        hook(t, 2, t2);
        hook(t1, 0, old.nb[0]);
        hook(t1, 1, t2);
        hook(t2, 0, old.nb[1]);
        vtri[w] = t;
        vtri[old.v[0]] = t;
        vtri[old.v[1]] = t1;
        vtri[old.v[2]] = t2;
        if (touched) {
            touched->push_back(t);
            touched->push_back(t1);
            touched->push_back(t2);
        }
        std::vector<std::pair<int, int>> stack{{t, 0}, {t1, 0}, {t2, 0}};
        legalize_around(w, stack, touched);
        return w;
    }

    // Insert p on the edge opposite slot i of triangle t.
    int insert_on_edge(int t, int i, Point p, std::vector<int>* touched) {
        const int t2 = tris[t].nb[i];
        const int w = new_vertex(p);
        const int c = tris[t].v[i];
        const int a = tris[t].v[(i + 1) % 3];
        const int b = tris[t].v[(i + 2) % 3];

        const int seg = live_seg(a, b);
        if (seg >= 0) {
            // split the constraint: (a,b) -> (a,w), (w,b)
            const int tag = segs[seg].tag;
            segs[seg].alive = false;
            seg_index.erase(edge_key(a, b));
            add_segment(a, w, tag);
            add_segment(w, b, tag);
        }

        const Tri oldt = tris[t];
        const int regt = oldt.region;
        const int nb_ca = oldt.nb[(i + 2) % 3]; // across (c,a)
        const int nb_bc = oldt.nb[(i + 1) % 3]; // across (b,c)
        const int tA = static_cast<int>(tris.size());
        tris[t] = Tri{{c, a, w}, {-1, -1, -1}, regt, true};
        tris.push_back(Tri{{c, w, b}, {-1, -1, -1}, regt, true});
        hook(t, 0, -1); // (a,w): hooked to the far side below
        hook(t, 1, tA);
        hook(t, 2, nb_ca);
        hook(tA, 0, -1); // (w,b): hooked from the far side below
        hook(tA, 1, nb_bc);
        vtri[c] = t;
        vtri[a] = t;
        vtri[b] = tA;
        vtri[w] = t;
        if (touched) {
            touched->push_back(t);
            touched->push_back(tA);
        }

        std::vector<std::pair<int, int>> stack{{t, vert_slot(t, w)}, {tA, vert_slot(tA, w)}};
        if (t2 >= 0) {
            const int j = nb_slot(t2, t); // opposite the shared edge in t2
            const Tri oldu = tris[t2];
            const int d = oldu.v[j];
            const int regu = oldu.region;
            // t2 = (d, b, a) up to rotation: find neighbors across (d,b) and (a,d)
            int nb_db = -1, nb_ad = -1;
            for (int k = 0; k < 3; ++k) {
                const int x = oldu.v[(k + 1) % 3];
                const int y = oldu.v[(k + 2) % 3];
                if ((x == d && y == b) || (x == b && y == d)) nb_db = oldu.nb[k];
                if ((x == a && y == d) || (x == d && y == a)) nb_ad = oldu.nb[k];
            }
            const int tB = static_cast<int>(tris.size());
            tris[t2] = Tri{{d, w, a}, {-1, -1, -1}, regu, true};
            tris.push_back(Tri{{d, b, w}, {-1, -1, -1}, regu, true});
            hook(t2, 0, t);   // (w,a) pairs with t's (a,w)
            hook(t2, 1, nb_ad);
            hook(t2, 2, tB);
            hook(tB, 0, tA); // (b,w) pairs with tA's (w,b)
            hook(tB, 2, nb_db);
            vtri[d] = t2;
            if (touched) {
                touched->push_back(t2);
                touched->push_back(tB);
            }
            stack.push_back({t2, vert_slot(t2, w)});
            stack.push_back({tB, vert_slot(tB, w)});
        }
        legalize_around(w, stack, touched);
        return w;
    }

    void add_segment(int a, int b, int tag) {
        segs.push_back(Segment{a, b, tag, true});
        seg_index[edge_key(a, b)] = static_cast<int>(segs.size()) - 1;
    }

    bool edge_exists(int a, int b) const {
        // walk the fan around a
        int t = vtri[a];
        if (t < 0) return false;
        const int start = t;
        // rotate CCW
        for (int guard = 0; guard < 512; ++guard) {
            const int i = vert_slot(t, a);
            if (tris[t].v[(i + 1) % 3] == b || tris[t].v[(i + 2) % 3] == b) return true;
            const int next = tris[t].nb[(i + 1) % 3];
            if (next < 0) break;
            t = next;
            if (t == start) return false;
        }
        // rotate CW from start for boundary fans
        t = start;
        for (int guard = 0; guard < 512; ++guard) {
            const int i = vert_slot(t, a);
            if (tris[t].v[(i + 1) % 3] == b || tris[t].v[(i + 2) % 3] == b) return true;
            const int next = tris[t].nb[(i + 2) % 3];
            if (next < 0) return false;
            t = next;
            if (t == start) return false;
        }
        return false;
    }

    // Force edge (a,b) into the triangulation by flipping crossing edges.
    void recover_edge(int a, int b) {
        for (int guard = 0; guard < 4096; ++guard) {
            if (edge_exists(a, b)) return;
            // find the triangle at a whose opposite edge crosses (a,b)
            int t = vtri[a];
            const Point& pa = pts[a];
            const Point& pb = pts[b];
            int cross_t = -1, cross_e = -1;
            const int start = t;
            for (int g2 = 0; g2 < 1024; ++g2) {
                const int i = vert_slot(t, a);
                const int u = tris[t].v[(i + 1) % 3];
                const int v = tris[t].v[(i + 2) % 3];
                if (orient_sign(pa, pb, pts[u]) >= 0 && orient_sign(pa, pb, pts[v]) <= 0 &&
                    orient_sign(pts[u], pts[v], pa) * orient_sign(pts[u], pts[v], pb) < 0) {
                    cross_t = t;
                    cross_e = i;
                    break;
                }
                const int next = tris[t].nb[(i + 1) % 3];
                if (next < 0) break;
                t = next;
                if (t == start) break;
            }
            if (cross_t < 0) {
                // try the other rotation direction
                t = start;
                for (int g2 = 0; g2 < 1024; ++g2) {
                    const int i = vert_slot(t, a);
                    const int u = tris[t].v[(i + 1) % 3];
                    const int v = tris[t].v[(i + 2) % 3];
                    if (orient_sign(pa, pb, pts[u]) >= 0 && orient_sign(pa, pb, pts[v]) <= 0 &&
                        orient_sign(pts[u], pts[v], pa) * orient_sign(pts[u], pts[v], pb) < 0) {
                        cross_t = t;
                        cross_e = i;
                        break;
                    }
                    const int next = tris[t].nb[(i + 2) % 3];
                    if (next < 0) break;
                    t = next;
                    if (t == start) break;
                }
            }
            if (cross_t < 0)
                throw solver_error("mesh: constrained edge recovery failed to start");
            // march along (a,b), flipping crossing edges when the quad is convex
            int t_cur = cross_t, e_cur = cross_e;
            bool flipped = false;
            for (int g3 = 0; g3 < 4096 && !flipped; ++g3) {
                const int u = tris[t_cur].v[(e_cur + 1) % 3];
                const int v = tris[t_cur].v[(e_cur + 2) % 3];
                const int t2 = tris[t_cur].nb[e_cur];
                if (t2 < 0) throw solver_error("mesh: edge recovery hit the hull");
                const int j = nb_slot(t2, t_cur);
                const int d = tris[t2].v[j];
                const int p = tris[t_cur].v[e_cur];
                // flippable when p and d lie on opposite sides of (u,v) making a convex quad
                const bool convex = orient_sign(pts[p], pts[d], pts[u]) *
                                        orient_sign(pts[p], pts[d], pts[v]) < 0;
                if (convex && !is_constrained(u, v)) {
                    flip(t_cur, e_cur);
                    flipped = true;
                } else {
                    // advance to the next crossing edge within t2
                    const Point& qa = pts[a];
                    const Point& qb = pts[b];
                    int next_e = -1;
                    for (int k = 0; k < 3; ++k) {
                        if (k == j) continue;
                        const int x = tris[t2].v[(k + 1) % 3];
                        const int y = tris[t2].v[(k + 2) % 3];
                        if (x == b || y == b) continue;
                        if (orient_sign(pts[x], pts[y], qa) * orient_sign(pts[x], pts[y], qb) < 0 &&
                            orient_sign(qa, qb, pts[x]) * orient_sign(qa, qb, pts[y]) < 0) {
                            next_e = k;
                            break;
                        }
                    }
                    if (next_e < 0) throw solver_error("mesh: edge recovery lost the corridor");
                    t_cur = t2;
                    e_cur = next_e;
                }
            }
            if (!flipped) throw solver_error("mesh: edge recovery stalled");
        }
        throw solver_error("mesh: constrained edge recovery did not converge");
    }
};

double tri_min_angle(const Point& a, const Point& b, const Point& c) {
    auto corner = [](const Point& p, const Point& q, const Point& r) {
        const Point u = q - p, v = r - p;
        return std::atan2(std::abs(cross(u, v)), dot(u, v));
    };
    return std::min({corner(a, b, c), corner(b, c, a), corner(c, a, b)});
}

Point circumcenter(const Point& a, const Point& b, const Point& c) {
    const double d = 2.0 * cross(b - a, c - a);
    const double a2 = dot(a, a), b2 = dot(b, b), c2 = dot(c, c);
    return Point{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
                 (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
}

double circumradius(const Point& a, const Point& b, const Point& c) {
    const double area2 = std::abs(cross(b - a, c - a));
    if (area2 == 0.0) return std::numeric_limits<double>::infinity();
    return norm(b - a) * norm(c - a) * norm(c - b) / (2.0 * area2);
}

// Interior point of a simple polygon: centroid if it works, otherwise the
// centroid of the first valid ear.
Point polygon_interior_point(const geo::Polygon& poly) {
    const auto& v = poly.vertices;
    Point c{0, 0};
    for (const Point& p : v) c = c + p;
    c = (1.0 / static_cast<double>(v.size())) * c;
    if (poly.contains(c)) return c;
    const size_t k = v.size();
    for (size_t i = 0; i < k; ++i) {
        const Point& a = v[(i + k - 1) % k];
        const Point& b = v[i];
        const Point& d = v[(i + 1) % k];
        if (cross(b - a, d - b) <= 0) continue;
        const Point m{(a.x + b.x + d.x) / 3.0, (a.y + b.y + d.y) / 3.0};
        if (poly.contains(m)) return m;
    }
    throw solver_error("mesh: cannot find an interior point of a hole polygon");
}

} // namespace

double Mesh::triangle_area(int t) const {
    const auto& tr = triangles[t];
    return 0.5 * cross(nodes[tr[1]] - nodes[tr[0]], nodes[tr[2]] - nodes[tr[0]]);
}

double Mesh::total_area() const {
    double s = 0.0;
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) s += triangle_area(t);
    return s;
}

double Mesh::min_angle_deg() const {
    double m = std::numbers::pi;
    for (const auto& tr : triangles)
        m = std::min(m, tri_min_angle(nodes[tr[0]], nodes[tr[1]], nodes[tr[2]]));
    return m * 180.0 / std::numbers::pi;
}

int Mesh::euler_characteristic() const {
    std::unordered_map<uint64_t, int> edges;
    for (const auto& tr : triangles)
        for (int e = 0; e < 3; ++e) edges[edge_key(tr[e], tr[(e + 1) % 3])] = 1;
    return static_cast<int>(nodes.size()) - static_cast<int>(edges.size()) +
           static_cast<int>(triangles.size());
}

int Mesh::loop_count(int tag) const {
    std::vector<int> parent(nodes.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    int count = 0;
    std::vector<bool> seen(nodes.size(), false);
    for (const auto& e : boundary_edges) {
        if (e.tag != tag) continue;
        seen[e.a] = seen[e.b] = true;
        const int ra = find(e.a), rb = find(e.b);
        if (ra != rb) parent[ra] = rb;
    }
    std::vector<bool> counted(nodes.size(), false);
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (!seen[i]) continue;
        const int r = find(static_cast<int>(i));
        if (!counted[r]) {
            counted[r] = true;
            ++count;
        }
    }
    return count;
}

Mesh generate_mesh(const geo::DomainWithHoles& dom, double h, const MeshOptions& opts) {
    if (!(h > 0.0)) throw input_error("generate_mesh: h must be positive");
    const double rin = geo::inradius(dom.outer);
    if (h >= rin / 4.0)
        throw input_error("generate_mesh: h must be smaller than inradius/4 = " +
                          format_double(rin / 4.0));
    {
        // hole separation: hole-to-boundary and hole-to-hole clearances
        double sep = std::numeric_limits<double>::infinity();
        const auto& ov = dom.outer.vertices();
        for (const auto& hole : dom.holes)
            for (const Point& p : hole.vertices) {
                double d = std::numeric_limits<double>::infinity();
                for (size_t i = 0; i < ov.size(); ++i)
                    d = std::min(d, geo::point_segment_distance(p, ov[i], ov[(i + 1) % ov.size()]));
                sep = std::min(sep, d);
            }
        for (size_t i = 0; i < dom.holes.size(); ++i)
            for (size_t j = i + 1; j < dom.holes.size(); ++j)
                for (const Point& p : dom.holes[i].vertices) {
                    const auto& w = dom.holes[j].vertices;
                    for (size_t k = 0; k < w.size(); ++k)
                        sep = std::min(sep,
                                       geo::point_segment_distance(p, w[k], w[(k + 1) % w.size()]));
                }
        if (!dom.holes.empty() && h >= sep / 4.0)
            throw input_error("generate_mesh: h must be smaller than hole separation/4 = " +
                              format_double(sep / 4.0));
    }

    Triangulator tg;
    tg.node_budget = opts.node_budget + 3;
    Point lo{1e308, 1e308}, hi{-1e308, -1e308};
    for (const Point& p : dom.outer.vertices()) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
    tg.init_super(lo, hi);

    // Boundary vertices: every ring edge split into pieces of length <= h.
    struct RingPoint {
        Point p;
        int tag;
    };
    std::vector<std::vector<int>> rings;
    auto add_ring = [&](const std::vector<Point>& verts, int tag) {
        std::vector<int> ids;
        const size_t k = verts.size();
        for (size_t i = 0; i < k; ++i) {
            const Point a = verts[i];
            const Point b = verts[(i + 1) % k];
            const int m = std::max(1, static_cast<int>(std::ceil(norm(b - a) / h)));
            for (int s = 0; s < m; ++s) {
                const Point p = a + (static_cast<double>(s) / m) * (b - a);
                auto locv = tg.locate(p, -1);
                std::vector<int> touched;
                int id;
                if (locv.on_edge >= 0)
                    id = tg.insert_on_edge(locv.tri, locv.on_edge, p, &touched);
                else
                    id = tg.insert_in_triangle(locv.tri, p, &touched);
                ids.push_back(id);
            }
        }
        for (size_t i = 0; i < ids.size(); ++i) {
            const int a = ids[i];
            const int b = ids[(i + 1) % ids.size()];
            tg.recover_edge(a, b);
            tg.add_segment(a, b, tag);
        }
        rings.push_back(ids);
        return ids;
    };

    add_ring(dom.outer.vertices(), kTagOuter);
    for (const auto& hole : dom.holes) add_ring(hole.vertices, kTagHole);

    // Region classification by constraint-bounded flood fill.
    auto flood = [&](int seed_tri, int region) {
        std::deque<int> q{seed_tri};
        tg.tris[seed_tri].region = region;
        while (!q.empty()) {
            const int t = q.front();
            q.pop_front();
            for (int e = 0; e < 3; ++e) {
                const int n = tg.tris[t].nb[e];
                if (n < 0 || tg.tris[n].region != Tri::kRegionUnknown) continue;
                const int a = tg.tris[t].v[(e + 1) % 3];
                const int b = tg.tris[t].v[(e + 2) % 3];
                if (tg.is_constrained(a, b)) continue;
                tg.tris[n].region = region;
                q.push_back(n);
            }
        }
    };
    flood(tg.vtri[0], Tri::kRegionExterior);
    for (size_t k = 0; k < dom.holes.size(); ++k) {
        const Point hp = polygon_interior_point(dom.holes[k]);
        flood(tg.locate(hp, -1).tri, 1 + static_cast<int>(k));
    }
    for (auto& t : tg.tris)
        if (t.alive && t.region == Tri::kRegionUnknown) t.region = Tri::kRegionInterior;

    // Ruppert refinement: split encroached subsegments, then insert
    // circumcenters of skinny or oversized interior triangles.
    const double min_angle = opts.min_angle_deg * std::numbers::pi / 180.0;
    auto is_bad = [&](int t) {
        const Tri& tr = tg.tris[t];
        if (!tr.alive || tr.region != Tri::kRegionInterior) return false;
        const Point& a = tg.pts[tr.v[0]];
        const Point& b = tg.pts[tr.v[1]];
        const Point& c = tg.pts[tr.v[2]];
        return circumradius(a, b, c) > h || tri_min_angle(a, b, c) < min_angle;
    };
    auto encroached_by = [&](const Segment& s, const Point& p) {
        const Point m = 0.5 * (tg.pts[s.a] + tg.pts[s.b]);
        const double r2 = dot(tg.pts[s.a] - m, tg.pts[s.a] - m);
        const Point d = p - m;
        return dot(d, d) < r2 * (1.0 - 1e-12);
    };

    std::vector<int> work;
    for (int t = 0; t < static_cast<int>(tg.tris.size()); ++t)
        if (is_bad(t)) work.push_back(t);

    std::deque<int> seg_queue;
    auto queue_seg_if_encroached = [&](int si) {
        const Segment& s = tg.segs[si];
        if (!s.alive) return;
        // apex vertices of the two adjacent triangles suffice as witnesses
        int t = tg.vtri[s.a];
        const int start = t;
        for (int guard = 0; guard < 512; ++guard) {
            const int i = tg.vert_slot(t, s.a);
            for (int e = 0; e < 3; ++e) {
                const int x = tg.tris[t].v[(e + 1) % 3];
                const int y = tg.tris[t].v[(e + 2) % 3];
                if ((x == s.a && y == s.b) || (x == s.b && y == s.a)) {
                    const int apex = tg.tris[t].v[e];
                    if (encroached_by(s, tg.pts[apex])) {
                        seg_queue.push_back(si);
                        return;
                    }
                }
            }
            const int next = tg.tris[t].nb[(i + 1) % 3];
            if (next < 0) break;
            t = next;
            if (t == start) break;
        }
    };

    auto split_segment = [&](int si, std::vector<int>& touched) {
        const Segment s = tg.segs[si];
        if (!s.alive) return;
        const Point mid = 0.5 * (tg.pts[s.a] + tg.pts[s.b]);
        // find the triangle holding this edge to split in place
        int t = tg.vtri[s.a];
        const int start = t;
        for (int guard = 0; guard < 1024; ++guard) {
            int slot = -1;
            for (int e = 0; e < 3; ++e) {
                const int x = tg.tris[t].v[(e + 1) % 3];
                const int y = tg.tris[t].v[(e + 2) % 3];
                if ((x == s.a && y == s.b) || (x == s.b && y == s.a)) slot = e;
            }
            if (slot >= 0) {
                const int w = tg.insert_on_edge(t, slot, mid, &touched);
                // requeue the two halves if they are still encroached
                const int h1 = tg.live_seg(s.a, w);
                const int h2 = tg.live_seg(w, s.b);
                if (h1 >= 0) queue_seg_if_encroached(h1);
                if (h2 >= 0) queue_seg_if_encroached(h2);
                return;
            }
            const int i = tg.vert_slot(t, s.a);
            const int next = tg.tris[t].nb[(i + 1) % 3];
            if (next < 0) break;
            t = next;
            if (t == start) break;
        }
        throw solver_error("mesh: lost a constrained segment during refinement");
    };

    std::size_t processed = 0;
    while (!work.empty() || !seg_queue.empty()) {
        if (++processed > 50 * opts.node_budget)
            throw solver_error("mesh: refinement failed to settle (budget " +
                               std::to_string(opts.node_budget) + " nodes, " +
                               std::to_string(tg.pts.size()) + " placed)");
        std::vector<int> touched;
        if (!seg_queue.empty()) {
            const int si = seg_queue.front();
            seg_queue.pop_front();
            split_segment(si, touched);
        } else {
            const int t = work.back();
            work.pop_back();
            if (!is_bad(t)) continue;
            const Tri tr = tg.tris[t];
            const Point cc = circumcenter(tg.pts[tr.v[0]], tg.pts[tr.v[1]], tg.pts[tr.v[2]]);
            // splitting any encroached subsegment takes priority
            bool enc = false;
            for (int si = 0; si < static_cast<int>(tg.segs.size()); ++si) {
                if (tg.segs[si].alive && encroached_by(tg.segs[si], cc)) {
                    seg_queue.push_back(si);
                    enc = true;
                }
            }
            if (enc) {
                work.push_back(t);
                continue;
            }
            auto loc = tg.locate(cc, t, /*stop_at_constraints=*/true);
            if (loc.crossed_seg >= 0) {
                seg_queue.push_back(loc.crossed_seg);
                work.push_back(t);
                continue;
            }
            if (!tg.tris[loc.tri].alive || tg.tris[loc.tri].region != Tri::kRegionInterior) {
                // circumcenter escaped the domain without a recorded crossing;
                // split the longest live segment to make progress
                int best = -1;
                double best_len = -1.0;
                for (int si = 0; si < static_cast<int>(tg.segs.size()); ++si) {
                    const Segment& s = tg.segs[si];
                    if (!s.alive) continue;
                    const double len = norm(tg.pts[s.a] - tg.pts[s.b]);
                    if (len > best_len) {
                        best = si;
                        best_len = len;
                    }
                }
                if (best >= 0) seg_queue.push_back(best);
                work.push_back(t);
                continue;
            }
            if (loc.on_edge >= 0)
                tg.insert_on_edge(loc.tri, loc.on_edge, cc, &touched);
            else
                tg.insert_in_triangle(loc.tri, cc, &touched);
        }
        for (const int t : touched)
            if (is_bad(t)) work.push_back(t);
    }

    // Extract the interior mesh.
    Mesh mesh;
    mesh.h = h;
    std::vector<int> remap(tg.pts.size(), -1);
    for (const auto& tr : tg.tris) {
        if (!tr.alive || tr.region != Tri::kRegionInterior) continue;
        std::array<int, 3> out{};
        for (int e = 0; e < 3; ++e) {
            const int v = tr.v[e];
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(mesh.nodes.size());
                mesh.nodes.push_back(tg.pts[v]);
            }
            out[e] = remap[v];
        }
        if (cross(mesh.nodes[out[1]] - mesh.nodes[out[0]],
                  mesh.nodes[out[2]] - mesh.nodes[out[0]]) <= 0.0)
            throw solver_error("mesh: extracted a non-CCW triangle");
        mesh.triangles.push_back(out);
    }
    for (const auto& s : tg.segs) {
        if (!s.alive) continue;
        if (remap[s.a] < 0 || remap[s.b] < 0)
            throw solver_error("mesh: boundary segment detached from the interior");
        mesh.boundary_edges.push_back(BoundaryEdge{remap[s.a], remap[s.b], s.tag});
    }
    return mesh;
}

Mesh read_mesh(std::istream& in) {
    Mesh mesh;
    std::string kw;
    int lineno = 0;
    auto fail = [&](const std::string& what) -> void {
        throw input_error("mesh file, line " + std::to_string(lineno) + ": " + what);
    };
    std::string line;
    enum { NONE, NODES, TRIS, EDGES } state = NONE;
    int remaining = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "$nodes" || first == "$triangles" || first == "$edges") {
            int count = 0;
            std::istringstream(line.substr(first.size())) >> count;
            if (count < 0) fail("bad count");
            remaining = count;
            state = first == "$nodes" ? NODES : (first == "$triangles" ? TRIS : EDGES);
            continue;
        }
        if (remaining <= 0 || state == NONE) fail("data outside a section");
        std::istringstream ds(line);
        if (state == NODES) {
            geo::Point p;
            if (!(ds >> p.x >> p.y)) fail("expected 'x y'");
            mesh.nodes.push_back(p);
        } else if (state == TRIS) {
            std::array<int, 3> t{};
            if (!(ds >> t[0] >> t[1] >> t[2])) fail("expected 'i j k'");
            mesh.triangles.push_back(t);
        } else {
            BoundaryEdge e;
            if (!(ds >> e.a >> e.b >> e.tag)) fail("expected 'i j tag'");
            mesh.boundary_edges.push_back(e);
        }
        --remaining;
    }
    const int n = static_cast<int>(mesh.nodes.size());
    for (const auto& t : mesh.triangles)
        for (int v : t)
            if (v < 0 || v >= n) throw input_error("mesh file: triangle index out of range");
    for (const auto& e : mesh.boundary_edges)
        if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n)
            throw input_error("mesh file: edge index out of range");
    return mesh;
}

Mesh read_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open mesh file: " + path);
    return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
    out << "$nodes " << mesh.nodes.size() << "\n";
    for (const auto& p : mesh.nodes)
        out << format_double(p.x) << " " << format_double(p.y) << "\n";
    out << "$triangles " << mesh.triangles.size() << "\n";
    for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "$edges " << mesh.boundary_edges.size() << "\n";
    for (const auto& e : mesh.boundary_edges) out << e.a << " " << e.b << " " << e.tag << "\n";
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open for writing: " + path);
    write_mesh(out, mesh);
}

} // namespace plrn::fem
