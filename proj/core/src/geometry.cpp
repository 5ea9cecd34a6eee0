#include "plrn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace plrn::geo {

namespace {

constexpr double kPi = std::numbers::pi;

double shoelace(const std::vector<Point>& v) {
    double s = 0.0;
    const size_t k = v.size();
    for (size_t i = 0; i < k; ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % k];
        s += cross(a, b);
    }
    return 0.5 * s;
}

double ring_perimeter(const std::vector<Point>& v) {
    double s = 0.0;
    const size_t k = v.size();
    for (size_t i = 0; i < k; ++i) s += norm(v[(i + 1) % k] - v[i]);
    return s;
}

bool segments_properly_intersect(Point a, Point b, Point c, Point d) {
    auto orient = [](Point p, Point q, Point r) { return cross(q - p, r - p); };
    const double o1 = orient(a, b, c), o2 = orient(a, b, d);
    const double o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) &&
           o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

double segment_segment_distance(Point a, Point b, Point c, Point d) {
    if (segments_properly_intersect(a, b, c, d)) return 0.0;
    return std::min(std::min(point_segment_distance(a, c, d), point_segment_distance(b, c, d)),
                    std::min(point_segment_distance(c, a, b), point_segment_distance(d, a, b)));
}

// Remove consecutive duplicates and near-collinear vertices, then rotate so
// the lexicographically smallest vertex comes first (canonical tie-break).
std::vector<Point> tidy_ring(std::vector<Point> v) {
    auto dedup = [](std::vector<Point>& w) {
        std::vector<Point> out;
        for (const Point& p : w) {
            if (out.empty() || norm(p - out.back()) > kGeomTol) out.push_back(p);
        }
        while (out.size() > 1 && norm(out.front() - out.back()) <= kGeomTol) out.pop_back();
        w = out;
    };
    dedup(v);
    // Drop vertices whose turn is numerically flat.
    bool changed = true;
    while (changed && v.size() > 3) {
        changed = false;
        for (size_t i = 0; i < v.size(); ++i) {
            const Point& a = v[(i + v.size() - 1) % v.size()];
            const Point& b = v[i];
            const Point& c = v[(i + 1) % v.size()];
            const double sine = cross(b - a, c - b);
            if (std::abs(sine) <= 1e-12 * norm(b - a) * norm(c - b)) {
                v.erase(v.begin() + static_cast<long>(i));
                changed = true;
                break;
            }
        }
    }
    if (!v.empty()) {
        auto it = std::min_element(v.begin(), v.end(), [](Point a, Point b) {
            return a.x != b.x ? a.x < b.x : a.y < b.y;
        });
        std::rotate(v.begin(), it, v.end());
    }
    return v;
}

// Keep the part of the ring with dot(x, nrm) >= c.
std::vector<Point> clip_halfplane(const std::vector<Point>& v, Point nrm, double c) {
    std::vector<Point> out;
    const size_t k = v.size();
    out.reserve(k + 2);
    for (size_t i = 0; i < k; ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % k];
        const double dp = dot(p, nrm) - c;
        const double dq = dot(q, nrm) - c;
        if (dp >= 0.0) out.push_back(p);
        if ((dp > 0.0 && dq < 0.0) || (dp < 0.0 && dq > 0.0)) {
            const double t = dp / (dp - dq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

} // namespace

double point_segment_distance(Point p, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a);
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

double Polygon::signed_area() const { return shoelace(vertices); }

double Polygon::perimeter() const { return ring_perimeter(vertices); }

bool Polygon::is_simple() const {
    const size_t k = vertices.size();
    if (k < 3) return false;
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = i + 1; j < k; ++j) {
            // Skip adjacent edges (they share a vertex).
            if (j == i || (j + 1) % k == i || (i + 1) % k == j) continue;
            if (segments_properly_intersect(vertices[i], vertices[(i + 1) % k],
                                            vertices[j], vertices[(j + 1) % k]))
                return false;
        }
    }
    return true;
}

bool Polygon::contains(Point p) const {
    bool inside = false;
    const size_t k = vertices.size();
    for (size_t i = 0, j = k - 1; i < k; j = i++) {
        const Point& a = vertices[i];
        const Point& b = vertices[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

ConvexPolygon ConvexPolygon::make(std::vector<Point> verts) {
    if (verts.size() < 3) throw input_error("convex polygon needs at least 3 vertices");
    const size_t k = verts.size();
    for (size_t i = 0; i < k; ++i) {
        const Point e = verts[(i + 1) % k] - verts[i];
        if (norm(e) <= kGeomTol) throw input_error("convex polygon has a degenerate edge");
    }
    for (size_t i = 0; i < k; ++i) {
        const Point e0 = verts[i] - verts[(i + k - 1) % k];
        const Point e1 = verts[(i + 1) % k] - verts[i];
        if (cross(e0, e1) <= kGeomTol * norm(e0) * norm(e1))
            throw input_error("polygon is not strictly convex in CCW order");
    }
    const double a = shoelace(verts);
    if (a <= kGeomTol * kGeomTol) throw input_error("convex polygon has nonpositive area");
    const double p = ring_perimeter(verts);
    return ConvexPolygon(std::move(verts), a, p);
}

bool ConvexPolygon::contains(Point p, double tol) const {
    const size_t k = verts_.size();
    for (size_t i = 0; i < k; ++i) {
        const Point& a = verts_[i];
        const Point& b = verts_[(i + 1) % k];
        const Point e = b - a;
        if (cross(e, p - a) < -tol * norm(e)) return false;
    }
    return true;
}

double ConvexPolygon::interior_depth(Point p) const {
    // For a convex region the boundary distance of an interior point is the
    // minimum signed distance over the supporting edge lines.
    double d = std::numeric_limits<double>::infinity();
    const size_t k = verts_.size();
    for (size_t i = 0; i < k; ++i) {
        const Point& a = verts_[i];
        const Point& b = verts_[(i + 1) % k];
        const Point e = b - a;
        d = std::min(d, cross(e, p - a) / norm(e));
    }
    return d;
}

DomainWithHoles DomainWithHoles::make(ConvexPolygon outer, std::vector<Polygon> holes) {
    for (auto& h : holes) {
        if (h.vertices.size() < 3) throw input_error("hole needs at least 3 vertices");
        if (!h.is_simple()) throw input_error("hole polygon is self-intersecting");
        if (h.signed_area() < 0.0) std::reverse(h.vertices.begin(), h.vertices.end());
        if (h.area() <= kGeomTol * kGeomTol) throw input_error("hole has vanishing area");
    }
    // Each hole strictly inside the outer body (convexity: vertex test suffices,
    // and interior depth is concave, so edges stay at least as deep).
    for (const auto& h : holes) {
        for (const Point& p : h.vertices) {
            if (!outer.contains(p) || outer.interior_depth(p) <= kGeomTol)
                throw input_error("hole touches or leaves the outer boundary");
        }
    }
    // Pairwise positive separation (and no nesting).
    for (size_t i = 0; i < holes.size(); ++i) {
        for (size_t j = i + 1; j < holes.size(); ++j) {
            const auto& u = holes[i].vertices;
            const auto& v = holes[j].vertices;
            double sep = std::numeric_limits<double>::infinity();
            for (size_t a = 0; a < u.size(); ++a)
                for (size_t b = 0; b < v.size(); ++b)
                    sep = std::min(sep, segment_segment_distance(
                                            u[a], u[(a + 1) % u.size()],
                                            v[b], v[(b + 1) % v.size()]));
            if (sep <= kGeomTol) throw input_error("holes touch or overlap");
            if (holes[i].contains(v[0]) || holes[j].contains(u[0]))
                throw input_error("nested holes are not allowed");
        }
    }
    double area = outer.area();
    for (const auto& h : holes) area -= h.area();
    if (area <= kGeomTol * kGeomTol) throw input_error("domain has nonpositive area");
    return DomainWithHoles{std::move(outer), std::move(holes)};
}

double DomainWithHoles::area() const {
    double a = outer.area();
    for (const auto& h : holes) a -= h.area();
    return a;
}

bool DomainWithHoles::contains(Point p) const {
    if (!outer.contains(p, 0.0)) return false;
    for (const auto& h : holes)
        if (h.contains(p)) return false;
    return true;
}

AnnulusSpec AnnulusSpec::make(int n, double r1, double r2) {
    if (n < 2) throw input_error("annulus dimension must be >= 2");
    if (r1 < 0.0) throw input_error("annulus inner radius must be >= 0");
    if (r2 <= r1) throw input_error("annulus needs r2 > r1");
    AnnulusSpec a{n, r1, r2};
    if (a.measure() <= 0.0) throw input_error("annulus has nonpositive measure");
    return a;
}

double AnnulusSpec::measure() const {
    return unit_ball_volume(n) * (std::pow(r2, n) - std::pow(r1, n));
}

double AnnulusSpec::outer_perimeter() const {
    return n * unit_ball_volume(n) * std::pow(r2, n - 1);
}

Quermass quermass(const ConvexPolygon& poly) {
    return Quermass{2, {poly.area(), 0.5 * poly.perimeter(), kPi}};
}

Quermass quermass_ball(int n, double radius) {
    if (n < 2) throw input_error("quermass_ball: dimension must be >= 2");
    if (radius <= 0.0) throw input_error("quermass_ball: radius must be positive");
    const double wn = unit_ball_volume(n);
    Quermass q{n, {}};
    q.w.resize(n + 1);
    for (int i = 0; i <= n; ++i) q.w[i] = wn * std::pow(radius, n - i);
    return q;
}

Quermass quermass_box(std::span<const double> sides) {
    const int n = static_cast<int>(sides.size());
    if (n < 2) throw input_error("quermass_box: need at least 2 sides");
    for (double s : sides)
        if (s <= 0.0) throw input_error("quermass_box: sides must be positive");
    // Elementary symmetric polynomials e_0..e_n of the side lengths.
    std::vector<double> e(n + 1, 0.0);
    e[0] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j >= 1; --j) e[j] += sides[i] * e[j - 1];
    auto binom = [](int n_, int k_) {
        double r = 1.0;
        for (int i = 1; i <= k_; ++i) r = r * (n_ - k_ + i) / i;
        return r;
    };
    Quermass q{n, std::vector<double>(n + 1)};
    for (int i = 0; i <= n; ++i)
        q.w[i] = unit_ball_volume(i) * e[n - i] / binom(n, i);
    return q;
}

std::vector<double> af_chain_margins(const Quermass& q) {
    const double wn = unit_ball_volume(q.n);
    std::vector<double> margins;
    for (int i = 0; i < q.n; ++i) {
        for (int j = i + 1; j < q.n; ++j) {
            const double lhs = std::pow(q.w[j] / wn, 1.0 / (q.n - j));
            const double rhs = std::pow(q.w[i] / wn, 1.0 / (q.n - i));
            margins.push_back(lhs - rhs);
        }
    }
    return margins;
}

double w2_margin(const Quermass& q) {
    const int n = q.n;
    if (n < 2 || static_cast<int>(q.w.size()) < 3)
        throw input_error("w2_margin: need W_0..W_2");
    if (n == 2) return q.w[2] - kPi; // both sides are pi; identically zero
    const double p = q.perimeter();
    const double wn = unit_ball_volume(n);
    const double rhs = std::pow(static_cast<double>(n), -(n - 2.0) / (n - 1.0)) *
                       std::pow(wn, 1.0 / (n - 1.0)) * std::pow(p, (n - 2.0) / (n - 1.0));
    return q.w[2] - rhs;
}

ParallelBody outer_parallel(const ConvexPolygon& poly, double rho) {
    if (rho < 0.0) throw input_error("outer_parallel: rho must be >= 0");
    const double a = poly.area();
    const double p = poly.perimeter();
    return ParallelBody{a + p * rho + kPi * rho * rho, p + 2.0 * kPi * rho};
}

std::optional<ConvexPolygon> inner_parallel(const ConvexPolygon& poly, double t) {
    if (t < 0.0) throw input_error("inner_parallel: t must be >= 0");
    if (t == 0.0) return poly;
    std::vector<Point> ring = poly.vertices();
    const auto& v = poly.vertices();
    const size_t k = v.size();
    for (size_t i = 0; i < k && ring.size() >= 3; ++i) {
        const Point a = v[i];
        const Point b = v[(i + 1) % k];
        const Point e = b - a;
        const double len = norm(e);
        const Point nrm{-e.y / len, e.x / len}; // inward for CCW
        const double c = dot(a, nrm) + t;
        ring = clip_halfplane(ring, nrm, c);
    }
    ring = tidy_ring(std::move(ring));
    if (ring.size() < 3) return std::nullopt;
    if (shoelace(ring) <= kGeomTol * kGeomTol) return std::nullopt;
    return ConvexPolygon::make(std::move(ring));
}

double inradius(const ConvexPolygon& poly) {
    double lo = 0.0;
    double hi = std::sqrt(poly.area() / kPi) + kGeomTol; // inball fits in equal-area disk
    while (inner_parallel(poly, hi).has_value()) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (inner_parallel(poly, mid).has_value())
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double distance_to_outer_boundary(const DomainWithHoles& dom, Point x) {
    if (!dom.outer.contains(x))
        throw input_error("distance_to_outer_boundary: point outside the outer body");
    const auto& v = dom.outer.vertices();
    double d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < v.size(); ++i)
        d = std::min(d, point_segment_distance(x, v[i], v[(i + 1) % v.size()]));
    return d;
}

AnnulusSpec matched_annulus(double volume, double outer_perimeter, int n) {
    if (n < 2) throw input_error("matched_annulus: dimension must be >= 2");
    if (volume <= 0.0) throw input_error("matched_annulus: volume must be positive");
    if (outer_perimeter <= 0.0) throw input_error("matched_annulus: perimeter must be positive");
    const double wn = unit_ball_volume(n);
    const double r2 = std::pow(outer_perimeter / (n * wn), 1.0 / (n - 1));
    const double ball_vol = wn * std::pow(r2, n);
    if (volume > ball_vol * (1.0 + 1e-12))
        throw input_error("matched_annulus: volume/perimeter pair violates the isoperimetric inequality");
    const double r1n = std::max(0.0, std::pow(r2, n) - volume / wn);
    const double r1 = std::pow(r1n, 1.0 / n);
    if (r1 >= r2) throw input_error("matched_annulus: degenerate annulus (zero gap)");
    return AnnulusSpec{n, r1, r2};
}

Polygon clip_convex(const Polygon& subject, const ConvexPolygon& clip) {
    std::vector<Point> ring = subject.vertices;
    const auto& v = clip.vertices();
    const size_t k = v.size();
    for (size_t i = 0; i < k && !ring.empty(); ++i) {
        const Point a = v[i];
        const Point b = v[(i + 1) % k];
        const Point e = b - a;
        const double len = norm(e);
        const Point nrm{-e.y / len, e.x / len};
        ring = clip_halfplane(ring, nrm, dot(a, nrm));
    }
    return Polygon{std::move(ring)};
}

double segment_length_inside(const Polygon& poly, Point a, Point b) {
    const Point d = b - a;
    const double len = norm(d);
    if (len == 0.0) return 0.0;
    std::vector<double> ts{0.0, 1.0};
    const auto& v = poly.vertices;
    const size_t k = v.size();
    for (size_t i = 0; i < k; ++i) {
        const Point c = v[i];
        const Point e = v[(i + 1) % k];
        const double denom = cross(d, e - c);
        if (denom == 0.0) continue;
        const double t = cross(c - a, e - c) / denom;
        const double u = cross(c - a, d) / denom;
        if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) ts.push_back(t);
    }
    std::sort(ts.begin(), ts.end());
    double inside = 0.0;
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
        const double tm = 0.5 * (ts[i] + ts[i + 1]);
        if (poly.contains(a + tm * d)) inside += (ts[i + 1] - ts[i]) * len;
    }
    return inside;
}

LevelSlice level_slice(const DomainWithHoles& dom, double s) {
    if (s < 0.0) throw input_error("level_slice: s must be >= 0");
    auto body = inner_parallel(dom.outer, s);
    if (!body) return LevelSlice{0.0, 0.0, std::nullopt};

    double live_area = body->area();
    for (const auto& h : dom.holes) {
        const Polygon overlap = clip_convex(h, *body);
        if (overlap.vertices.size() >= 3) live_area -= overlap.area();
    }

    double eaten = 0.0;
    const auto& bv = body->vertices();
    for (size_t i = 0; i < bv.size(); ++i) {
        const Point a = bv[i];
        const Point b = bv[(i + 1) % bv.size()];
        for (const auto& h : dom.holes) eaten += segment_length_inside(h, a, b);
    }
    return LevelSlice{body->perimeter() - eaten, live_area, std::move(body)};
}

ConvexPolygon regular_polygon(int k, double radius, Point center) {
    if (k < 3) throw input_error("regular_polygon: need k >= 3");
    if (radius <= 0.0) throw input_error("regular_polygon: radius must be positive");
    std::vector<Point> v;
    v.reserve(k);
    for (int i = 0; i < k; ++i) {
        const double a = 2.0 * kPi * i / k;
        v.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
    }
    return ConvexPolygon::make(std::move(v));
}

} // namespace plrn::geo
