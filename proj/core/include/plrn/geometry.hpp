#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plrn/common.hpp"

namespace plrn::geo {

// Degeneracy tolerance, in length units.
inline constexpr double kGeomTol = 1e-9;

struct Point {
    double x{}, y{};
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

double point_segment_distance(Point p, Point a, Point b);

// Simple (non-self-intersecting) polygon, vertices in CCW order.
struct Polygon {
    std::vector<Point> vertices;

    double signed_area() const;
    double area() const { return std::abs(signed_area()); }
    double perimeter() const;
    bool is_simple() const;
    bool contains(Point p) const; // strict interior, crossing-number test
};

// Strictly convex polygon in CCW order. Construction validates the shape.
class ConvexPolygon {
public:
    static ConvexPolygon make(std::vector<Point> verts);

    const std::vector<Point>& vertices() const { return verts_; }
    double area() const { return area_; }
    double perimeter() const { return perimeter_; }
    bool contains(Point p, double tol = kGeomTol) const;
    // Distance from an interior point to the boundary (min over supporting lines).
    double interior_depth(Point p) const;

private:
    ConvexPolygon(std::vector<Point> v, double area, double perimeter)
        : verts_(std::move(v)), area_(area), perimeter_(perimeter) {}
    std::vector<Point> verts_;
    double area_{};
    double perimeter_{};
};

// Omega = outer \ closure(union of holes).
struct DomainWithHoles {
    ConvexPolygon outer;
    std::vector<Polygon> holes;

    static DomainWithHoles make(ConvexPolygon outer, std::vector<Polygon> holes);

    double area() const;
    double outer_perimeter() const { return outer.perimeter(); }
    bool contains(Point p) const; // inside outer and outside every hole
};

// Concentric annulus B_{r2} \ closed B_{r1} in R^n; r1 = 0 degenerates to the ball.
struct AnnulusSpec {
    int n{2};
    double r1{};
    double r2{};

    static AnnulusSpec make(int n, double r1, double r2);
    double measure() const;          // omega_n (r2^n - r1^n)
    double outer_perimeter() const;  // n omega_n r2^{n-1}
    double gap() const { return r2 - r1; }
};

// Quermassintegrals W_0..W_n. W_0 = volume, n W_1 = perimeter, W_n = omega_n.
struct Quermass {
    int n{};
    std::vector<double> w;

    double volume() const { return w.at(0); }
    double perimeter() const { return n * w.at(1); }
};

Quermass quermass(const ConvexPolygon& poly);
Quermass quermass_ball(int n, double radius);
// Axis-aligned box with the given side lengths: C(n,i) W_i = omega_i e_{n-i}(sides).
Quermass quermass_box(std::span<const double> sides);

// Margins (W_j/w_n)^{1/(n-j)} - (W_i/w_n)^{1/(n-i)} for all 0 <= i < j < n;
// nonnegative for convex bodies, all zero exactly for balls.
std::vector<double> af_chain_margins(const Quermass& q);

// W_2 - n^{-(n-2)/(n-1)} omega_n^{1/(n-1)} P^{(n-2)/(n-1)}; zero identically for n=2.
double w2_margin(const Quermass& q);

struct ParallelBody {
    double volume{};
    double perimeter{};
};

// Minkowski dilation by rho B_1 via the Steiner polynomial (n = 2).
ParallelBody outer_parallel(const ConvexPolygon& poly, double rho);

// Inner parallel body {x : depth(x) > t} by intersecting inward-offset
// supporting half-planes. Empty once t reaches the inradius.
std::optional<ConvexPolygon> inner_parallel(const ConvexPolygon& poly, double t);

double inradius(const ConvexPolygon& poly);

// Distance from x (in the closure of the outer body) to the outer boundary.
// Holes are ignored by the distance.
double distance_to_outer_boundary(const DomainWithHoles& dom, Point x);

// Annulus with measure = volume and outer-ball perimeter = outer_perimeter.
AnnulusSpec matched_annulus(double volume, double outer_perimeter, int n);

struct LevelSlice {
    double live_length{}; // H^1 of the level curve not swallowed by holes
    double live_area{};   // area of the inner parallel body minus hole overlap
    std::optional<ConvexPolygon> body;
};

LevelSlice level_slice(const DomainWithHoles& dom, double s);

// Clip a simple polygon against a convex region (Sutherland-Hodgman).
Polygon clip_convex(const Polygon& subject, const ConvexPolygon& clip);
// Length of the portion of segment [a,b] inside a simple polygon.
double segment_length_inside(const Polygon& poly, Point a, Point b);

// Plain-text domain file I/O:
//   polygon <k>   followed by k lines "x y"
//   hole <k>      blocks for each hole
// Values are written with 17 significant digits.
DomainWithHoles read_domain(std::istream& in);
DomainWithHoles read_domain_file(const std::string& path);
void write_domain(std::ostream& out, const DomainWithHoles& dom);
void write_domain_file(const std::string& path, const DomainWithHoles& dom);

// Regular k-gon inscribed in the circle of the given radius (handy for
// polygonal approximations of disks; perimeter deficit is O(k^-2)).
ConvexPolygon regular_polygon(int k, double radius, Point center = {0.0, 0.0});

} // namespace plrn::geo
