#pragma once

#include <array>
#include <iosfwd>

#include "plrn/geometry.hpp"

namespace plrn::fem {

inline constexpr int kTagOuter = 0; // Gamma_0
inline constexpr int kTagHole = 1;  // Gamma_1

struct BoundaryEdge {
    int a{}, b{};
    int tag{kTagOuter};
};

struct Mesh {
    std::vector<geo::Point> nodes;
    std::vector<std::array<int, 3>> triangles; // CCW
    std::vector<BoundaryEdge> boundary_edges;
    double h{};

    double triangle_area(int t) const;
    double total_area() const;
    double min_angle_deg() const;
    int euler_characteristic() const; // V - E + F; 1 - (#holes)
    int loop_count(int tag) const;    // closed boundary loops carrying the tag
};

struct MeshOptions {
    std::size_t node_budget = 500000;
    double min_angle_deg = 20.0;
};

// Constrained Delaunay triangulation of the domain with Ruppert-style
// refinement: boundary segments split to length <= h, interior refined until
// every triangle has circumradius <= h and minimum angle >= 20 degrees.
Mesh generate_mesh(const geo::DomainWithHoles& dom, double h, const MeshOptions& opts = {});

// Plain-text mesh format: "$nodes N", N lines "x y"; "$triangles M", M lines
// "i j k"; "$edges K", K lines "i j tag". Indices are 0-based.
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh_file(const std::string& path, const Mesh& mesh);

} // namespace plrn::fem
