#pragma once

#include "plrn/fem.hpp"
#include "plrn/geometry.hpp"
#include "plrn/radial.hpp"

namespace plrn::verify {

enum class Branch { PositiveBeta, NegativeBeta };
enum class Mode { Eigen, Torsion };

// Test function transplanted from the radial extremal profile: constant on
// level sets of the boundary distance, u(x) = psi(r2 - d_e(x)) with the deep
// region clipped at psi(r1).
struct WebFunction {
    geo::DomainWithHoles domain;
    geo::AnnulusSpec annulus;
    radial::RadialProfile source;
    Branch branch{Branch::PositiveBeta};
    Mode mode{Mode::Eigen};
    double clip_value{};     // psi(r1): v_M for beta>0, v_m for beta<0
    double boundary_value{}; // psi(r2): the constant trace on Gamma_0
    double inradius{};
    double u_min{};
    double u_max{};

    // Boundary distance with the medial-axis nudge: quadrature points within
    // 1e-12 of a bisector get pushed 1e-10 along the distance gradient.
    double depth(geo::Point x) const;
    double value_at(geo::Point x) const;
    double grad_mag_at(geo::Point x) const;
};

// Construct the web function for the matched annulus of the domain.
WebFunction build_web(const geo::DomainWithHoles& dom, const radial::ProblemParams& params,
                      Mode mode, int steps = 4096);

// Same construction against an explicit annulus (only exercised by tests;
// the production path always matches measure and outer perimeter).
WebFunction build_web_with_annulus(const geo::DomainWithHoles& dom,
                                   const radial::ProblemParams& params, Mode mode,
                                   const geo::AnnulusSpec& annulus, int steps = 4096);

struct WebFunctionals {
    double grad_energy{};
    double boundary_term{}; // beta * trace^p * P(Gamma_0), exact
    double p_mass{};
    double mass{};
    double j0{};
    double k0{};
};

// Element quadrature (7-point, degree 5) of the closed-form web function over
// a mesh of the domain; the boundary term is exact.
WebFunctionals evaluate_functionals(const WebFunction& web, const fem::Mesh& mesh);

} // namespace plrn::verify
