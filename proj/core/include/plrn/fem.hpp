#pragma once

#include <iosfwd>
#include <span>

#include "plrn/mesh.hpp"
#include "plrn/radial.hpp"
#include "plrn/sparse.hpp"

namespace plrn::fem {

enum class FieldMode { Eigen, Torsion };

struct FemOptions {
    int max_iter = 500;
    double damping = 0.5;          // theta for the frozen-coefficient iteration
    double epsilon_scale = 1e-8;   // regularization = scale * domain diameter
    double value_tol = 1e-10;      // |lambda_{k+1} - lambda_k| <= tol (1 + |lambda|)
    double nodal_tol = 1e-8;
    double linear_tol = 1e-12;     // PCG relative residual
};

struct FemField {
    std::vector<double> u; // nodal values
    radial::ProblemParams params;
    FieldMode mode{FieldMode::Eigen};
    double value{};      // lambda (eigen, normalized so p-mass = 1) or T (torsion)
    int iterations{};
    double change{};     // final outer-iteration nodal change
    double epsilon{};    // regularization actually used
    double energy_identity_residual{}; // torsion: relative defect of the weak identity
};

struct FieldFunctionals {
    double grad_energy{};
    double boundary_term{};
    double p_mass{};
    double mass{};
    double j0{};
    double k0{};
};

// Rayleigh-type functionals of a nodal field: exact per-triangle p-energy of
// the P1 gradient, 3-point midpoint rule for masses, 2-point Gauss on edges.
FieldFunctionals field_functionals(const radial::ProblemParams& params, const Mesh& mesh,
                                   std::span<const double> u);

// First Robin(Gamma0)/Neumann(Gamma1) eigenpair. p = 2 runs generalized
// inverse power iteration; other p minimize the Rayleigh quotient by damped
// frozen-coefficient iteration (beta > 0) or preconditioned projected
// gradient descent with Armijo backtracking (beta < 0).
FemField eigen_fem(const radial::ProblemParams& params, const Mesh& mesh,
                   const FemOptions& opts = {});

// Torsion field (-Lap_p u = 1, Robin/Neumann), beta > 0; value = (int u)^{p-1}.
FemField torsion_fem(const radial::ProblemParams& params, const Mesh& mesh,
                     const FemOptions& opts = {});

// p = 2 Dirichlet(Gamma0)/Neumann(Gamma1) first eigenvalue on the same mesh
// (the beta -> infinity limit of the Robin problem).
double eigen_dirichlet_p2(const Mesh& mesh, const FemOptions& opts = {});

void write_field_csv(std::ostream& out, const Mesh& mesh, const FemField& field);
std::string field_metadata_json(const FemField& field, const Mesh& mesh);

} // namespace plrn::fem
