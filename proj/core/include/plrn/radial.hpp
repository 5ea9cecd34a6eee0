#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plrn/geometry.hpp"

namespace plrn::radial {

// p in (1,inf), dimension n >= 2, Robin parameter beta != 0.
struct ProblemParams {
    double p{2.0};
    int n{2};
    double beta{1.0};

    static ProblemParams make(double p, int n, double beta);
    double q() const { return 1.0 / (p - 1.0); }
};

enum class ProfileKind { Eigen, Torsion, Constant };

// Sampled radial solution. flux[i] = |psi'|^{p-2} psi' r^{n-1} at r[i];
// psi' recovers as spow(flux / r^{n-1}, 1/(p-1)).
struct RadialProfile {
    geo::AnnulusSpec annulus{2, 0.0, 1.0};
    ProblemParams params;
    ProfileKind kind{ProfileKind::Constant};
    std::vector<double> r, psi, flux;
    std::optional<double> lambda; // eigen mode only
    std::optional<double> torsion; // torsion mode only

    double psi_at(double radius) const;       // monotone cubic-Hermite interpolation
    double dpsi_at(double radius) const;      // psi' from interpolated flux
    double psi_inverse(double value) const;   // valid for strictly monotone psi
    double psi_min() const;
    double psi_max() const;
};

struct ShootResult {
    double residual{};        // |psi'|^{p-2}psi'(r2) + beta psi(r2)^{p-1}
    double residual_scale{};  // |flux term| + |beta term|, for normalization
    bool psi_hit_zero{false};
    double zero_radius{};
    RadialProfile profile;
};

// March the flux system (psi, w) from (1, 0) at r1 to r2 with trial lambda.
// RK4 on a fixed node set: uniform for p = 2, power-graded toward r1 otherwise
// (the flux RHS has a |w|^{1/(p-1)} endpoint singularity there).
// Requires lambda * beta > 0 (eigenvalue and boundary parameter share sign).
ShootResult shoot(const ProblemParams& params, const geo::AnnulusSpec& annulus,
                  double lambda, int steps = 4096);

// Smallest-magnitude eigenvalue of the correct sign, by bracketing the Robin
// residual from lambda = 0 outward and bisecting to 1e-12 relative.
RadialProfile first_eigenvalue(const ProblemParams& params, const geo::AnnulusSpec& annulus,
                               int steps = 4096);

struct TorsionResult {
    RadialProfile profile;
    double torsion{};                  // T = (integral of psi dx)^{p-1}
    double energy_identity_residual{}; // relative defect of grad-energy + boundary = mass
};

// Torsion profile from the exact flux w(r) = -(r^n - r1^n)/n (beta > 0 only).
TorsionResult torsion(const ProblemParams& params, const geo::AnnulusSpec& annulus,
                      int steps = 4096);

struct FunctionalValues {
    double grad_energy{};   // integral over the annulus of |Dpsi|^p
    double boundary_term{}; // beta * psi(r2)^p * outer perimeter
    double p_mass{};        // integral of |psi|^p
    double mass{};          // integral of psi
    double j0{};            // (grad_energy + boundary_term) / p_mass
    double k0{};            // (grad_energy + boundary_term) / mass^p
};

// Quadrature of the Rayleigh-type functionals on a sampled profile
// (derivative-corrected trapezoid on the profile's own grid).
FunctionalValues rayleigh(const ProblemParams& params, const geo::AnnulusSpec& annulus,
                          const RadialProfile& profile);

RadialProfile constant_profile(const ProblemParams& params, const geo::AnnulusSpec& annulus,
                               double value = 1.0, int steps = 256);

// Upper bound from the constant test function: beta P(B_{r2}) / |A|.
double constant_test_bound(const ProblemParams& params, const geo::AnnulusSpec& annulus);

// CSV "r,psi,flux" plus a JSON metadata sidecar string.
void write_profile_csv(std::ostream& out, const RadialProfile& profile);
std::string profile_metadata_json(const RadialProfile& profile, double residual, int steps);

} // namespace plrn::radial
