#pragma once

#include "plrn/bessel.hpp"
#include "plrn/radial.hpp"

namespace plrn::p2 {

// Robin/Neumann eigencondition on the annulus for p = 2, as a normalized
// residual in lambda > 0 (valid branch: beta > 0; r1 > 0).
//
// Derived determinant: with nu = n/2 - 1 and psi = r^{-nu}(A J_nu + B Y_nu),
// the Neumann row at r1 holds order n/2 and the Robin row at r2 is
// -sqrt(lambda) C_{n/2} + beta C_{n/2-1}. The determinant is normalized by
// its term magnitudes, so the residual stays in [-1, 1] and approaches a
// finite nonzero limit as lambda -> 0+.
double eigen_condition(double lambda, int n, double beta, const geo::AnnulusSpec& annulus);

// Same interface for the remark-style determinant with coefficient rows of
// order n/2-2 at r1 and brackets sqrt(lambda) C_{n/2-2} + beta C_{n/2-1} at
// r2. Equivalent to eigen_condition for n = 2; kept as a diagnostic for the
// cross-check alarm (its root drifts from the shooting value for n >= 3).
double eigen_condition_remark(double lambda, int n, double beta, const geo::AnnulusSpec& annulus);

// First root of eigen_condition, bracketed from 0 outward under the
// constant-test bound and bisected to 1e-13 relative.
double first_eigenvalue_bessel(int n, double beta, const geo::AnnulusSpec& annulus);

struct BackendAgreement {
    double lambda_shooting{};
    double lambda_bessel{};
    double rel_diff{};
    bool alarm{false}; // shooting and Bessel roots disagree beyond tol
    double lambda_remark{};
    double remark_rel_diff{};
    bool remark_alarm{false}; // remark-form root disagrees (expected for n >= 3)
};

// Root agreement between the shooting backend and the Bessel condition;
// disagreement raises the alarm flags instead of trusting either side.
BackendAgreement cross_check_eigenvalue(int n, double beta, const geo::AnnulusSpec& annulus,
                                        int steps = 4096, double tol = 1e-6);

struct TorsionClosedForm {
    radial::RadialProfile profile; // sampled closed-form solution
    double torsion_closed{};       // T from the closed-form integral
    double torsion_quadrature{};   // T from the flux-quadrature backend
    double max_pointwise_diff{};   // max |closed form - quadrature pr ofile|
    double neumann_residual{};     // u'(r1)
    double robin_residual{};       // u'(r2) + beta u(r2)
};

// Exact p = 2 torsion solution: -Laplace(u) = 1, u'(r1) = 0,
// u'(r2) + beta u(r2) = 0, so u(r) = u(r2) + F(r2) - F(r) with
// F' = (r^n - r1^n)/(n r^{n-1}); T = integral of u over the annulus.
TorsionClosedForm torsion_profile(int n, double beta, const geo::AnnulusSpec& annulus,
                                  int steps = 4096);

} // namespace plrn::p2
