#pragma once

#include "plrn/common.hpp"

namespace plrn::p2 {

// Cylinder function values at real order nu and argument x > 0.
// Invariant (checked by the test suite): J Y' - J' Y = 2/(pi x).
struct BesselEval {
    double nu{};
    double x{};
    double J{};
    double Y{};
    double Jp{};
    double Yp{};
};

// J_nu, Y_nu and derivatives. Ascending series for x <= 12 (60 terms),
// Hankel asymptotic expansion beyond (10 terms); nu = +-1/2 routed through
// the closed trigonometric forms. Supports |nu| <= 50, x in (0, 50] at
// 1e-10 relative accuracy for the moderate orders the solvers need.
BesselEval bessel(double nu, double x);

// J and Y only (no derivative recursion), same engine.
void bessel_jy(double nu, double x, double& J, double& Y);

} // namespace plrn::p2
