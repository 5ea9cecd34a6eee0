#include "plrn/analytic_p2.hpp"

#include <cmath>
#include <limits>

namespace plrn::p2 {

namespace {

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

double normalized_det(double t1, double t2) {
    return (t1 - t2) / (std::abs(t1) + std::abs(t2) + 1e-300);
}

void check_condition_args(double lambda, int n, double beta, const geo::AnnulusSpec& a) {
    if (!(lambda > 0.0)) throw input_error("eigen condition: lambda must be positive");
    if (n < 2) throw input_error("eigen condition: dimension must be >= 2");
    if (!(beta > 0.0))
        throw input_error("eigen condition: Bessel branch covers beta > 0 only");
    if (!(a.r1 > 0.0)) throw input_error("eigen condition: needs r1 > 0");
}

double first_root(double (*cond)(double, int, double, const geo::AnnulusSpec&), int n,
                  double beta, const geo::AnnulusSpec& annulus) {
    const double bound =
        beta * annulus.outer_perimeter() / annulus.measure() * 1.000001;
    const int kScan = 400;
    double a = bound * 1e-8;
    double fa = cond(a, n, beta, annulus);
    double b = 0.0;
    bool found = false;
    const double ratio = std::pow(1e8, 1.0 / kScan);
    double trial = a;
    for (int k = 1; k <= kScan && !found; ++k) {
        trial = a * std::pow(ratio, k);
        const double f = cond(trial, n, beta, annulus);
        if (f == 0.0 || (f > 0) != (fa > 0)) {
            b = trial;
            found = true;
        } else {
            a = trial;
            fa = f;
        }
    }
    if (!found)
        throw solver_error("bessel eigencondition: no sign change below the constant-test bound");
    for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
        const double mid = 0.5 * (a + b);
        const double f = cond(mid, n, beta, annulus);
        if (f == 0.0) return mid;
        if ((f > 0) == (fa > 0)) {
            a = mid;
            fa = f;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

double eigen_condition(double lambda, int n, double beta, const geo::AnnulusSpec& annulus) {
    check_condition_args(lambda, n, beta, annulus);
    const double k = std::sqrt(lambda);
    const double hi = 0.5 * n;        // n/2
    const double lo = 0.5 * n - 1.0;  // n/2 - 1
    double J1, Y1, J2h, Y2h, J2l, Y2l;
    bessel_jy(hi, k * annulus.r1, J1, Y1);
    bessel_jy(hi, k * annulus.r2, J2h, Y2h);
    bessel_jy(lo, k * annulus.r2, J2l, Y2l);
    const double bracket_j = -k * J2h + beta * J2l;
    const double bracket_y = -k * Y2h + beta * Y2l;
    return normalized_det(Y1 * bracket_j, J1 * bracket_y);
}

double eigen_condition_remark(double lambda, int n, double beta,
                              const geo::AnnulusSpec& annulus) {
    check_condition_args(lambda, n, beta, annulus);
    const double k = std::sqrt(lambda);
    const double lo2 = 0.5 * n - 2.0; // n/2 - 2
    const double lo1 = 0.5 * n - 1.0; // n/2 - 1
    const double rfac = std::pow(annulus.r2, 1.0 - 0.5 * n);
    double J1, Y1, J2a, Y2a, J2b, Y2b;
    bessel_jy(lo2, k * annulus.r1, J1, Y1);
    bessel_jy(lo2, k * annulus.r2, J2a, Y2a);
    bessel_jy(lo1, k * annulus.r2, J2b, Y2b);
    const double bracket_j = rfac * J2a * k + beta * rfac * J2b;
    const double bracket_y = rfac * Y2a * k + beta * rfac * Y2b;
    return normalized_det(Y1 * bracket_j, J1 * bracket_y);
}

double first_eigenvalue_bessel(int n, double beta, const geo::AnnulusSpec& annulus) {
    if (!(beta > 0.0))
        throw input_error("first_eigenvalue_bessel: beta must be positive (use shooting otherwise)");
    return first_root(&eigen_condition, n, beta, annulus);
}

BackendAgreement cross_check_eigenvalue(int n, double beta, const geo::AnnulusSpec& annulus,
                                        int steps, double tol) {
    BackendAgreement out;
    const auto params = radial::ProblemParams::make(2.0, n, beta);
    out.lambda_shooting = radial::first_eigenvalue(params, annulus, steps).lambda.value();
    out.lambda_bessel = first_eigenvalue_bessel(n, beta, annulus);
    out.rel_diff = std::abs(out.lambda_bessel - out.lambda_shooting) /
                   std::abs(out.lambda_shooting);
    out.alarm = out.rel_diff > tol;
    try {
        out.lambda_remark = first_root(&eigen_condition_remark, n, beta, annulus);
        out.remark_rel_diff =
            std::abs(out.lambda_remark - out.lambda_shooting) / std::abs(out.lambda_shooting);
        out.remark_alarm = out.remark_rel_diff > tol;
    } catch (const solver_error&) {
        out.lambda_remark = std::numeric_limits<double>::quiet_NaN();
        out.remark_rel_diff = std::numeric_limits<double>::infinity();
        out.remark_alarm = true;
    }
    return out;
}

TorsionClosedForm torsion_profile(int n, double beta, const geo::AnnulusSpec& annulus,
                                  int steps) {
    if (!(beta > 0.0)) throw input_error("torsion_profile: beta must be positive");
    const double r1 = annulus.r1, r2 = annulus.r2;
    const double r1n = ipow(r1, n);
    const double u2 = (ipow(r2, n) - r1n) / (beta * n * ipow(r2, n - 1));

    // Antiderivative of (r^n - r1^n)/(n r^{n-1}).
    auto F = [&](double r) {
        if (n == 2) return 0.25 * r * r - 0.5 * r1n * std::log(r);
        return r * r / (2.0 * n) + r1n / (n * (n - 2.0)) * std::pow(r, 2.0 - n);
    };
    auto u = [&](double r) { return u2 + F(r2) - F(r); };
    auto du = [&](double r) { return -(ipow(r, n) - r1n) / (n * ipow(r, n - 1)); };

    const auto params = radial::ProblemParams::make(2.0, n, beta);
    radial::TorsionResult quad = radial::torsion(params, annulus, steps);

    TorsionClosedForm out;
    out.profile = quad.profile; // same grid; overwrite with closed-form values
    double maxdiff = 0.0;
    for (size_t i = 0; i < out.profile.r.size(); ++i) {
        const double r = out.profile.r[i];
        const double v = (r <= r1 && r1 == 0.0) ? u(1e-300) : u(std::max(r, 1e-300));
        maxdiff = std::max(maxdiff, std::abs(v - quad.profile.psi[i]));
        out.profile.psi[i] = v;
    }
    out.max_pointwise_diff = maxdiff;
    out.torsion_quadrature = quad.torsion;

    // T = integral of u over the annulus, in closed form:
    //   omega_n u(r2)(r2^n - r1^n)
    //   + omega_n/n [ (r2^{n+2}-r1^{n+2})/(n+2) - r1^n (r2^2-r1^2) + r1^{2n} G ]
    // with G = (r2^{2-n}-r1^{2-n})/(2-n) (n != 2) or log(r2/r1) (n = 2).
    const double wn = unit_ball_volume(n);
    double G = 0.0;
    if (r1 > 0.0)
        G = (n == 2) ? std::log(r2 / r1)
                     : (std::pow(r2, 2.0 - n) - std::pow(r1, 2.0 - n)) / (2.0 - n);
    const double inner = (std::pow(r2, n + 2) - std::pow(r1, n + 2)) / (n + 2.0) -
                         r1n * (r2 * r2 - r1 * r1) + ((r1 > 0.0) ? ipow(r1, 2 * n) * G : 0.0);
    out.torsion_closed = wn * u2 * (ipow(r2, n) - r1n) + wn / n * inner;

    out.neumann_residual = (r1 > 0.0) ? du(r1) : 0.0;
    out.robin_residual = du(r2) + beta * u(r2);
    out.profile.torsion = out.torsion_closed;
    return out;
}

} // namespace plrn::p2
