#include "plrn/bessel.hpp"

#include <cmath>
#include <numbers>

namespace plrn::p2 {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286060651209008240;
constexpr double kSeriesSwitch = 12.0;
constexpr int kSeriesTerms = 60;
constexpr int kHankelTerms = 10;

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

// 1/Gamma(x), zero at the poles.
double rgamma(double x) {
    if (x <= 0.0 && is_integer(x)) return 0.0;
    return 1.0 / std::tgamma(x);
}

// digamma at positive integers: psi(1) = -gamma, psi(m+1) = -gamma + H_m.
double digamma_int(int m) {
    double s = -kEulerGamma;
    for (int j = 1; j < m; ++j) s += 1.0 / j;
    return s;
}

// Ascending series, any real order (poles handled through rgamma).
double j_series(double nu, double x) {
    const double x2 = 0.25 * x * x;
    double term = std::pow(0.5 * x, nu);
    double sum = 0.0;
    // (x/2)^nu / (k! Gamma(nu+k+1)) (-x^2/4)^k
    double g = rgamma(nu + 1.0);
    sum = term * g;
    double num = term;
    for (int k = 1; k < kSeriesTerms; ++k) {
        num *= -x2 / k;
        g = rgamma(nu + k + 1.0);
        const double t = num * g;
        sum += t;
        if (std::abs(t) < 1e-18 * (std::abs(sum) + 1e-300) && k > 4) break;
    }
    return sum;
}

// Y_m for integer m >= 0 by the logarithmic series.
double y_series_int(int m, double x) {
    const double x2 = 0.25 * x * x;
    const double lx = std::log(0.5 * x);

    double finite = 0.0; // (x/2)^{-m} sum_{k<m} (m-k-1)!/k! (x^2/4)^k
    if (m > 0) {
        double fact = std::tgamma(static_cast<double>(m)); // (m-1)!
        double pw = std::pow(0.5 * x, -m);
        double t = fact * pw;
        finite = t;
        for (int k = 1; k < m; ++k) {
            t *= x2 / (static_cast<double>(k) * (m - k));
            finite += t;
        }
    }

    double tail = 0.0; // (x/2)^m sum_k [psi(k+1)+psi(m+k+1)] (-x^2/4)^k/(k!(m+k)!)
    {
        double coef = std::pow(0.5 * x, m) / std::tgamma(m + 1.0);
        double hk = digamma_int(1), hmk = digamma_int(m + 1);
        double t = coef;
        tail = t * (hk + hmk);
        for (int k = 1; k < kSeriesTerms; ++k) {
            t *= -x2 / (static_cast<double>(k) * (m + k));
            hk += 1.0 / k;
            hmk += 1.0 / (m + k);
            const double add = t * (hk + hmk);
            tail += add;
            if (std::abs(add) < 1e-18 * (std::abs(tail) + 1e-300) && k > 4) break;
        }
    }
    return (2.0 / kPi) * lx * j_series(static_cast<double>(m), x) - finite / kPi - tail / kPi;
}

// Hankel large-argument expansion for x > kSeriesSwitch.
void jy_asymptotic(double nu, double x, double& J, double& Y) {
    const double mu = 4.0 * nu * nu;
    double P = 1.0, Q = 0.0;
    double a = 1.0; // a_k(nu) = prod (mu - (2j-1)^2) / (k! 8^k)
    for (int k = 1; k <= 2 * kHankelTerms - 1; ++k) {
        a *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
        const double t = a / std::pow(x, k);
        if (k % 2 == 1) {
            Q += ((k / 2) % 2 == 0) ? t : -t;
        } else {
            P += ((k / 2) % 2 == 1) ? -t : t;
        }
    }
    const double chi = x - (0.5 * nu + 0.25) * kPi;
    const double amp = std::sqrt(2.0 / (kPi * x));
    const double c = std::cos(chi), s = std::sin(chi);
    J = amp * (P * c - Q * s);
    Y = amp * (P * s + Q * c);
}

void jy_core(double nu, double x, double& J, double& Y);

// Reflection for negative orders: J_{-nu} = cos(nu pi) J_nu - sin(nu pi) Y_nu.
void jy_negative(double nu_pos, double x, double& J, double& Y) {
    double Jp, Yp;
    jy_core(nu_pos, x, Jp, Yp);
    if (is_integer(nu_pos)) {
        const int m = static_cast<int>(std::llround(nu_pos));
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        J = sign * Jp;
        Y = sign * Yp;
        return;
    }
    const double c = std::cos(nu_pos * kPi), s = std::sin(nu_pos * kPi);
    J = c * Jp - s * Yp;
    Y = s * Jp + c * Yp;
}

void jy_core(double nu, double x, double& J, double& Y) {
    if (nu < 0.0) {
        jy_negative(-nu, x, J, Y);
        return;
    }
    if (std::abs(nu - 0.5) < 1e-12) {
        const double amp = std::sqrt(2.0 / (kPi * x));
        J = amp * std::sin(x);
        Y = -amp * std::cos(x);
        return;
    }
    if (x > kSeriesSwitch) {
        jy_asymptotic(nu, x, J, Y);
        return;
    }
    if (is_integer(nu)) {
        const int m = static_cast<int>(std::llround(nu));
        J = j_series(nu, x);
        Y = y_series_int(m, x);
        return;
    }
    // Non-integer: Y from the reflection identity (for half-integers the
    // sine is +-1, so there is no cancellation to worry about).
    const double Jnu = j_series(nu, x);
    const double Jmnu = j_series(-nu, x);
    J = Jnu;
    Y = (Jnu * std::cos(nu * kPi) - Jmnu) / std::sin(nu * kPi);
}

} // namespace

void bessel_jy(double nu, double x, double& J, double& Y) {
    if (!(x > 0.0)) throw input_error("bessel: argument must be positive");
    if (std::abs(nu) > 50.0) throw input_error("bessel: |order| must be <= 50");
    jy_core(nu, x, J, Y);
}

BesselEval bessel(double nu, double x) {
    BesselEval e;
    e.nu = nu;
    e.x = x;
    bessel_jy(nu, x, e.J, e.Y);
    double Jm1, Ym1;
    bessel_jy(nu - 1.0, x, Jm1, Ym1);
    e.Jp = Jm1 - (nu / x) * e.J;
    e.Yp = Ym1 - (nu / x) * e.Y;
    return e;
}

} // namespace plrn::p2
