#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace plrn {

// Input/validation problems (bad parameters, malformed files, infeasible data).
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A solver failed to converge or broke down; carries diagnostics in the message.
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Signed power: sign(x) |x|^e, with fast paths for the common exponents.
inline double spow(double x, double e) {
    if (e == 1.0) return x;
    if (x == 0.0) return 0.0;
    if (e == 2.0) return x * std::abs(x);
    return x > 0.0 ? std::pow(x, e) : -std::pow(-x, e);
}

// Volume of the unit ball in R^n, by the recurrence w_n = 2*pi/n * w_{n-2}.
inline double unit_ball_volume(int n) {
    if (n < 0) throw input_error("unit_ball_volume: dimension must be nonnegative");
    double w0 = 1.0, w1 = 2.0;
    if (n == 0) return w0;
    if (n == 1) return w1;
    const double two_pi = 6.283185307179586476925286766559;
    double w = (n % 2 == 0) ? w0 : w1;
    for (int k = (n % 2 == 0) ? 2 : 3; k <= n; k += 2) w *= two_pi / k;
    return w;
}

// Round-trip text form of a double (17 significant digits).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

} // namespace plrn
