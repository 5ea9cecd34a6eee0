#include "plrn/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace plrn::radial {

namespace {

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// Node set on [r1, r2]. Uniform for p = 2; otherwise power-graded toward r1,
// where psi' ~ (r - r1)^{1/(p-1)} limits the order of a uniform march.
std::vector<double> radial_nodes(const geo::AnnulusSpec& a, double p, int steps) {
    std::vector<double> r(steps + 1);
    const double len = a.r2 - a.r1;
    if (p == 2.0) {
        for (int j = 0; j <= steps; ++j) r[j] = a.r1 + len * j / steps;
    } else {
        constexpr double grading = 5.0;
        for (int j = 0; j <= steps; ++j)
            r[j] = a.r1 + len * std::pow(static_cast<double>(j) / steps, grading);
    }
    r.front() = a.r1;
    r.back() = a.r2;
    return r;
}

struct Rhs {
    double p, q, lambda;
    int n;

    void operator()(double r, double psi, double w, double& dpsi, double& dw) const {
        const double rn1 = ipow(r, n - 1);
        dpsi = (w == 0.0 || rn1 == 0.0) ? 0.0 : spow(w / rn1, q);
        dw = -lambda * spow(psi, p - 1.0) * rn1;
    }
};

const double kGL5x[5] = {-0.90617984593866399280, -0.53846931010568309104, 0.0,
                         0.53846931010568309104, 0.90617984593866399280};
const double kGL5w[5] = {0.23692688505618908751, 0.47862867049936646804,
                         0.56888888888888888889, 0.47862867049936646804,
                         0.23692688505618908751};

template <class F>
double gauss5(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += kGL5w[i] * f(mid + half * kGL5x[i]);
    return s * half;
}

struct HermiteCell {
    double r0, r1, f0, f1, d0, d1;

    double eval(double x) const {
        const double h = r1 - r0;
        const double t = (x - r0) / h;
        const double t2 = t * t, t3 = t2 * t;
        return f0 * (2 * t3 - 3 * t2 + 1) + d0 * h * (t3 - 2 * t2 + t) +
               f1 * (-2 * t3 + 3 * t2) + d1 * h * (t3 - t2);
    }
};

} // namespace

ProblemParams ProblemParams::make(double p, int n, double beta) {
    if (!(p > 1.0) || !std::isfinite(p)) throw input_error("p must lie in (1, inf)");
    if (n < 2) throw input_error("dimension must be >= 2");
    if (beta == 0.0 || !std::isfinite(beta)) throw input_error("beta must be nonzero");
    return ProblemParams{p, n, beta};
}

double RadialProfile::dpsi_at(double radius) const {
    const ProblemParams& pp = params;
    auto wprime = [&](size_t i) -> double {
        const double rn1 = ipow(r[i], pp.n - 1);
        switch (kind) {
            case ProfileKind::Eigen: return -lambda.value() * spow(psi[i], pp.p - 1.0) * rn1;
            case ProfileKind::Torsion: return -rn1;
            default: return 0.0;
        }
    };
    const auto it = std::upper_bound(r.begin(), r.end(), radius);
    size_t i = (it == r.begin()) ? 0 : static_cast<size_t>(it - r.begin()) - 1;
    i = std::min(i, r.size() - 2);
    HermiteCell c{r[i], r[i + 1], flux[i], flux[i + 1], wprime(i), wprime(i + 1)};
    const double w = c.eval(std::clamp(radius, r.front(), r.back()));
    const double rn1 = ipow(std::max(radius, 1e-300), pp.n - 1);
    return spow(w / rn1, pp.q());
}

double RadialProfile::psi_at(double radius) const {
    const double x = std::clamp(radius, r.front(), r.back());
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    size_t i = (it == r.begin()) ? 0 : static_cast<size_t>(it - r.begin()) - 1;
    i = std::min(i, r.size() - 2);
    auto deriv = [&](size_t k) {
        const double rn1 = ipow(r[k], params.n - 1);
        return (flux[k] == 0.0 || rn1 == 0.0) ? 0.0 : spow(flux[k] / rn1, params.q());
    };
    HermiteCell c{r[i], r[i + 1], psi[i], psi[i + 1], deriv(i), deriv(i + 1)};
    return c.eval(x);
}

double RadialProfile::psi_inverse(double value) const {
    const bool decreasing = psi.front() > psi.back();
    const double lo = decreasing ? psi.back() : psi.front();
    const double hi = decreasing ? psi.front() : psi.back();
    if (value <= lo) return decreasing ? r.back() : r.front();
    if (value >= hi) return decreasing ? r.front() : r.back();
    double a = r.front(), b = r.back();
    for (int it = 0; it < 90 && b - a > 1e-15 * (r.back() - r.front() + 1.0); ++it) {
        const double m = 0.5 * (a + b);
        const double v = psi_at(m);
        if ((v > value) == decreasing)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

double RadialProfile::psi_min() const { return *std::min_element(psi.begin(), psi.end()); }
double RadialProfile::psi_max() const { return *std::max_element(psi.begin(), psi.end()); }

namespace {

ShootResult shoot_impl(const ProblemParams& params, const geo::AnnulusSpec& annulus,
                       double lambda, int steps) {
    const Rhs rhs{params.p, params.q(), lambda, params.n};
    const std::vector<double> nodes = radial_nodes(annulus, params.p, steps);

    ShootResult out;
    out.profile.annulus = annulus;
    out.profile.params = params;
    out.profile.kind = ProfileKind::Eigen;
    out.profile.lambda = lambda;
    auto& P = out.profile;
    P.r.reserve(nodes.size());
    P.psi.reserve(nodes.size());
    P.flux.reserve(nodes.size());

    double psi = 1.0, w = 0.0;
    P.r.push_back(nodes[0]);
    P.psi.push_back(psi);
    P.flux.push_back(w);

    for (size_t j = 0; j + 1 < nodes.size(); ++j) {
        const double r0 = nodes[j];
        const double h = nodes[j + 1] - r0;
        double k1p, k1w, k2p, k2w, k3p, k3w, k4p, k4w;
        rhs(r0, psi, w, k1p, k1w);
        rhs(r0 + 0.5 * h, psi + 0.5 * h * k1p, w + 0.5 * h * k1w, k2p, k2w);
        rhs(r0 + 0.5 * h, psi + 0.5 * h * k2p, w + 0.5 * h * k2w, k3p, k3w);
        rhs(r0 + h, psi + h * k3p, w + h * k3w, k4p, k4w);
        psi += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
        w += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);

        if (!(psi > 0.0) || !std::isfinite(psi) || !std::isfinite(w)) {
            out.psi_hit_zero = true;
            out.zero_radius = nodes[j + 1];
            out.residual = std::numeric_limits<double>::quiet_NaN();
            out.residual_scale = 1.0;
            return out;
        }
        if (psi > 1e50) {
            // Rescale the (p-1)-homogeneous state to dodge overflow; the
            // residual root set is unchanged. Keep stored samples consistent.
            const double c = psi;
            const double cw = std::pow(c, params.p - 1.0);
            psi = 1.0;
            w /= cw;
            for (double& v : P.psi) v /= c;
            for (double& v : P.flux) v /= cw;
        }
        P.r.push_back(nodes[j + 1]);
        P.psi.push_back(psi);
        P.flux.push_back(w);
    }

    const double rn1 = ipow(annulus.r2, params.n - 1);
    const double grad_term = w / rn1;
    const double robin_term = params.beta * spow(psi, params.p - 1.0);
    out.residual = grad_term + robin_term;
    out.residual_scale = std::abs(grad_term) + std::abs(robin_term) + 1e-300;
    return out;
}

// Residual sign used by the bracketing logic: a zero crossing of psi counts
// as "past the first eigenvalue" (same side as a negative residual for
// beta > 0, positive for beta < 0 never occurs: psi grows there).
double effective_residual(const ShootResult& s, double beta) {
    if (s.psi_hit_zero) return beta > 0 ? -1.0 : 1.0;
    return s.residual;
}

} // namespace

ShootResult shoot(const ProblemParams& params, const geo::AnnulusSpec& annulus,
                  double lambda, int steps) {
    if (steps < 16) throw input_error("shoot: need at least 16 steps");
    if (!(lambda * params.beta > 0.0))
        throw input_error("shoot: trial lambda must share the sign of beta");
    ShootResult s = shoot_impl(params, annulus, lambda, steps);
    if (s.psi_hit_zero)
        throw solver_error("shoot: psi crossed zero at r = " + format_double(s.zero_radius) +
                           " (trial lambda lies beyond the first eigenvalue)");
    return s;
}

double constant_test_bound(const ProblemParams& params, const geo::AnnulusSpec& annulus) {
    return params.beta * annulus.outer_perimeter() / annulus.measure();
}

RadialProfile first_eigenvalue(const ProblemParams& params, const geo::AnnulusSpec& annulus,
                               int steps) {
    if (steps < 16) throw input_error("first_eigenvalue: need at least 16 steps");
    const double beta = params.beta;
    const double bound = constant_test_bound(params, annulus);
    auto res_at = [&](double lam) {
        return effective_residual(shoot_impl(params, annulus, lam, steps), beta);
    };
    // "Past the root" = beyond the first eigenvalue measured from 0 outward.
    auto past_root = [&](double res) { return beta > 0 ? res <= 0.0 : res > 0.0; };

    double a = 0.0; // between 0 and the eigenvalue
    double b = 0.0; // at or beyond the eigenvalue
    if (beta > 0.0) {
        // Scan 64 log-spaced trials in (0, bound]; the residual starts at
        // beta > 0 near lambda = 0 and first changes sign at the eigenvalue.
        const int kScan = 64;
        double start = bound * 1e-8;
        int guard = 0;
        while (past_root(res_at(start)) && guard++ < 20) start /= 16.0;
        if (past_root(res_at(start)))
            throw solver_error("first_eigenvalue: residual nonpositive arbitrarily close to 0");
        const double ratio = std::pow(bound / start * 1.000001, 1.0 / kScan);
        a = start;
        bool found = false;
        for (int k = 1; k <= kScan && !found; ++k) {
            const double trial = start * std::pow(ratio, k);
            if (past_root(res_at(trial))) {
                b = trial;
                found = true;
            } else {
                a = trial;
            }
        }
        // The constant-test bound caps the eigenvalue, but leave room for
        // roundoff on near-degenerate inputs.
        for (int k = 0; k < 60 && !found; ++k) {
            const double trial = a * 1.5;
            if (past_root(res_at(trial))) {
                b = trial;
                found = true;
            } else {
                a = trial;
            }
        }
        if (!found)
            throw solver_error("first_eigenvalue: no sign change up to " + format_double(a) +
                               " (constant-test bound " + format_double(bound) + ")");
    } else {
        // Negative beta: the single negative root lies at or beyond the
        // constant-test bound; double outward until the residual flips.
        if (past_root(res_at(bound))) {
            // bound is numerically past the root; hunt back toward zero
            a = bound * 1e-8;
            b = bound;
            if (past_root(res_at(a)))
                throw solver_error("first_eigenvalue: residual positive arbitrarily close to 0");
        } else {
            a = bound;
            b = 2.0 * bound;
            bool found = false;
            for (int k = 0; k < 60 && !found; ++k) {
                if (past_root(res_at(b))) {
                    found = true;
                } else {
                    a = b;
                    b *= 2.0;
                }
            }
            if (!found)
                throw solver_error("first_eigenvalue: no sign change after 60 doublings from " +
                                   format_double(2.0 * bound));
        }
    }

    for (int it = 0; it < 200 && std::abs(b - a) > 1e-12 * std::abs(0.5 * (a + b)); ++it) {
        const double mid = 0.5 * (a + b);
        if (past_root(res_at(mid)))
            b = mid;
        else
            a = mid;
    }
    const double lambda = 0.5 * (a + b);
    ShootResult final = shoot_impl(params, annulus, lambda, steps);
    if (final.psi_hit_zero) final = shoot_impl(params, annulus, a, steps);
    if (final.psi_hit_zero)
        throw solver_error("first_eigenvalue: converged trial still drives psi through zero");

    // A-posteriori checks backing the "first eigenvalue" claim.
    const auto& psi = final.profile.psi;
    for (size_t i = 0; i + 1 < psi.size(); ++i) {
        const double d = psi[i + 1] - psi[i];
        if (beta > 0 ? d > 1e-12 : d < -1e-12)
            throw solver_error("first_eigenvalue: eigenfunction is not monotone as required");
    }
    final.profile.lambda = lambda;
    return final.profile;
}

TorsionResult torsion(const ProblemParams& params, const geo::AnnulusSpec& annulus, int steps) {
    if (params.beta <= 0.0) throw input_error("torsion: beta must be positive");
    if (steps < 16) throw input_error("torsion: need at least 16 steps");
    const int n = params.n;
    const double q = params.q();
    const double r1 = annulus.r1, r2 = annulus.r2;
    const double r1n = ipow(r1, n);

    // |psi'|(s) from the exact flux w(s) = -(s^n - r1^n)/n.
    auto slope = [&](double s) {
        const double sn1 = ipow(s, n - 1);
        if (sn1 == 0.0) return 0.0;
        return std::pow((ipow(s, n) - r1n) / (n * sn1), q);
    };

    const std::vector<double> nodes = radial_nodes(annulus, params.p, steps);
    const double psi_outer =
        std::pow((ipow(r2, n) - r1n) / (params.beta * n * ipow(r2, n - 1)), q);

    RadialProfile prof;
    prof.annulus = annulus;
    prof.params = params;
    prof.kind = ProfileKind::Torsion;
    prof.r = nodes;
    prof.psi.assign(nodes.size(), 0.0);
    prof.flux.resize(nodes.size());
    for (size_t j = 0; j < nodes.size(); ++j) prof.flux[j] = -(ipow(nodes[j], n) - r1n) / n;

    prof.psi.back() = psi_outer;
    for (size_t j = nodes.size() - 1; j-- > 0;)
        prof.psi[j] = prof.psi[j + 1] + gauss5(slope, nodes[j], nodes[j + 1]);

    // integral of psi r^{n-1} dr; psi at a quadrature point x in cell [a,b]
    // is psi(b) + integral_x^b of |psi'|.
    double mass_r = 0.0, grad_r = 0.0;
    for (size_t j = 0; j + 1 < nodes.size(); ++j) {
        const double a = nodes[j], b = nodes[j + 1];
        const double psib = prof.psi[j + 1];
        mass_r += gauss5(
            [&](double x) {
                const double psix = psib + gauss5(slope, x, b);
                return psix * ipow(x, n - 1);
            },
            a, b);
        grad_r += gauss5([&](double x) { return std::pow(slope(x), params.p) * ipow(x, n - 1); },
                         a, b);
    }
    const double shell = n * unit_ball_volume(n);
    const double mass = shell * mass_r;
    const double grad_energy = shell * grad_r;
    const double boundary = params.beta * std::pow(psi_outer, params.p) * shell * ipow(r2, n - 1);

    TorsionResult out;
    out.torsion = std::pow(mass, params.p - 1.0);
    out.energy_identity_residual = (grad_energy + boundary - mass) / std::max(std::abs(mass), 1e-300);
    prof.torsion = out.torsion;
    out.profile = std::move(prof);
    return out;
}

FunctionalValues rayleigh(const ProblemParams& params, const geo::AnnulusSpec& annulus,
                          const RadialProfile& profile) {
    const int n = params.n;
    const double p = params.p;
    const double q = params.q();
    const double pq = p * q; // p/(p-1)
    const size_t m = profile.r.size();
    if (m < 2 || profile.psi.size() != m || profile.flux.size() != m)
        throw input_error("rayleigh: malformed profile");

    auto wprime = [&](size_t i) -> double {
        const double rn1 = ipow(profile.r[i], n - 1);
        switch (profile.kind) {
            case ProfileKind::Eigen:
                return -profile.lambda.value_or(0.0) * spow(profile.psi[i], p - 1.0) * rn1;
            case ProfileKind::Torsion: return -rn1;
            default: return 0.0;
        }
    };

    const double Bexp = (n - 1) * (1.0 - pq);
    double I1 = 0.0, I2 = 0.0, I3 = 0.0;
    double g1p = 0, g1pp = 0, g2p = 0, g2pp = 0, g3p = 0, g3pp = 0;
    for (size_t i = 0; i < m; ++i) {
        const double r = profile.r[i];
        const double psi = profile.psi[i];
        const double w = profile.flux[i];
        const double rn1 = ipow(r, n - 1);
        const double rn2 = (n >= 2) ? ipow(r, n - 2) : 0.0;
        const double dpsi = (w == 0.0 || rn1 == 0.0) ? 0.0 : spow(w / rn1, q);
        const double wp = wprime(i);

        double g1, g1d;
        if (w == 0.0) {
            g1 = 0.0;
            g1d = 0.0;
        } else {
            const double rB = std::pow(r, Bexp);
            g1 = std::pow(std::abs(w), pq) * rB;
            g1d = pq * std::pow(std::abs(w), pq - 1.0) * (w > 0 ? 1.0 : -1.0) * wp * rB +
                  Bexp * std::pow(std::abs(w), pq) * std::pow(r, Bexp - 1.0);
        }
        const double g2 = std::pow(std::abs(psi), p) * rn1;
        const double g2d = p * spow(psi, p - 1.0) * dpsi * rn1 +
                           (n - 1) * std::pow(std::abs(psi), p) * rn2;
        const double g3 = psi * rn1;
        const double g3d = dpsi * rn1 + (n - 1) * psi * rn2;

        if (i > 0) {
            const double h = profile.r[i] - profile.r[i - 1];
            I1 += 0.5 * h * (g1p + g1) + h * h / 12.0 * (g1pp - g1d);
            I2 += 0.5 * h * (g2p + g2) + h * h / 12.0 * (g2pp - g2d);
            I3 += 0.5 * h * (g3p + g3) + h * h / 12.0 * (g3pp - g3d);
        }
        g1p = g1;
        g1pp = g1d;
        g2p = g2;
        g2pp = g2d;
        g3p = g3;
        g3pp = g3d;
    }

    const double shell = n * unit_ball_volume(n);
    FunctionalValues out;
    out.grad_energy = shell * I1;
    out.p_mass = shell * I2;
    out.mass = shell * I3;
    out.boundary_term = params.beta * std::pow(std::abs(profile.psi.back()), p) * shell *
                        ipow(annulus.r2, n - 1);
    const double num = out.grad_energy + out.boundary_term;
    out.j0 = num / out.p_mass;
    out.k0 = num / std::pow(std::abs(out.mass), p);
    return out;
}

RadialProfile constant_profile(const ProblemParams& params, const geo::AnnulusSpec& annulus,
                               double value, int steps) {
    RadialProfile prof;
    prof.annulus = annulus;
    prof.params = params;
    prof.kind = ProfileKind::Constant;
    prof.r = radial_nodes(annulus, 2.0, steps);
    prof.psi.assign(prof.r.size(), value);
    prof.flux.assign(prof.r.size(), 0.0);
    return prof;
}

void write_profile_csv(std::ostream& out, const RadialProfile& profile) {
    out << "r,psi,flux\n";
    for (size_t i = 0; i < profile.r.size(); ++i)
        out << format_double(profile.r[i]) << "," << format_double(profile.psi[i]) << ","
            << format_double(profile.flux[i]) << "\n";
}

std::string profile_metadata_json(const RadialProfile& profile, double residual, int steps) {
    std::ostringstream os;
    os << "{\"p\":" << format_double(profile.params.p) << ",\"n\":" << profile.params.n
       << ",\"beta\":" << format_double(profile.params.beta)
       << ",\"r1\":" << format_double(profile.annulus.r1)
       << ",\"r2\":" << format_double(profile.annulus.r2);
    if (profile.lambda) os << ",\"lambda\":" << format_double(*profile.lambda);
    if (profile.torsion) os << ",\"torsion\":" << format_double(*profile.torsion);
    os << ",\"residual\":" << format_double(residual) << ",\"steps\":" << steps << "}";
    return os.str();
}

} // namespace plrn::radial
