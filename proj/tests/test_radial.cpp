#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "plrn/radial.hpp"

using namespace plrn;
using radial::ProblemParams;

namespace {
const geo::AnnulusSpec kA12 = geo::AnnulusSpec::make(2, 1.0, 2.0);

// Frozen shooting roots at the default 4096-step grid, cross-checked below
// against the dense finite-volume and 1D Rayleigh-minimization oracles.
constexpr double kLambdaP2 = 0.99284535028836651; // p=2, n=2, A(1,2), beta=1
constexpr double kLambdaP3 = 0.65712948969990093; // p=3, n=2, A(1,2), beta=1
} // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ProblemParams::make(1.0, 2, 1.0), input_error);
    CHECK_THROWS_AS(ProblemParams::make(0.5, 2, 1.0), input_error);
    CHECK_THROWS_AS(ProblemParams::make(2.0, 1, 1.0), input_error);
    CHECK_THROWS_AS(ProblemParams::make(2.0, 2, 0.0), input_error);
    CHECK_THROWS_AS(geo::AnnulusSpec::make(2, 2.0, 1.0), input_error);
    CHECK_THROWS_AS(geo::AnnulusSpec::make(2, -0.5, 1.0), input_error);
}

TEST_CASE("shoot: residual at the pinned p=2 root") {
    const auto params = ProblemParams::make(2.0, 2, 1.0);
    const double fd = test::fd_eigenvalue_p2(2, 1.0, 1.0, 2.0, 10000);
    CHECK(std::abs(kLambdaP2 - fd) <= 1e-7 * fd); // dense-grid oracle agreement
    const auto s = radial::shoot(params, kA12, kLambdaP2);
    CHECK(std::abs(s.residual) / s.residual_scale < 1e-10);
}

TEST_CASE("shoot: constant-profile limit as lambda -> 0+") {
    const auto params = ProblemParams::make(2.0, 2, 1.0);
    const auto s = radial::shoot(params, kA12, 1e-12);
    CHECK(s.residual == doctest::Approx(1.0).epsilon(1e-6)); // beta * 1^{p-1}
    CHECK(s.profile.psi.back() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("shoot: pinned p=3 root against the Rayleigh-minimization oracle") {
    const auto params = ProblemParams::make(3.0, 2, 1.0);
    const double oracle = test::rayleigh_min_1d(3.0, 2, 1.0, 1.0, 2.0, 2000, 4000);
    CHECK(std::abs(kLambdaP3 - oracle) <= 1e-6 * oracle);
    const auto s = radial::shoot(params, kA12, kLambdaP3);
    CHECK(std::abs(s.residual) / s.residual_scale < 1e-8);
}

TEST_CASE("shoot: input contract and zero crossing") {
    const auto params = ProblemParams::make(2.0, 2, 1.0);
    CHECK_THROWS_AS(radial::shoot(params, kA12, -1.0), input_error);
    // far above the first eigenvalue psi must cross zero
    CHECK_THROWS_AS(radial::shoot(params, kA12, 80.0), solver_error);
}

TEST_CASE("first eigenvalue: backends and brackets") {
    const auto params = ProblemParams::make(2.0, 2, 1.0);
    const auto eig = radial::first_eigenvalue(params, kA12);
    CHECK(eig.lambda.value() == doctest::Approx(kLambdaP2).epsilon(1e-12));

    // negative beta: sign and the constant-test bound
    const auto pneg = ProblemParams::make(2.0, 2, -1.0);
    const auto eneg = radial::first_eigenvalue(pneg, kA12);
    CHECK(eneg.lambda.value() < 0.0);
    CHECK(eneg.lambda.value() <= -4.0 / 3.0 + 1e-12); // beta P(B_2)/|A| = -4pi/(3pi)
    const double fdneg = test::fd_eigenvalue_p2(2, -1.0, 1.0, 2.0, 10000);
    CHECK(eneg.lambda.value() == doctest::Approx(fdneg).epsilon(1e-7));

    // bracket containment for p=1.5, n=3
    const auto p15 = ProblemParams::make(1.5, 3, 2.0);
    const auto a05 = geo::AnnulusSpec::make(3, 0.5, 1.0);
    const auto e15 = radial::first_eigenvalue(p15, a05);
    CHECK(e15.lambda.value() > 0.0);
    CHECK(e15.lambda.value() <= radial::constant_test_bound(p15, a05));
}

TEST_CASE("oracle equivalence at p=2 across parameter space") {
    struct Case {
        int n;
        double beta, r1, r2;
    };
    const Case cases[] = {
        {2, 1.0, 1.0, 2.0}, {3, 1.0, 1.0, 2.0}, {2, 0.5, 0.5, 1.5},
        {2, -1.0, 1.0, 2.0}, {4, 2.0, 1.0, 3.0},
    };
    for (const auto& c : cases) {
        const auto params = ProblemParams::make(2.0, c.n, c.beta);
        const auto ann = geo::AnnulusSpec::make(c.n, c.r1, c.r2);
        const double shoot = radial::first_eigenvalue(params, ann).lambda.value();
        const double fd = test::fd_eigenvalue_p2(c.n, c.beta, c.r1, c.r2, 10000);
        CHECK(std::abs(shoot - fd) <= 1e-7 * std::abs(shoot));
    }
}

TEST_CASE("torsion: closed-form p=2 profile and degenerate limits") {
    const auto params = ProblemParams::make(2.0, 2, 1.0);
    const auto tors = radial::torsion(params, kA12);
    CHECK(std::abs(tors.energy_identity_residual) < 1e-12);

    // thin annulus: torsion vanishes
    const auto thin = geo::AnnulusSpec::make(2, 1.0, 1.0 + 1e-6);
    const auto tthin = radial::torsion(params, thin);
    CHECK(tthin.torsion < 1e-10);

    CHECK_THROWS_AS(radial::torsion(ProblemParams::make(2.0, 2, -1.0), kA12), input_error);
}

TEST_CASE("rayleigh quadrature consistency") {
    const auto params = ProblemParams::make(2.0, 2, 1.0);
    // constant profile: J0 equals the constant-test bound
    const auto cprof = radial::constant_profile(params, kA12);
    const auto cf = radial::rayleigh(params, kA12, cprof);
    CHECK(cf.j0 ==
          doctest::Approx(radial::constant_test_bound(params, kA12)).epsilon(1e-12));

    // eigen profile: J0 = lambda
    const auto eig = radial::first_eigenvalue(params, kA12);
    const auto ef = radial::rayleigh(params, kA12, eig);
    CHECK(std::abs(ef.j0 - eig.lambda.value()) <= 1e-8 * std::abs(eig.lambda.value()));

    // torsion profile: K0 = 1/T, including p != 2
    for (const double p : {2.0, 3.0}) {
        const auto pp = ProblemParams::make(p, 2, 1.0);
        const auto tors = radial::torsion(pp, kA12);
        const auto tf = radial::rayleigh(pp, kA12, tors.profile);
        CHECK(std::abs(tf.k0 - 1.0 / tors.torsion) <= 1e-8 / tors.torsion);
    }
}

TEST_CASE("sign law over random parameters") {
    std::mt19937_64 rng(314159);
    std::uniform_real_distribution<double> up(1.2, 4.0), ub(0.1, 5.0), ur(0.1, 2.0),
        ug(0.2, 3.0);
    std::uniform_int_distribution<int> un(2, 5);
    for (int k = 0; k < 50; ++k) {
        const double p = up(rng);
        const int n = un(rng);
        const double beta = (k % 2 == 0 ? 1.0 : -1.0) * ub(rng);
        const double r1 = ur(rng);
        const auto ann = geo::AnnulusSpec::make(n, r1, r1 + ug(rng));
        const auto params = ProblemParams::make(p, n, beta);
        const auto eig = radial::first_eigenvalue(params, ann, 512);
        const double lambda = eig.lambda.value();
        CHECK(lambda * beta > 0.0);
        // monotone eigenfunction with the sign mandated by the boundary parameter
        const auto& psi = eig.psi;
        for (size_t i = 0; i + 1 < psi.size(); ++i) {
            if (beta > 0)
                CHECK(psi[i + 1] <= psi[i] + 1e-12);
            else
                CHECK(psi[i + 1] >= psi[i] - 1e-12);
        }
        CHECK(eig.psi_min() > 0.0);
    }
}

TEST_CASE("beta monotonicity and concavity") {
    std::vector<double> lambdas;
    std::vector<double> betas;
    for (int i = 0; i < 20; ++i) betas.push_back(0.25 + 0.35 * i);
    for (const double beta : betas)
        lambdas.push_back(
            radial::first_eigenvalue(ProblemParams::make(2.0, 2, beta), kA12, 1024)
                .lambda.value());
    for (size_t i = 0; i + 1 < lambdas.size(); ++i)
        CHECK(lambdas[i + 1] >= lambdas[i] - 1e-12);
    for (size_t i = 1; i + 1 < lambdas.size(); ++i) {
        const double d1 = (lambdas[i] - lambdas[i - 1]) / (betas[i] - betas[i - 1]);
        const double d2 = (lambdas[i + 1] - lambdas[i]) / (betas[i + 1] - betas[i]);
        CHECK((d2 - d1) / (betas[i + 1] - betas[i - 1]) <= 1e-8);
    }
}

TEST_CASE("eigenvalue derivative in beta equals the boundary p-mass") {
    const double h = 1e-4;
    for (const double p : {2.0, 2.5}) {
        const auto params = ProblemParams::make(p, 2, 1.0);
        const auto eig = radial::first_eigenvalue(params, kA12);
        const auto fv = radial::rayleigh(params, kA12, eig);
        // normalize so the p-mass is one; the boundary integral rescales by it
        const double boundary = fv.boundary_term / params.beta / fv.p_mass;
        const double lp =
            radial::first_eigenvalue(ProblemParams::make(p, 2, 1.0 + h), kA12).lambda.value();
        const double lm =
            radial::first_eigenvalue(ProblemParams::make(p, 2, 1.0 - h), kA12).lambda.value();
        CHECK(std::abs((lp - lm) / (2.0 * h) - boundary) < 1e-4);
    }
}

TEST_CASE("grid convergence of the integrator") {
    for (const double p : {2.0, 3.0, 1.5}) {
        const auto params = ProblemParams::make(p, 2, 1.0);
        const double l1 = radial::first_eigenvalue(params, kA12, 128).lambda.value();
        const double l2 = radial::first_eigenvalue(params, kA12, 256).lambda.value();
        const double l3 = radial::first_eigenvalue(params, kA12, 512).lambda.value();
        const double order = std::log2(std::abs(l1 - l2) / std::abs(l2 - l3));
        CHECK(order >= 3.5);
        CHECK(order <= 4.5);
    }
}

TEST_CASE("profile serialization") {
    const auto params = ProblemParams::make(2.0, 2, 1.0);
    const auto eig = radial::first_eigenvalue(params, kA12, 64);
    std::ostringstream os;
    radial::write_profile_csv(os, eig);
    const std::string csv = os.str();
    CHECK(csv.rfind("r,psi,flux\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 66); // header + 65 nodes
    const std::string meta = radial::profile_metadata_json(eig, 0.0, 64);
    CHECK(meta.find("\"lambda\":") != std::string::npos);
    CHECK(meta.find("\"steps\":64") != std::string::npos);
}
