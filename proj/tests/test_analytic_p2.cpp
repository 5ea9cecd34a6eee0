#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "plrn/analytic_p2.hpp"

using namespace plrn;

namespace {
const geo::AnnulusSpec kA12 = geo::AnnulusSpec::make(2, 1.0, 2.0);
}

TEST_CASE("eigencondition: residual vanishes at the shooting root") {
    const auto params = radial::ProblemParams::make(2.0, 2, 1.0);
    const double lambda = radial::first_eigenvalue(params, kA12).lambda.value();
    CHECK(std::abs(p2::eigen_condition(lambda, 2, 1.0, kA12)) < 1e-6);
    // the residual is the normalized determinant, so compare against its slope
    const double slope = (p2::eigen_condition(lambda * 1.01, 2, 1.0, kA12) -
                          p2::eigen_condition(lambda * 0.99, 2, 1.0, kA12)) /
                         (0.02 * lambda);
    CHECK(std::abs(p2::eigen_condition(lambda, 2, 1.0, kA12)) <
          1e-6 * std::abs(slope) * lambda);
}

TEST_CASE("eigencondition: finite nonzero limit at lambda -> 0+") {
    const double r1 = p2::eigen_condition(1e-10, 2, 1.0, kA12);
    const double r2 = p2::eigen_condition(1e-12, 2, 1.0, kA12);
    CHECK(std::abs(r1) > 1e-3);
    CHECK(std::abs(r2) > 1e-3);
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-4)); // settled, no root at zero
}

TEST_CASE("eigencondition: argument contract") {
    CHECK_THROWS_AS(p2::eigen_condition(-1.0, 2, 1.0, kA12), input_error);
    CHECK_THROWS_AS(p2::eigen_condition(1.0, 2, -1.0, kA12), input_error);
    const auto ball = geo::AnnulusSpec::make(2, 0.0, 1.0);
    CHECK_THROWS_AS(p2::eigen_condition(1.0, 2, 1.0, ball), input_error);
}

TEST_CASE("bessel root agrees with shooting across dimensions") {
    for (const int n : {2, 3, 4}) {
        const auto ann = geo::AnnulusSpec::make(n, 1.0, 2.0);
        const auto agree = p2::cross_check_eigenvalue(n, 1.0, ann);
        CHECK(agree.rel_diff <= 1e-6);
        CHECK_FALSE(agree.alarm);
        if (n == 2) {
            // the remark-style determinant coincides with the derived one here
            CHECK(agree.remark_rel_diff <= 1e-6);
            CHECK_FALSE(agree.remark_alarm);
        } else {
            // its order pattern drifts for n >= 3: the alarm is the contract
            CHECK(agree.remark_alarm);
        }
    }
}

TEST_CASE("backend agreement over random annuli") {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> ub(0.05, 5.0), ur(0.2, 2.0), ug(0.3, 2.5);
    std::uniform_int_distribution<int> un(2, 4);
    for (int k = 0; k < 20; ++k) {
        const int n = un(rng);
        const double beta = ub(rng);
        const double r1 = ur(rng);
        const auto ann = geo::AnnulusSpec::make(n, r1, r1 + ug(rng));
        const auto agree = p2::cross_check_eigenvalue(n, beta, ann, 2048);
        CHECK_MESSAGE(agree.rel_diff <= 1e-6, "n=", n, " beta=", beta, " r1=", ann.r1,
                      " r2=", ann.r2, " rel=", agree.rel_diff);
    }
}

TEST_CASE("torsion closed form: profile, boundary conditions, rigidity") {
    for (const int n : {2, 3, 4}) {
        const auto ann = geo::AnnulusSpec::make(n, 1.0, 2.0);
        const auto closed = p2::torsion_profile(n, 1.0, ann);
        CHECK(closed.max_pointwise_diff < 1e-8);
        CHECK(std::abs(closed.neumann_residual) < 1e-10);
        CHECK(std::abs(closed.robin_residual) < 1e-10);
        CHECK(closed.torsion_closed ==
              doctest::Approx(closed.torsion_quadrature).epsilon(1e-10));
    }
    CHECK_THROWS_AS(p2::torsion_profile(2, -1.0, kA12), input_error);
}

TEST_CASE("torsion closed form matches the flux quadrature profile pointwise") {
    const auto closed = p2::torsion_profile(2, 1.0, kA12);
    const auto quad = radial::torsion(radial::ProblemParams::make(2.0, 2, 1.0), kA12);
    REQUIRE(closed.profile.r.size() == quad.profile.r.size());
    for (size_t i = 0; i < closed.profile.r.size(); i += 97)
        CHECK(closed.profile.psi[i] ==
              doctest::Approx(quad.profile.psi[i]).epsilon(1e-10));
}
