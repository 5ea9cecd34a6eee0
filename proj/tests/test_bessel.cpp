#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "plrn/bessel.hpp"

using namespace plrn;
using p2::bessel;

namespace {
constexpr double kPi = std::numbers::pi;

struct GoldenRow {
    double nu, x, J, Y;
};

std::vector<GoldenRow> load_golden() {
    std::ifstream in(std::string(PLRN_TEST_DATA_DIR) + "/bessel_golden.csv");
    REQUIRE(in.good());
    std::vector<GoldenRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
        GoldenRow r;
        char comma;
        std::istringstream ls(line);
        ls >> r.nu >> comma >> r.x >> comma >> r.J >> comma >> r.Y;
        REQUIRE(ls);
        rows.push_back(r);
    }
    REQUIRE(rows.size() >= 50);
    return rows;
}
} // namespace

TEST_CASE("small-argument limits") {
    CHECK(bessel(0.0, 1e-8).J == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bessel(1.0, 1e-8).J == doctest::Approx(0.5e-8).epsilon(1e-10));
}

TEST_CASE("half-integer closed form") {
    const double x = 1.0;
    const auto e = bessel(0.5, x);
    CHECK(e.J == doctest::Approx(std::sqrt(2.0 / (kPi * x)) * std::sin(x)).epsilon(1e-14));
    CHECK(e.Y == doctest::Approx(-std::sqrt(2.0 / (kPi * x)) * std::cos(x)).epsilon(1e-14));
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(bessel(0.0, 0.0), input_error);
    CHECK_THROWS_AS(bessel(0.0, -1.0), input_error);
    CHECK_THROWS_AS(bessel(60.0, 1.0), input_error);
}

TEST_CASE("golden values from the high-precision oracle") {
    for (const auto& r : load_golden()) {
        const auto e = bessel(r.nu, r.x);
        CHECK_MESSAGE(std::abs(e.J - r.J) <= 1e-10 * std::max(1e-30, std::abs(r.J)),
                      "J mismatch at nu=", r.nu, " x=", r.x);
        CHECK_MESSAGE(std::abs(e.Y - r.Y) <= 1e-10 * std::max(1e-30, std::abs(r.Y)),
                      "Y mismatch at nu=", r.nu, " x=", r.x);
    }
}

TEST_CASE("wronskian identity everywhere evaluated") {
    for (const auto& r : load_golden()) {
        const auto e = bessel(r.nu, r.x);
        const double w = e.J * e.Yp - e.Jp * e.Y;
        CHECK(w == doctest::Approx(2.0 / (kPi * r.x)).epsilon(1e-10));
    }
}

TEST_CASE("three-term recurrence") {
    for (const double nu : {0.0, 0.5, 1.0, 1.5, 2.0, -0.5}) {
        for (const double x : {0.3, 1.0, 3.0, 8.0, 15.0, 30.0}) {
            const double jm = bessel(nu - 1.0, x).J;
            const double jp = bessel(nu + 1.0, x).J;
            const double j = bessel(nu, x).J;
            CHECK(jm + jp == doctest::Approx(2.0 * nu / x * j)
                                 .epsilon(1e-9)
                                 .scale(std::max(1.0, std::abs(j))));
        }
    }
}
