// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs entirely at desk scale from the bundled domain files.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "plrn/analytic_p2.hpp"
#include "plrn/verify.hpp"

using namespace plrn;
using radial::ProblemParams;

namespace {

int g_failures = 0;
std::chrono::steady_clock::time_point g_t0;

void begin() { g_t0 = std::chrono::steady_clock::now(); }

void report(int id, const std::string& what, bool pass, const std::string& detail = "") {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - g_t0).count();
    std::printf("[%s] criterion %2d: %s (%.1f s)%s%s\n", pass ? "PASS" : "FAIL", id,
                what.c_str(), secs, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string domains_dir() { return PLRN_DOMAIN_DIR; }

struct NamedDomain {
    std::string name;
    geo::DomainWithHoles dom;
};

std::vector<NamedDomain> bundled_domains() {
    std::vector<NamedDomain> out;
    for (const char* name : {"square_hole", "square_two_holes", "hexagon_hole",
                             "near_annulus", "thin_rect_hole"})
        out.push_back({name, geo::read_domain_file(domains_dir() + "/" + name + ".dom")});
    return out;
}

// Criterion 1: shooting vs Bessel-condition roots at p = 2.
void criterion_1() {
    begin();
    struct Case {
        int n;
        double beta, r1, r2;
    };
    const Case cases[] = {
        {2, 1.0, 1.0, 2.0},  {2, 0.5, 0.5, 1.5},  {2, 3.0, 1.0, 1.6},  {2, 0.1, 2.0, 3.0},
        {3, 1.0, 1.0, 2.0},  {3, 2.0, 0.5, 1.25}, {4, 1.0, 1.0, 2.0},  {4, 0.7, 1.5, 2.5},
        {2, 10.0, 1.0, 2.0}, {3, 0.3, 0.8, 2.2},
    };
    bool pass = true;
    double worst = 0.0;
    for (const auto& c : cases) {
        const auto ann = geo::AnnulusSpec::make(c.n, c.r1, c.r2);
        const auto agree = p2::cross_check_eigenvalue(c.n, c.beta, ann);
        worst = std::max(worst, agree.rel_diff);
        pass = pass && agree.rel_diff <= 1e-6;
    }
    report(1, "backend agreement (p=2), 10 cases, <=1e-6 relative", pass,
           "worst rel diff " + format_double(worst));
}

// Criterion 2: shooting vs dense finite-volume eigenproblem (1e4 nodes).
void criterion_2() {
    begin();
    struct Case {
        int n;
        double beta, r1, r2;
    };
    const Case cases[] = {
        {2, 1.0, 1.0, 2.0}, {3, 1.0, 1.0, 2.0}, {2, 0.5, 0.5, 1.5},
        {2, -1.0, 1.0, 2.0}, {4, 2.0, 1.0, 3.0},
    };
    bool pass = true;
    double worst = 0.0;
    for (const auto& c : cases) {
        const auto params = ProblemParams::make(2.0, c.n, c.beta);
        const auto ann = geo::AnnulusSpec::make(c.n, c.r1, c.r2);
        const double shoot = radial::first_eigenvalue(params, ann).lambda.value();
        const double fd = test::fd_eigenvalue_p2(c.n, c.beta, c.r1, c.r2, 10000);
        const double rel = std::abs(shoot - fd) / std::abs(shoot);
        worst = std::max(worst, rel);
        pass = pass && rel <= 1e-7;
    }
    report(2, "oracle equivalence (p=2 vs dense eigenproblem), <=1e-7", pass,
           "worst rel diff " + format_double(worst));
}

// Criterion 3: flux-quadrature torsion vs the explicit p = 2 profile.
void criterion_3() {
    begin();
    struct Case {
        int n;
        double beta, r1, r2;
    };
    const Case cases[] = {
        {2, 1.0, 1.0, 2.0}, {3, 1.0, 1.0, 2.0}, {4, 2.0, 0.5, 1.5},
        {2, 0.25, 2.0, 3.0}, {3, 5.0, 0.2, 1.0},
    };
    bool pass = true;
    double worst = 0.0;
    for (const auto& c : cases) {
        const auto ann = geo::AnnulusSpec::make(c.n, c.r1, c.r2);
        const auto closed = p2::torsion_profile(c.n, c.beta, ann);
        worst = std::max(worst, closed.max_pointwise_diff);
        pass = pass && closed.max_pointwise_diff <= 1e-8;
    }
    report(3, "torsion closed form vs flux quadrature, pointwise <=1e-8", pass,
           "worst pointwise diff " + format_double(worst));
}

// Criteria 4 and 5: theorem certificates over the bundled domains.
void criteria_4_5(const std::vector<NamedDomain>& domains) {
    begin();
    struct PB {
        double p, beta;
    };
    const PB eig_cases[] = {{2.0, 1.0}, {2.0, -1.0}, {3.0, 1.0}, {1.5, 0.5}};
    verify::VerifyOptions opts;
    bool pass4 = true;
    std::string fail4;
    for (const auto& nd : domains) {
        for (const auto& pb : eig_cases) {
            const auto params = ProblemParams::make(pb.p, 2, pb.beta);
            const auto rep = verify::check_theorem_1(nd.dom, params, 0.02, opts);
            bool ok = !rep.incomplete;
            for (const auto& c : rep.checks)
                if (c.name == "fem_le_web" || c.name == "web_le_annulus")
                    ok = ok && c.pass;
            if (!ok && fail4.empty())
                fail4 = nd.name + " p=" + format_double(pb.p) +
                        " beta=" + format_double(pb.beta) +
                        (rep.incomplete ? (" [" + rep.failure + "]") : "");
            pass4 = pass4 && ok;
        }
    }
    report(4, "theorem-1 chain on 5 domains x 4 parameter pairs, h=0.02", pass4, fail4);

    begin();
    const PB tor_cases[] = {{2.0, 1.0}, {3.0, 1.0}, {1.5, 0.5}};
    bool pass5 = true;
    std::string fail5;
    for (const auto& nd : domains) {
        for (const auto& pb : tor_cases) {
            const auto params = ProblemParams::make(pb.p, 2, pb.beta);
            const auto rep = verify::check_theorem_2(nd.dom, params, 0.02, opts);
            bool ok = !rep.incomplete && rep.value_fem >= rep.value_annulus * (1.0 - 1e-3);
            if (!ok && fail5.empty())
                fail5 = nd.name + " p=" + format_double(pb.p) +
                        " beta=" + format_double(pb.beta);
            pass5 = pass5 && ok;
        }
    }
    report(5, "theorem-2 torsion bound on 5 domains x 3 parameter pairs, h=0.02", pass5,
           fail5);
}

// Criterion 6: margins shrink as the polygonal annulus refines.
void criterion_6() {
    begin();
    auto margins = [&](const std::string& file) {
        const auto dom = geo::read_domain_file(domains_dir() + "/" + file);
        const auto params = ProblemParams::make(2.0, 2, 1.0);
        const auto r1 = verify::check_theorem_1(dom, params, 0.02);
        const auto r2 = verify::check_theorem_2(dom, params, 0.02);
        std::vector<double> m;
        m.push_back(std::abs(r1.web.j0 - r1.value_annulus) / std::abs(r1.value_annulus));
        m.push_back(std::abs(r1.value_fem - r1.value_annulus) / std::abs(r1.value_annulus));
        m.push_back(std::abs(r2.value_fem - r2.value_annulus) / r2.value_annulus);
        m.push_back(std::abs(r2.web.k0 - 1.0 / r2.value_annulus) * r2.value_annulus);
        return m;
    };
    const auto fine = margins("near_annulus.dom");   // 720-gon
    const auto coarse = margins("annulus90.dom");    // 90-gon
    bool pass = true;
    double worst = 0.0;
    for (size_t i = 0; i < fine.size(); ++i) {
        worst = std::max(worst, fine[i]);
        pass = pass && fine[i] <= 5e-3 && fine[i] < coarse[i];
    }
    report(6, "equality sharpness: 720-gon margins <=5e-3 and < 90-gon margins", pass,
           "worst 720-gon margin " + format_double(worst));
}

// Criterion 7: proposition suite (sign, monotonicity, concavity, derivative,
// constant-test bound for negative beta).
void criterion_7(const std::vector<NamedDomain>& domains) {
    begin();
    bool pass = true;
    std::string detail;

    // sign law on 50 random radial cases
    std::mt19937_64 rng(271828);
    std::uniform_real_distribution<double> up(1.2, 4.0), ub(0.1, 5.0), ur(0.1, 2.0),
        ug(0.2, 3.0);
    std::uniform_int_distribution<int> un(2, 5);
    for (int k = 0; k < 50 && pass; ++k) {
        const double pexp = up(rng);
        const int n = un(rng);
        const double beta = (k % 2 == 0 ? 1.0 : -1.0) * ub(rng);
        const double r1 = ur(rng);
        const auto ann = geo::AnnulusSpec::make(n, r1, r1 + ug(rng));
        const double lambda =
            radial::first_eigenvalue(ProblemParams::make(pexp, n, beta), ann, 512)
                .lambda.value();
        if (!(lambda * beta > 0.0)) {
            pass = false;
            detail = "sign law violated";
        }
    }

    // radial beta-monotonicity and concavity, second differences <= 1e-8
    const auto a12 = geo::AnnulusSpec::make(2, 1.0, 2.0);
    {
        std::vector<double> betas, vals;
        for (int i = 0; i < 20; ++i) betas.push_back(0.25 + 0.3 * i);
        const auto sw = verify::beta_sweep_annulus(2.0, 2, betas, a12,
                                                   verify::Mode::Eigen, 2048, 1e-8);
        if (!(sw.monotone_ok && sw.concave_ok && sw.sign_ok)) {
            pass = false;
            detail = "radial beta sweep flags";
        }
    }

    // FEM beta-monotonicity and concavity at 1e-6 on a fixed mesh
    {
        const auto outer = geo::regular_polygon(256, 2.0);
        geo::Polygon inner;
        inner.vertices = geo::regular_polygon(256, 1.0).vertices();
        const auto dom = geo::DomainWithHoles::make(outer, {inner});
        std::vector<double> betas;
        for (int i = 0; i < 10; ++i) betas.push_back(0.4 + 0.4 * i);
        const auto sw = verify::beta_sweep_domain(2.0, betas, dom, 0.08,
                                                  verify::Mode::Eigen, {}, 1e-6);
        if (!(sw.monotone_ok && sw.concave_ok && sw.sign_ok)) {
            pass = false;
            detail = "fem beta sweep flags";
        }

        // derivative identity: radial <= 1e-4, fem <= 1e-3
        const double h = 1e-4;
        const auto params = ProblemParams::make(2.0, 2, 1.0);
        const auto eig = radial::first_eigenvalue(params, a12);
        const auto fv = radial::rayleigh(params, a12, eig);
        const double bnd = fv.boundary_term / params.beta / fv.p_mass;
        const double lp = radial::first_eigenvalue(ProblemParams::make(2.0, 2, 1.0 + h), a12)
                              .lambda.value();
        const double lm = radial::first_eigenvalue(ProblemParams::make(2.0, 2, 1.0 - h), a12)
                              .lambda.value();
        if (std::abs((lp - lm) / (2 * h) - bnd) > 1e-4) {
            pass = false;
            detail = "radial derivative identity";
        }

        const auto mesh = fem::generate_mesh(dom, 0.08);
        const auto field = fem::eigen_fem(params, mesh);
        const auto fn = fem::field_functionals(params, mesh, field.u);
        const double bndf = fn.boundary_term / params.beta / fn.p_mass;
        const double lpf = fem::eigen_fem(ProblemParams::make(2.0, 2, 1.0 + h), mesh).value;
        const double lmf = fem::eigen_fem(ProblemParams::make(2.0, 2, 1.0 - h), mesh).value;
        if (std::abs((lpf - lmf) / (2 * h) - bndf) > 1e-3) {
            pass = false;
            detail = "fem derivative identity";
        }
    }

    // constant-test bound for beta < 0 on a holed domain
    {
        const auto& nd = domains.front();
        const auto params = ProblemParams::make(2.0, 2, -1.0);
        const auto mesh = fem::generate_mesh(nd.dom, 0.05);
        const auto field = fem::eigen_fem(params, mesh);
        const double bound = params.beta * nd.dom.outer_perimeter() / nd.dom.area();
        if (!(field.value <= bound + 1e-10)) {
            pass = false;
            detail = "constant-test bound (beta<0)";
        }
    }

    report(7, "proposition suite: sign/monotone/concave/derivative/bound", pass, detail);
}

// Criterion 8: Dirichlet limit of the Robin problem at beta = 1e4.
void criterion_8() {
    begin();
    const auto outer = geo::regular_polygon(512, 2.0);
    geo::Polygon inner;
    inner.vertices = geo::regular_polygon(512, 1.0).vertices();
    const auto dom = geo::DomainWithHoles::make(outer, {inner});
    const auto mesh = fem::generate_mesh(dom, 0.04);
    const double dn = fem::eigen_dirichlet_p2(mesh);
    const double robin = fem::eigen_fem(ProblemParams::make(2.0, 2, 1e4), mesh).value;
    const double rel = std::abs(robin - dn) / dn;
    report(8, "Dirichlet limit: lambda(beta=1e4) within 2% of the Dirichlet solve",
           rel <= 0.02, "rel diff " + format_double(rel));
}

// Criterion 9: geometry exactness.
void criterion_9() {
    begin();
    bool pass = true;
    std::string detail;
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> urho(0.0, 2.0);
    constexpr double kPi = 3.14159265358979323846;
    for (int k = 0; k < 100 && pass; ++k) {
        const auto poly = test::random_convex_polygon(rng);
        const auto q = geo::quermass(poly);
        for (double m : geo::af_chain_margins(q))
            if (m < -1e-12) {
                pass = false;
                detail = "AF chain";
            }
        for (int j = 0; j < 10; ++j) {
            const double rho = urho(rng);
            const auto pb = geo::outer_parallel(poly, rho);
            const double vol = q.w[0] + q.perimeter() * rho + kPi * rho * rho;
            const double per = q.perimeter() + 2.0 * kPi * rho;
            if (std::abs(pb.volume - vol) > 1e-12 * std::max(1.0, vol) ||
                std::abs(pb.perimeter - per) > 1e-12 * std::max(1.0, per)) {
                pass = false;
                detail = "Steiner identity";
            }
        }
        // inner-parallel perimeter decay
        const double rin = geo::inradius(poly);
        for (int j = 1; j <= 4; ++j) {
            const double t = rin * j / 5.0;
            const auto ip = geo::inner_parallel(poly, t);
            const auto ip2 = geo::inner_parallel(poly, t + 1e-4);
            if (!ip || !ip2) continue;
            if ((ip->perimeter() - ip2->perimeter()) / 1e-4 < 2.0 * kPi - 1e-8) {
                pass = false;
                detail = "perimeter decay bound";
            }
        }
    }
    report(9, "geometry exactness: Steiner/decay/AF on 100 random polygons", pass, detail);
}

// Criterion 10: FEM convergence order against the radial oracle.
void criterion_10() {
    begin();
    const auto outer = geo::regular_polygon(1024, 2.0);
    geo::Polygon inner;
    inner.vertices = geo::regular_polygon(512, 1.0).vertices();
    const auto dom = geo::DomainWithHoles::make(outer, {inner});
    const auto params = ProblemParams::make(2.0, 2, 1.0);
    const double exact =
        radial::first_eigenvalue(params, geo::AnnulusSpec::make(2, 1.0, 2.0)).lambda.value();
    std::vector<double> errs;
    for (const double h : {0.08, 0.04, 0.02}) {
        const auto mesh = fem::generate_mesh(dom, h);
        errs.push_back(std::abs(fem::eigen_fem(params, mesh).value - exact));
    }
    const double o1 = std::log2(errs[0] / errs[1]);
    const double o2 = std::log2(errs[1] / errs[2]);
    const double order = 0.5 * (o1 + o2);
    report(10, "FEM convergence order in [1.7, 2.3] over h = 0.08/0.04/0.02",
           order >= 1.7 && order <= 2.3,
           "observed order " + format_double(order) + " (" + format_double(o1) + ", " +
               format_double(o2) + ")");
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    const auto t0 = std::chrono::steady_clock::now();
    const auto domains = bundled_domains();
    criterion_1();
    criterion_2();
    criterion_3();
    criteria_4_5(domains);
    criterion_6();
    criterion_7(domains);
    criterion_8();
    criterion_9();
    criterion_10();
    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d/10 criteria passed (%.1f s total)\n", 10 - g_failures, total);
    return g_failures == 0 ? 0 : 1;
}
