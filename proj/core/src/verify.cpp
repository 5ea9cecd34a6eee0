#include "plrn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include "json.hpp"

namespace plrn::verify {

namespace {

using nlohmann::ordered_json;

void add_check(VerificationReport& rep, const std::string& name, double lhs, double rhs) {
    Check c;
    c.name = name;
    c.lhs = lhs;
    c.rhs = rhs;
    c.margin = rhs - lhs;
    c.pass = lhs <= rhs;
    rep.checks.push_back(std::move(c));
}

// Per-level table shared by both theorems: for each rho in (r1, r2) the
// domain-side level set is the inner parallel body at depth s = r2 - rho and
// the annulus-side set is the ball shell of radius rho.
void fill_levels(VerificationReport& rep, const geo::DomainWithHoles& dom,
                 const WebFunction& web, int count) {
    const double r1 = web.annulus.r1;
    const double r2 = web.annulus.r2;
    for (int j = 1; j <= count; ++j) {
        const double rho = r1 + (r2 - r1) * j / (count + 1);
        LevelRow row;
        row.rho = rho;
        row.s = r2 - rho;
        row.t = web.source.psi_at(rho);
        const geo::LevelSlice slice = geo::level_slice(dom, row.s);
        row.live_length = slice.live_length;
        row.perim_body = slice.body ? slice.body->perimeter() : 0.0;
        row.perim_annulus = 2.0 * std::numbers::pi * rho;
        row.mu = slice.live_area;
        row.eta = std::numbers::pi * (rho * rho - r1 * r1);
        rep.levels.push_back(row);
    }
}

void add_level_checks(VerificationReport& rep, const Tolerances& tol) {
    double worst_live = 1e308, worst_perim = 1e308, worst_measure = 1e308;
    for (const LevelRow& row : rep.levels) {
        worst_live = std::min(worst_live, row.perim_body - row.live_length);
        worst_perim = std::min(worst_perim,
                               row.perim_annulus * (1.0 + tol.rel) + tol.abs - row.perim_body);
        worst_measure = std::min(worst_measure, row.mu - row.eta + tol.rel * (rep.domain_area) +
                                                    tol.abs);
    }
    if (rep.levels.empty()) return;
    add_check(rep, "level_live_length_le_perimeter", -worst_live, 0.0);
    add_check(rep, "level_perimeter_le_annulus", -worst_perim, 0.0);
    add_check(rep, "level_measure_ge_annulus", -worst_measure, 0.0);
}

ordered_json annulus_json(const geo::AnnulusSpec& a) {
    return ordered_json{{"n", a.n}, {"r1", a.r1}, {"r2", a.r2}};
}

} // namespace

VerificationReport check_theorem_1(const geo::DomainWithHoles& dom,
                                   const radial::ProblemParams& params, double h,
                                   const VerifyOptions& opts) {
    VerificationReport rep;
    rep.params = params;
    rep.mode = Mode::Eigen;
    rep.h = h;
    rep.tol = opts.tol;
    rep.radial_steps = opts.radial_steps;
    rep.domain_area = dom.area();
    rep.outer_perimeter = dom.outer_perimeter();
    rep.domain_inradius = geo::inradius(dom.outer);
    rep.annulus = geo::matched_annulus(rep.domain_area, rep.outer_perimeter, params.n);

    const radial::RadialProfile eig = radial::first_eigenvalue(params, rep.annulus,
                                                               opts.radial_steps);
    rep.value_annulus = eig.lambda.value();
    if (params.p == 2.0 && params.beta > 0.0)
        rep.value_annulus_bessel = p2::first_eigenvalue_bessel(params.n, params.beta, rep.annulus);

    const WebFunction web = build_web(dom, params, Mode::Eigen, opts.radial_steps);
    try {
        const fem::Mesh mesh = fem::generate_mesh(dom, h, opts.mesh);
        rep.mesh_nodes = mesh.nodes.size();
        rep.mesh_triangles = mesh.triangles.size();
        const fem::FemField field = fem::eigen_fem(params, mesh, opts.fem);
        rep.value_fem = field.value;
        rep.fem_iterations = field.iterations;
        const fem::Mesh coarse = fem::generate_mesh(dom, 2.0 * h, opts.mesh);
        rep.value_fem_coarse = fem::eigen_fem(params, coarse, opts.fem).value;
        rep.fem_error_estimate = std::abs(rep.value_fem - rep.value_fem_coarse) / 3.0;
        rep.tol_chain = 5.0 * rep.fem_error_estimate;

        rep.web = evaluate_functionals(web, mesh);

        add_check(rep, "fem_le_web", rep.value_fem, rep.web.j0 + rep.tol_chain);
        add_check(rep, "web_le_annulus", rep.web.j0,
                  rep.value_annulus + std::abs(rep.value_annulus) * rep.tol.rel + rep.tol.abs);
        add_check(rep, "sign_law", 0.0, params.beta * rep.value_fem);
        if (rep.value_annulus_bessel)
            add_check(rep, "backend_agreement",
                      std::abs(*rep.value_annulus_bessel - rep.value_annulus),
                      1e-6 * std::abs(rep.value_annulus));
        fill_levels(rep, dom, web, opts.levels);
        add_level_checks(rep, rep.tol);
        rep.all_pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                                   [](const Check& c) { return c.pass; });
    } catch (const solver_error& e) {
        rep.incomplete = true;
        rep.failure = e.what();
    }
    return rep;
}

VerificationReport check_theorem_2(const geo::DomainWithHoles& dom,
                                   const radial::ProblemParams& params, double h,
                                   const VerifyOptions& opts) {
    if (!(params.beta > 0.0)) throw input_error("check_theorem_2: beta must be positive");
    VerificationReport rep;
    rep.params = params;
    rep.mode = Mode::Torsion;
    rep.h = h;
    rep.tol = opts.tol;
    rep.radial_steps = opts.radial_steps;
    rep.domain_area = dom.area();
    rep.outer_perimeter = dom.outer_perimeter();
    rep.domain_inradius = geo::inradius(dom.outer);
    rep.annulus = geo::matched_annulus(rep.domain_area, rep.outer_perimeter, params.n);

    const radial::TorsionResult tors = radial::torsion(params, rep.annulus, opts.radial_steps);
    rep.value_annulus = tors.torsion;
    const radial::FunctionalValues annulus_fn =
        radial::rayleigh(params, rep.annulus, tors.profile);

    const WebFunction web = build_web(dom, params, Mode::Torsion, opts.radial_steps);
    try {
        const fem::Mesh mesh = fem::generate_mesh(dom, h, opts.mesh);
        rep.mesh_nodes = mesh.nodes.size();
        rep.mesh_triangles = mesh.triangles.size();
        const fem::FemField field = fem::torsion_fem(params, mesh, opts.fem);
        rep.value_fem = field.value;
        rep.fem_iterations = field.iterations;
        const fem::Mesh coarse = fem::generate_mesh(dom, 2.0 * h, opts.mesh);
        rep.value_fem_coarse = fem::torsion_fem(params, coarse, opts.fem).value;
        rep.fem_error_estimate = std::abs(rep.value_fem - rep.value_fem_coarse) / 3.0;
        rep.tol_chain = 5.0 * rep.fem_error_estimate;

        rep.web = evaluate_functionals(web, mesh);

        add_check(rep, "torsion_ge_annulus",
                  rep.value_annulus * (1.0 - rep.tol.rel) - rep.tol.abs, rep.value_fem);
        add_check(rep, "web_mass_ge_annulus",
                  annulus_fn.mass - rep.tol.rel * std::abs(annulus_fn.mass) - rep.tol.abs,
                  rep.web.mass);
        const double inv_t = 1.0 / rep.value_fem;
        const double inv_tol =
            rep.tol.rel * std::abs(inv_t) +
            5.0 * std::abs(1.0 / std::max(rep.value_fem, 1e-300) -
                           1.0 / std::max(rep.value_fem_coarse, 1e-300)) / 3.0;
        add_check(rep, "k0_web_ge_inv_torsion", inv_t - inv_tol - rep.tol.abs, rep.web.k0);
        fill_levels(rep, dom, web, opts.levels);
        add_level_checks(rep, rep.tol);
        rep.all_pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                                   [](const Check& c) { return c.pass; });
    } catch (const solver_error& e) {
        rep.incomplete = true;
        rep.failure = e.what();
    }
    return rep;
}

std::string report_json(const VerificationReport& rep) {
    ordered_json j;
    j["config"] = {{"p", rep.params.p},
                   {"n", rep.params.n},
                   {"beta", rep.params.beta},
                   {"mode", rep.mode == Mode::Eigen ? "eigen" : "torsion"},
                   {"h", rep.h},
                   {"radial_steps", rep.radial_steps},
                   {"tol_rel", rep.tol.rel},
                   {"tol_abs", rep.tol.abs}};
    j["domain"] = {{"area", rep.domain_area},
                   {"outer_perimeter", rep.outer_perimeter},
                   {"inradius", rep.domain_inradius}};
    j["matched_annulus"] = annulus_json(rep.annulus);
    j["incomplete"] = rep.incomplete;
    if (rep.incomplete) {
        j["failure"] = rep.failure;
        return j.dump(2) + "\n";
    }
    j["backends"] = {{"value_fem", rep.value_fem},
                     {"value_fem_coarse", rep.value_fem_coarse},
                     {"value_annulus_radial", rep.value_annulus},
                     {"fem_error_estimate", rep.fem_error_estimate},
                     {"tol_chain", rep.tol_chain},
                     {"fem_iterations", rep.fem_iterations},
                     {"mesh_nodes", rep.mesh_nodes},
                     {"mesh_triangles", rep.mesh_triangles}};
    if (rep.value_annulus_bessel)
        j["backends"]["value_annulus_bessel"] = *rep.value_annulus_bessel;
    j["web"] = {{"grad_energy", rep.web.grad_energy},
                {"boundary_term", rep.web.boundary_term},
                {"p_mass", rep.web.p_mass},
                {"mass", rep.web.mass},
                {"j0", rep.web.j0},
                {"k0", rep.web.k0}};
    j["checks"] = ordered_json::array();
    for (const Check& c : rep.checks)
        j["checks"].push_back(ordered_json{{"name", c.name},
                                           {"lhs", c.lhs},
                                           {"rhs", c.rhs},
                                           {"margin", c.margin},
                                           {"pass", c.pass}});
    j["levels"] = ordered_json::array();
    for (const LevelRow& row : rep.levels)
        j["levels"].push_back(ordered_json{{"t", row.t},
                                           {"rho", row.rho},
                                           {"s", row.s},
                                           {"live_length", row.live_length},
                                           {"perim_body", row.perim_body},
                                           {"perim_annulus", row.perim_annulus},
                                           {"mu", row.mu},
                                           {"eta", row.eta}});
    j["all_pass"] = rep.all_pass;
    return j.dump(2) + "\n";
}

void write_levels_csv(std::ostream& out, const VerificationReport& rep) {
    out << "t,rho,s,live_length,perim_body,perim_annulus,mu,eta\n";
    for (const LevelRow& row : rep.levels)
        out << format_double(row.t) << "," << format_double(row.rho) << ","
            << format_double(row.s) << "," << format_double(row.live_length) << ","
            << format_double(row.perim_body) << "," << format_double(row.perim_annulus) << ","
            << format_double(row.mu) << "," << format_double(row.eta) << "\n";
}

namespace {

void sweep_flags(SweepResult& sr) {
    const auto& pts = sr.points;
    sr.max_second_diff = -1e308;
    for (size_t i = 0; i < pts.size(); ++i) {
        if (sr.mode == Mode::Eigen) {
            if (pts[i].value * pts[i].beta < 0.0 ||
                (pts[i].value == 0.0 && pts[i].beta != 0.0))
                sr.sign_ok = false;
        } else {
            if (!(pts[i].value > 0.0)) sr.sign_ok = false;
        }
        if (i + 1 < pts.size()) {
            const double dv = pts[i + 1].value - pts[i].value;
            const double db = pts[i + 1].beta - pts[i].beta;
            sr.lipschitz_estimate = std::max(sr.lipschitz_estimate, std::abs(dv / db));
            if (sr.mode == Mode::Eigen ? dv < -sr.second_diff_tol : dv > sr.second_diff_tol)
                sr.monotone_ok = false;
        }
        if (i >= 1 && i + 1 < pts.size()) {
            const double d1 = (pts[i].value - pts[i - 1].value) /
                              (pts[i].beta - pts[i - 1].beta);
            const double d2 = (pts[i + 1].value - pts[i].value) /
                              (pts[i + 1].beta - pts[i].beta);
            const double dd = (d2 - d1) / (pts[i + 1].beta - pts[i - 1].beta);
            sr.max_second_diff = std::max(sr.max_second_diff, dd);
            if (dd > sr.second_diff_tol) sr.concave_ok = false;
        }
    }
    if (pts.size() < 3) sr.max_second_diff = 0.0;
}

void validate_grid(const std::vector<double>& betas) {
    if (betas.empty()) throw input_error("beta sweep: empty grid");
    for (double b : betas)
        if (b == 0.0) throw input_error("beta sweep: grid must exclude beta = 0");
    for (size_t i = 0; i + 1 < betas.size(); ++i) {
        if (betas[i] >= betas[i + 1]) throw input_error("beta sweep: grid must be increasing");
        if (betas[i] * betas[i + 1] < 0.0)
            throw input_error("beta sweep: grid must not cross zero");
    }
}

template <class F>
std::vector<SweepPoint> run_pool(const std::vector<double>& betas, int threads, F&& eval) {
    std::vector<SweepPoint> out(betas.size());
    if (threads <= 1) {
        for (size_t i = 0; i < betas.size(); ++i) out[i] = {betas[i], eval(betas[i])};
        return out;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= betas.size()) return;
            try {
                out[i] = {betas[i], eval(betas[i])};
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(threads, static_cast<int>(betas.size())); ++t)
        pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

} // namespace

SweepResult beta_sweep_annulus(double p, int n, const std::vector<double>& betas,
                               const geo::AnnulusSpec& annulus, Mode mode, int steps,
                               double second_diff_tol, int threads) {
    validate_grid(betas);
    if (mode == Mode::Torsion && betas.front() < 0.0)
        throw input_error("beta sweep: torsion needs beta > 0");
    SweepResult sr;
    sr.mode = mode;
    sr.second_diff_tol = second_diff_tol;
    sr.points = run_pool(betas, threads, [&](double beta) {
        const auto params = radial::ProblemParams::make(p, n, beta);
        if (mode == Mode::Eigen)
            return radial::first_eigenvalue(params, annulus, steps).lambda.value();
        return 1.0 / radial::torsion(params, annulus, steps).torsion;
    });
    sweep_flags(sr);
    return sr;
}

SweepResult beta_sweep_domain(double p, const std::vector<double>& betas,
                              const geo::DomainWithHoles& dom, double h, Mode mode,
                              const VerifyOptions& opts, double second_diff_tol, int threads) {
    validate_grid(betas);
    if (mode == Mode::Torsion && betas.front() < 0.0)
        throw input_error("beta sweep: torsion needs beta > 0");
    const fem::Mesh mesh = fem::generate_mesh(dom, h, opts.mesh);
    SweepResult sr;
    sr.mode = mode;
    sr.second_diff_tol = second_diff_tol;
    sr.points = run_pool(betas, threads, [&](double beta) {
        const auto params = radial::ProblemParams::make(p, 2, beta);
        if (mode == Mode::Eigen) return fem::eigen_fem(params, mesh, opts.fem).value;
        return 1.0 / fem::torsion_fem(params, mesh, opts.fem).value;
    });
    sweep_flags(sr);
    return sr;
}

std::string sweep_json(const SweepResult& sr) {
    ordered_json j;
    j["mode"] = sr.mode == Mode::Eigen ? "eigen" : "torsion";
    j["points"] = ordered_json::array();
    for (const SweepPoint& pt : sr.points)
        j["points"].push_back(ordered_json{{"beta", pt.beta}, {"value", pt.value}});
    j["monotone_ok"] = sr.monotone_ok;
    j["concave_ok"] = sr.concave_ok;
    j["sign_ok"] = sr.sign_ok;
    j["max_second_diff"] = sr.max_second_diff;
    j["lipschitz_estimate"] = sr.lipschitz_estimate;
    j["second_diff_tol"] = sr.second_diff_tol;
    return j.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& out, const SweepResult& sr) {
    out << "beta,value\n";
    for (const SweepPoint& pt : sr.points)
        out << format_double(pt.beta) << "," << format_double(pt.value) << "\n";
}

} // namespace plrn::verify
