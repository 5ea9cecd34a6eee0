// plrn: Robin/Neumann p-Laplacian eigenvalues and torsional rigidity on
// annuli (radial + Bessel backends) and holed convex domains (FEM), with
// annulus-comparison certificates.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "plrn/analytic_p2.hpp"
#include "plrn/fem.hpp"
#include "plrn/verify.hpp"

namespace {

using nlohmann::ordered_json;
using namespace plrn;

constexpr const char* kVersion = "0.1.0";

struct GlobalOpts {
    std::string out;
    double tol_rel = 1e-3;
    double tol_abs = 1e-8;
    unsigned long long seed = 0;
    int threads = 1;
};

void emit(const GlobalOpts& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(g.out);
    if (!f) throw input_error("cannot open output file: " + g.out);
    f << text;
}

ordered_json config_echo(const GlobalOpts& g, ordered_json extra) {
    ordered_json j;
    j["tool"] = "plrn";
    j["version"] = kVersion;
    j["seed"] = g.seed;
    j["threads"] = g.threads;
    j["tol_rel"] = g.tol_rel;
    j["tol_abs"] = g.tol_abs;
    for (auto& [k, v] : extra.items()) j[k] = v;
    return j;
}

std::vector<double> parse_beta_grid(const std::string& list, double bmin, double bmax,
                                    int count) {
    std::vector<double> betas;
    if (!list.empty()) {
        std::stringstream ss(list);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                betas.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw input_error("bad beta value in --betas: '" + item + "'");
            }
        }
        return betas;
    }
    if (count < 1) throw input_error("--count must be >= 1");
    if (count == 1) return {bmin};
    for (int i = 0; i < count; ++i)
        betas.push_back(bmin + (bmax - bmin) * i / (count - 1));
    return betas;
}

int run(int argc, char** argv) {
    CLI::App app{"Robin/Neumann p-Laplacian eigenvalue and torsion toolkit"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--out", g.out, "output file (default: stdout)");
    app.add_option("--tol-rel", g.tol_rel, "relative tolerance for certificates");
    app.add_option("--tol-abs", g.tol_abs, "absolute tolerance for certificates");
    app.add_option("--seed", g.seed, "RNG seed recorded in outputs");
    app.add_option("--threads", g.threads, "worker threads for sweeps");

    double p = 2.0, beta = 1.0, r1 = 1.0, r2 = 2.0, h = 0.05;
    int n = 2, steps = 4096, levels = 33;
    std::string domain_path, mode_str = "eigen", profile_csv, levels_csv, inspect_path;
    std::string beta_list;
    double beta_min = 0.25, beta_max = 4.0;
    int beta_count = 16;

    auto add_params = [&](CLI::App* cmd, bool with_n) {
        cmd->add_option("--p", p, "exponent p in (1, inf)")->capture_default_str();
        if (with_n) cmd->add_option("--n", n, "space dimension >= 2")->capture_default_str();
        cmd->add_option("--beta", beta, "Robin boundary parameter (nonzero)")
            ->capture_default_str();
    };
    auto add_annulus = [&](CLI::App* cmd) {
        cmd->add_option("--r1", r1, "inner radius >= 0")->capture_default_str();
        cmd->add_option("--r2", r2, "outer radius > r1")->capture_default_str();
        cmd->add_option("--steps", steps, "radial integration steps")->capture_default_str();
    };
    auto add_domain = [&](CLI::App* cmd) {
        cmd->add_option("--domain", domain_path, "domain file (polygon/hole blocks)")
            ->required();
        cmd->add_option("--h", h, "target mesh size")->capture_default_str();
    };

    auto* eig_annulus = app.add_subcommand("eig-annulus", "first eigenvalue on an annulus");
    add_params(eig_annulus, true);
    add_annulus(eig_annulus);
    eig_annulus->add_option("--profile-csv", profile_csv, "write the radial profile as CSV");

    auto* tor_annulus = app.add_subcommand("torsion-annulus", "torsional rigidity on an annulus");
    add_params(tor_annulus, true);
    add_annulus(tor_annulus);
    tor_annulus->add_option("--profile-csv", profile_csv, "write the radial profile as CSV");

    auto* eig_domain = app.add_subcommand("eig-domain", "first eigenvalue on a meshed domain");
    add_params(eig_domain, false);
    add_domain(eig_domain);
    eig_domain->add_option("--field-csv", profile_csv, "write the nodal field as CSV");

    auto* tor_domain = app.add_subcommand("torsion-domain", "torsion field on a meshed domain");
    add_params(tor_domain, false);
    add_domain(tor_domain);
    tor_domain->add_option("--field-csv", profile_csv, "write the nodal field as CSV");

    auto* verify_cmd = app.add_subcommand("verify", "annulus-comparison certificates");
    add_params(verify_cmd, false);
    add_domain(verify_cmd);
    verify_cmd->add_option("--mode", mode_str, "eigen | torsion | both")->capture_default_str();
    verify_cmd->add_option("--levels", levels, "rho-grid size for the level table")
        ->capture_default_str();
    verify_cmd->add_option("--levels-csv", levels_csv, "write the per-level table as CSV");
    verify_cmd->add_option("--steps", steps, "radial integration steps")->capture_default_str();

    auto* sweep_cmd = app.add_subcommand("sweep", "beta sweep with monotonicity flags");
    add_params(sweep_cmd, true);
    sweep_cmd->add_option("--r1", r1, "inner radius")->capture_default_str();
    sweep_cmd->add_option("--r2", r2, "outer radius")->capture_default_str();
    sweep_cmd->add_option("--steps", steps, "radial steps")->capture_default_str();
    sweep_cmd->add_option("--domain", domain_path, "sweep on a domain file instead");
    sweep_cmd->add_option("--h", h, "mesh size for domain sweeps")->capture_default_str();
    sweep_cmd->add_option("--mode", mode_str, "eigen | torsion")->capture_default_str();
    sweep_cmd->add_option("--betas", beta_list, "comma-separated beta grid");
    sweep_cmd->add_option("--beta-min", beta_min, "grid start")->capture_default_str();
    sweep_cmd->add_option("--beta-max", beta_max, "grid end")->capture_default_str();
    sweep_cmd->add_option("--count", beta_count, "grid size")->capture_default_str();
    sweep_cmd->add_option("--csv", levels_csv, "also write the sweep as CSV");

    auto* geom_cmd = app.add_subcommand("geometry", "quermass/parallel-body report");
    geom_cmd->add_option("--domain", domain_path, "domain file")->required();
    double rho = -1.0, t_inner = -1.0;
    geom_cmd->add_option("--rho", rho, "outer parallel distance");
    geom_cmd->add_option("--t", t_inner, "inner parallel distance");

    auto* mesh_cmd = app.add_subcommand("mesh", "generate or inspect a mesh");
    mesh_cmd->add_option("--domain", domain_path, "domain file to mesh");
    mesh_cmd->add_option("--h", h, "target mesh size")->capture_default_str();
    mesh_cmd->add_option("--inspect", inspect_path, "mesh file to inspect instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 3;
    }

    auto mode_of = [&](const std::string& s) {
        if (s == "eigen") return verify::Mode::Eigen;
        if (s == "torsion") return verify::Mode::Torsion;
        throw input_error("unknown mode '" + s + "' (expected eigen or torsion)");
    };

    if (*eig_annulus) {
        const auto params = radial::ProblemParams::make(p, n, beta);
        const auto annulus = geo::AnnulusSpec::make(n, r1, r2);
        const auto eig = radial::first_eigenvalue(params, annulus, steps);
        const auto fn = radial::rayleigh(params, annulus, eig);
        ordered_json j;
        j["config"] = config_echo(g, {{"command", "eig-annulus"},
                                      {"p", p},
                                      {"n", n},
                                      {"beta", beta},
                                      {"r1", r1},
                                      {"r2", r2},
                                      {"steps", steps}});
        j["lambda"] = eig.lambda.value();
        j["rayleigh_j0"] = fn.j0;
        j["rayleigh_consistency"] = std::abs(fn.j0 - eig.lambda.value());
        j["constant_test_bound"] = radial::constant_test_bound(params, annulus);
        if (p == 2.0 && beta > 0.0) {
            const auto agree = p2::cross_check_eigenvalue(n, beta, annulus, steps);
            j["bessel"] = {{"lambda", agree.lambda_bessel},
                           {"rel_diff", agree.rel_diff},
                           {"alarm", agree.alarm},
                           {"remark_form_lambda", agree.lambda_remark},
                           {"remark_form_rel_diff", agree.remark_rel_diff},
                           {"remark_form_alarm", agree.remark_alarm}};
            if (agree.alarm)
                std::cerr << "warning: shooting and Bessel backends disagree by "
                          << format_double(agree.rel_diff) << " relative\n";
        }
        if (!profile_csv.empty()) {
            std::ofstream f(profile_csv);
            radial::write_profile_csv(f, eig);
        }
        emit(g, j.dump(2) + "\n");
        return 0;
    }

    if (*tor_annulus) {
        const auto params = radial::ProblemParams::make(p, n, beta);
        const auto annulus = geo::AnnulusSpec::make(n, r1, r2);
        const auto tors = radial::torsion(params, annulus, steps);
        ordered_json j;
        j["config"] = config_echo(g, {{"command", "torsion-annulus"},
                                      {"p", p},
                                      {"n", n},
                                      {"beta", beta},
                                      {"r1", r1},
                                      {"r2", r2},
                                      {"steps", steps}});
        j["torsion"] = tors.torsion;
        j["energy_identity_residual"] = tors.energy_identity_residual;
        if (p == 2.0) {
            const auto closed = p2::torsion_profile(n, beta, annulus, steps);
            j["closed_form"] = {{"torsion", closed.torsion_closed},
                                {"max_pointwise_diff", closed.max_pointwise_diff},
                                {"neumann_residual", closed.neumann_residual},
                                {"robin_residual", closed.robin_residual}};
        }
        if (!profile_csv.empty()) {
            std::ofstream f(profile_csv);
            radial::write_profile_csv(f, tors.profile);
        }
        emit(g, j.dump(2) + "\n");
        return 0;
    }

    if (*eig_domain || *tor_domain) {
        const bool eig = static_cast<bool>(*eig_domain);
        const auto params = radial::ProblemParams::make(p, 2, beta);
        const auto dom = geo::read_domain_file(domain_path);
        const auto mesh = fem::generate_mesh(dom, h);
        const fem::FemField field =
            eig ? fem::eigen_fem(params, mesh) : fem::torsion_fem(params, mesh);
        ordered_json j;
        j["config"] = config_echo(g, {{"command", eig ? "eig-domain" : "torsion-domain"},
                                      {"p", p},
                                      {"beta", beta},
                                      {"domain", domain_path},
                                      {"h", h}});
        j[eig ? "lambda" : "torsion"] = field.value;
        j["iterations"] = field.iterations;
        j["mesh_nodes"] = mesh.nodes.size();
        j["mesh_triangles"] = mesh.triangles.size();
        j["mesh_min_angle_deg"] = mesh.min_angle_deg();
        if (!eig) j["energy_identity_residual"] = field.energy_identity_residual;
        if (!profile_csv.empty()) {
            std::ofstream f(profile_csv);
            fem::write_field_csv(f, mesh, field);
        }
        emit(g, j.dump(2) + "\n");
        return 0;
    }

    if (*verify_cmd) {
        const auto params = radial::ProblemParams::make(p, 2, beta);
        const auto dom = geo::read_domain_file(domain_path);
        verify::VerifyOptions opts;
        opts.levels = levels;
        opts.radial_steps = steps;
        opts.tol.rel = g.tol_rel;
        opts.tol.abs = g.tol_abs;
        const bool both = mode_str == "both";
        std::string out_text;
        bool any_fail = false, any_incomplete = false;
        std::vector<verify::VerificationReport> reports;
        if (both || mode_of(mode_str) == verify::Mode::Eigen)
            reports.push_back(verify::check_theorem_1(dom, params, h, opts));
        if ((both && beta > 0.0) ||
            (!both && mode_of(mode_str) == verify::Mode::Torsion))
            reports.push_back(verify::check_theorem_2(dom, params, h, opts));
        for (auto& rep : reports) {
            out_text += verify::report_json(rep);
            any_fail = any_fail || (!rep.incomplete && !rep.all_pass);
            any_incomplete = any_incomplete || rep.incomplete;
        }
        if (!levels_csv.empty() && !reports.empty()) {
            std::ofstream f(levels_csv);
            verify::write_levels_csv(f, reports.front());
        }
        emit(g, out_text);
        if (any_incomplete) return 2;
        return any_fail ? 1 : 0;
    }

    if (*sweep_cmd) {
        const auto mode = mode_of(mode_str);
        const std::vector<double> betas = parse_beta_grid(beta_list, beta_min, beta_max,
                                                          beta_count);
        verify::SweepResult sr;
        if (!domain_path.empty()) {
            const auto dom = geo::read_domain_file(domain_path);
            sr = verify::beta_sweep_domain(p, betas, dom, h, mode, {}, 1e-6, g.threads);
        } else {
            const auto annulus = geo::AnnulusSpec::make(n, r1, r2);
            sr = verify::beta_sweep_annulus(p, n, betas, annulus, mode, steps, 1e-8,
                                            g.threads);
        }
        ordered_json j;
        j["config"] = config_echo(g, {{"command", "sweep"},
                                      {"p", p},
                                      {"n", n},
                                      {"mode", mode_str},
                                      {"domain", domain_path},
                                      {"betas", betas}});
        j["result"] = nlohmann::ordered_json::parse(verify::sweep_json(sr));
        if (!levels_csv.empty()) {
            std::ofstream f(levels_csv);
            verify::write_sweep_csv(f, sr);
        }
        emit(g, j.dump(2) + "\n");
        return (sr.monotone_ok && sr.concave_ok && sr.sign_ok) ? 0 : 1;
    }

    if (*geom_cmd) {
        const auto dom = geo::read_domain_file(domain_path);
        const auto q = geo::quermass(dom.outer);
        ordered_json j;
        j["config"] = config_echo(g, {{"command", "geometry"}, {"domain", domain_path}});
        j["quermass"] = {{"W", q.w}, {"volume", q.volume()}, {"perimeter", q.perimeter()}};
        j["af_chain_margins"] = geo::af_chain_margins(q);
        j["w2_margin"] = geo::w2_margin(q);
        j["area_with_holes"] = dom.area();
        j["inradius"] = geo::inradius(dom.outer);
        const auto matched = geo::matched_annulus(dom.area(), dom.outer_perimeter(), 2);
        j["matched_annulus"] = {{"r1", matched.r1}, {"r2", matched.r2}};
        if (rho >= 0.0) {
            const auto pb = geo::outer_parallel(dom.outer, rho);
            j["outer_parallel"] = {{"rho", rho},
                                   {"volume", pb.volume},
                                   {"perimeter", pb.perimeter}};
        }
        if (t_inner >= 0.0) {
            const auto ip = geo::inner_parallel(dom.outer, t_inner);
            if (ip)
                j["inner_parallel"] = {{"t", t_inner},
                                       {"area", ip->area()},
                                       {"perimeter", ip->perimeter()},
                                       {"vertices", ip->vertices().size()}};
            else
                j["inner_parallel"] = {{"t", t_inner}, {"empty", true}};
        }
        emit(g, j.dump(2) + "\n");
        return 0;
    }

    if (*mesh_cmd) {
        fem::Mesh mesh;
        ordered_json j;
        if (!inspect_path.empty()) {
            mesh = fem::read_mesh_file(inspect_path);
            j["config"] = config_echo(g, {{"command", "mesh"}, {"inspect", inspect_path}});
        } else {
            if (domain_path.empty())
                throw input_error("mesh: need --domain to generate or --inspect to inspect");
            const auto dom = geo::read_domain_file(domain_path);
            mesh = fem::generate_mesh(dom, h);
            j["config"] =
                config_echo(g, {{"command", "mesh"}, {"domain", domain_path}, {"h", h}});
            if (!g.out.empty()) {
                fem::write_mesh_file(g.out, mesh);
                g.out.clear(); // stats go to stdout
            }
        }
        j["nodes"] = mesh.nodes.size();
        j["triangles"] = mesh.triangles.size();
        j["boundary_edges"] = mesh.boundary_edges.size();
        j["total_area"] = mesh.total_area();
        j["min_angle_deg"] = mesh.min_angle_deg();
        j["euler_characteristic"] = mesh.euler_characteristic();
        j["outer_loops"] = mesh.loop_count(fem::kTagOuter);
        j["hole_loops"] = mesh.loop_count(fem::kTagHole);
        emit(g, j.dump(2) + "\n");
        return 0;
    }

    return 3;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const solver_error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
