#pragma once

#include <optional>
#include <string>

#include "plrn/analytic_p2.hpp"
#include "plrn/web.hpp"

namespace plrn::verify {

struct Tolerances {
    double rel = 1e-3;
    double abs = 1e-8;
};

struct VerifyOptions {
    int levels = 33;           // rho-grid resolution for the per-level table
    int radial_steps = 4096;
    Tolerances tol;
    fem::FemOptions fem;
    fem::MeshOptions mesh;
};

struct LevelRow {
    double t{};           // level value
    double rho{};         // psi^{-1}(t)
    double s{};           // r2 - rho: inner-parallel depth
    double live_length{}; // H^1 of the level curve inside Omega
    double perim_body{};  // P(inner parallel body)
    double perim_annulus{}; // 2 pi rho
    double mu{};          // measure of the domain-side level set
    double eta{};         // annulus counterpart
};

struct Check {
    std::string name;
    double lhs{};
    double rhs{};
    double margin{}; // rhs - lhs (after tolerance), >= 0 when the check holds
    bool pass{};
};

struct VerificationReport {
    // configuration echo
    radial::ProblemParams params;
    Mode mode{Mode::Eigen};
    double h{};
    Tolerances tol;
    int radial_steps{};
    // geometry
    double domain_area{};
    double outer_perimeter{};
    double domain_inradius{};
    geo::AnnulusSpec annulus{2, 0.0, 1.0};
    // backend values
    double value_fem{};             // lambda or T
    double value_fem_coarse{};      // same at 2h, for the error estimate
    double value_annulus{};         // radial backend: lambda or T
    std::optional<double> value_annulus_bessel; // p = 2, beta > 0 cross-check
    double fem_error_estimate{};    // Richardson |v_h - v_2h| / 3
    double tol_chain{};             // 5 x fem_error_estimate
    WebFunctionals web;
    // results
    std::vector<Check> checks;
    std::vector<LevelRow> levels;
    bool all_pass{false};
    bool incomplete{false};
    std::string failure;
    // solver info
    int fem_iterations{};
    std::size_t mesh_nodes{};
    std::size_t mesh_triangles{};
};

// Eigenvalue comparison certificate: lambda_fem(Omega) <= J0[web] + tol_chain
// and J0[web] <= lambda(A) (+tolerances), with the per-level perimeter and
// measure comparisons recorded on a rho-grid.
VerificationReport check_theorem_1(const geo::DomainWithHoles& dom,
                                   const radial::ProblemParams& params, double h,
                                   const VerifyOptions& opts = {});

// Torsion comparison certificate (beta > 0): T_fem(Omega) >= T(A) (-tol),
// web mass >= annulus mass, K0[web] >= 1/T_fem (-tol).
VerificationReport check_theorem_2(const geo::DomainWithHoles& dom,
                                   const radial::ProblemParams& params, double h,
                                   const VerifyOptions& opts = {});

std::string report_json(const VerificationReport& report);
void write_levels_csv(std::ostream& out, const VerificationReport& report);

struct SweepPoint {
    double beta{};
    double value{}; // lambda (eigen) or 1/T (torsion)
};

struct SweepResult {
    Mode mode{Mode::Eigen};
    std::vector<SweepPoint> points;
    bool monotone_ok{true};   // eigen: non-decreasing; torsion: 1/T non-increasing
    bool concave_ok{true};
    bool sign_ok{true};       // eigen: sign(lambda) = sign(beta); torsion: 1/T > 0
    double max_second_diff{}; // largest second divided difference (concavity defect)
    double lipschitz_estimate{};
    double second_diff_tol{};
};

// beta-sweep on an annulus via the radial backend. The grid must be sorted,
// same-signed, and must not contain zero.
SweepResult beta_sweep_annulus(double p, int n, const std::vector<double>& betas,
                               const geo::AnnulusSpec& annulus, Mode mode,
                               int steps = 4096, double second_diff_tol = 1e-8,
                               int threads = 1);

// Same sweep on a meshed domain via the FEM backend.
SweepResult beta_sweep_domain(double p, const std::vector<double>& betas,
                              const geo::DomainWithHoles& dom, double h, Mode mode,
                              const VerifyOptions& opts = {}, double second_diff_tol = 1e-6,
                              int threads = 1);

std::string sweep_json(const SweepResult& sweep);
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

} // namespace plrn::verify
