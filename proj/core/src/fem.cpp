#include "plrn/fem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace plrn::fem {

namespace {

using geo::Point;
using geo::cross;
using geo::norm;
using radial::ProblemParams;

struct Cache {
    const Mesh* mesh{};
    std::vector<double> area;
    std::vector<std::array<Point, 3>> grad; // gradients of the barycentric hats
    std::vector<int> outer_edges;           // indices into boundary_edges
    double diameter{};

    explicit Cache(const Mesh& m) : mesh(&m) {
        const auto& tris = m.triangles;
        area.resize(tris.size());
        grad.resize(tris.size());
        for (size_t t = 0; t < tris.size(); ++t) {
            const Point& a = m.nodes[tris[t][0]];
            const Point& b = m.nodes[tris[t][1]];
            const Point& c = m.nodes[tris[t][2]];
            const double two_a = cross(b - a, c - a);
            if (two_a <= 0.0) throw input_error("fem: mesh has a non-CCW or degenerate triangle");
            area[t] = 0.5 * two_a;
            grad[t][0] = Point{(b.y - c.y) / two_a, (c.x - b.x) / two_a};
            grad[t][1] = Point{(c.y - a.y) / two_a, (a.x - c.x) / two_a};
            grad[t][2] = Point{(a.y - b.y) / two_a, (b.x - a.x) / two_a};
        }
        for (size_t e = 0; e < m.boundary_edges.size(); ++e)
            if (m.boundary_edges[e].tag == kTagOuter) outer_edges.push_back(static_cast<int>(e));
        Point lo{1e308, 1e308}, hi{-1e308, -1e308};
        for (const Point& p : m.nodes) {
            lo.x = std::min(lo.x, p.x);
            lo.y = std::min(lo.y, p.y);
            hi.x = std::max(hi.x, p.x);
            hi.y = std::max(hi.y, p.y);
        }
        diameter = norm(hi - lo);
    }

    Point du(size_t t, std::span<const double> u) const {
        const auto& tr = mesh->triangles[t];
        Point g{0, 0};
        for (int i = 0; i < 3; ++i) g = g + u[tr[i]] * grad[t][i];
        return g;
    }
};

constexpr double kGauss2 = 0.57735026918962576451; // 1/sqrt(3)

// Weighted P1 operators. weight_grad is applied per triangle, weight_bnd per
// boundary Gauss point, weight_mass per midpoint.
SparseMatrix assemble_stiffness(const Cache& c, std::span<const double> wtri) {
    const Mesh& m = *c.mesh;
    std::vector<Triplet> ts;
    ts.reserve(m.triangles.size() * 9);
    for (size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tr = m.triangles[t];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                ts.push_back({tr[i], tr[j],
                              wtri[t] * c.area[t] *
                                  (c.grad[t][i].x * c.grad[t][j].x +
                                   c.grad[t][i].y * c.grad[t][j].y)});
    }
    return SparseMatrix::from_triplets(static_cast<int>(m.nodes.size()), std::move(ts));
}

SparseMatrix assemble_boundary(const Cache& c, std::span<const double> u, double p, double eps) {
    const Mesh& m = *c.mesh;
    std::vector<Triplet> ts;
    for (int ei : c.outer_edges) {
        const auto& e = m.boundary_edges[ei];
        const double len = norm(m.nodes[e.b] - m.nodes[e.a]);
        for (int g = 0; g < 2; ++g) {
            const double s = 0.5 + (g == 0 ? -0.5 : 0.5) * kGauss2; // in [0,1]
            const double ug = (1.0 - s) * u[e.a] + s * u[e.b];
            const double w = std::pow(ug * ug + eps * eps, 0.5 * (p - 2.0)) * 0.5 * len;
            const double phi[2] = {1.0 - s, s};
            const int idx[2] = {e.a, e.b};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) ts.push_back({idx[i], idx[j], w * phi[i] * phi[j]});
        }
    }
    return SparseMatrix::from_triplets(static_cast<int>(m.nodes.size()), std::move(ts));
}

SparseMatrix assemble_pmass(const Cache& c, std::span<const double> u, double p, double eps) {
    const Mesh& m = *c.mesh;
    std::vector<Triplet> ts;
    ts.reserve(m.triangles.size() * 12);
    for (size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tr = m.triangles[t];
        for (int mpt = 0; mpt < 3; ++mpt) {
            // midpoint of edge (mpt, mpt+1): hats are (1/2, 1/2, 0)
            const double um = 0.5 * (u[tr[mpt]] + u[tr[(mpt + 1) % 3]]);
            const double w = std::pow(um * um + eps * eps, 0.5 * (p - 2.0)) * c.area[t] / 3.0;
            const int idx[2] = {tr[mpt], tr[(mpt + 1) % 3]};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) ts.push_back({idx[i], idx[j], w * 0.25});
        }
    }
    return SparseMatrix::from_triplets(static_cast<int>(m.nodes.size()), std::move(ts));
}

std::vector<double> grad_weights(const Cache& c, std::span<const double> u, double p, double eps) {
    std::vector<double> w(c.area.size());
    for (size_t t = 0; t < c.area.size(); ++t) {
        const Point g = c.du(t, u);
        w[t] = std::pow(g.x * g.x + g.y * g.y + eps * eps, 0.5 * (p - 2.0));
    }
    return w;
}

double p_norm(const ProblemParams& params, const Mesh& mesh, const Cache& c,
              std::span<const double> u) {
    double s = 0.0;
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        for (int mpt = 0; mpt < 3; ++mpt) {
            const double um = 0.5 * (u[tr[mpt]] + u[tr[(mpt + 1) % 3]]);
            s += std::pow(std::abs(um), params.p) * c.area[t] / 3.0;
        }
    }
    return std::pow(s, 1.0 / params.p);
}

void normalize_field(const ProblemParams& params, const Mesh& mesh, const Cache& c,
                     std::vector<double>& u) {
    double mean = 0.0;
    for (double v : u) mean += v;
    if (mean < 0.0)
        for (double& v : u) v = -v;
    const double nrm = p_norm(params, mesh, c, u);
    if (!(nrm > 0.0)) throw solver_error("fem: iterate collapsed to zero");
    for (double& v : u) v /= nrm;
}

FieldFunctionals functionals_impl(const ProblemParams& params, const Mesh& mesh, const Cache& c,
                                  std::span<const double> u) {
    FieldFunctionals f;
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const Point g = c.du(t, u);
        f.grad_energy += std::pow(g.x * g.x + g.y * g.y, 0.5 * params.p) * c.area[t];
        const auto& tr = mesh.triangles[t];
        double mt = 0.0;
        for (int mpt = 0; mpt < 3; ++mpt) {
            const double um = 0.5 * (u[tr[mpt]] + u[tr[(mpt + 1) % 3]]);
            f.p_mass += std::pow(std::abs(um), params.p) * c.area[t] / 3.0;
            mt += um;
        }
        f.mass += mt * c.area[t] / 3.0;
    }
    for (int ei : c.outer_edges) {
        const auto& e = mesh.boundary_edges[ei];
        const double len = norm(mesh.nodes[e.b] - mesh.nodes[e.a]);
        for (int g = 0; g < 2; ++g) {
            const double s = 0.5 + (g == 0 ? -0.5 : 0.5) * kGauss2;
            const double ug = (1.0 - s) * u[e.a] + s * u[e.b];
            f.boundary_term += std::pow(std::abs(ug), params.p) * 0.5 * len;
        }
    }
    f.boundary_term *= params.beta;
    const double num = f.grad_energy + f.boundary_term;
    f.j0 = num / f.p_mass;
    f.k0 = num / std::pow(std::abs(f.mass), params.p);
    return f;
}

std::vector<double> load_vector(const Mesh& mesh, const Cache& c) {
    std::vector<double> f(mesh.nodes.size(), 0.0);
    for (size_t t = 0; t < mesh.triangles.size(); ++t)
        for (int i = 0; i < 3; ++i) f[mesh.triangles[t][i]] += c.area[t] / 3.0;
    return f;
}

void axpy_solve(const SparseMatrix& a, const std::vector<double>& rhs, std::vector<double>& x,
                double tol, const char* what) {
    SolveReport rep = solve_spd(a, rhs, x, tol);
    if (rep.indefinite)
        throw solver_error(std::string(what) + ": linear operator is not positive definite");
    if (!rep.converged)
        throw solver_error(std::string(what) + ": PCG stalled at relative residual " +
                           format_double(rep.rel_residual) + " after " +
                           std::to_string(rep.iterations) + " iterations");
}

// Largest eigenvalue estimate of the (B, lumped M) pencil by power iteration;
// used to pick a safely negative shift for beta < 0.
double boundary_trace_bound(const Cache& c, const SparseMatrix& b, const SparseMatrix& mass) {
    const int n = b.n;
    std::vector<double> lump(n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int k = mass.row_ptr[r]; k < mass.row_ptr[r + 1]; ++k) lump[r] += mass.val[k];
    std::vector<double> v(n, 0.0), w(n);
    for (int ei : c.outer_edges) {
        v[c.mesh->boundary_edges[ei].a] = 1.0;
        v[c.mesh->boundary_edges[ei].b] = 1.0;
    }
    double mu = 0.0;
    for (int it = 0; it < 60; ++it) {
        b.multiply(v, w);
        double vb = 0.0, vm = 0.0;
        for (int i = 0; i < n; ++i) {
            vb += v[i] * w[i];
            vm += v[i] * v[i] * lump[i];
        }
        if (vm == 0.0) break;
        mu = vb / vm;
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) {
            v[i] = w[i] / lump[i];
            nrm += v[i] * v[i];
        }
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) break;
        for (double& x : v) x /= nrm;
    }
    return mu;
}

FemField eigen_p2(const ProblemParams& params, const Mesh& mesh, const Cache& c,
                  const FemOptions& opts) {
    const int n = static_cast<int>(mesh.nodes.size());
    std::vector<double> ones(c.area.size(), 1.0);
    const SparseMatrix K = assemble_stiffness(c, ones);
    const SparseMatrix B = assemble_boundary(c, std::vector<double>(n, 0.0), 2.0, 0.0);
    const SparseMatrix M = assemble_pmass(c, std::vector<double>(n, 0.0), 2.0, 0.0);

    auto build_shifted = [&](double sigma) {
        std::vector<Triplet> ts;
        auto push = [&](const SparseMatrix& a, double w) {
            for (int r = 0; r < a.n; ++r)
                for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
                    ts.push_back({r, a.col[k], w * a.val[k]});
        };
        push(K, 1.0);
        push(B, params.beta);
        if (sigma != 0.0) push(M, -sigma);
        return SparseMatrix::from_triplets(n, std::move(ts));
    };

    double sigma = 0.0;
    if (params.beta < 0.0) {
        const double mu = boundary_trace_bound(c, B, M);
        sigma = 5.0 * params.beta * std::max(mu, 1e-12); // safely below the spectrum
    }
    SparseMatrix A = build_shifted(sigma);

    std::vector<double> u(n, 1.0), y(n), rhs(n);
    normalize_field(params, mesh, c, u);
    double lambda_prev = 0.0;
    int iterations = 0;
    double change = 0.0;
    bool reshifted = false;
    for (int it = 0; it < opts.max_iter; ++it) {
        M.multiply(u, rhs);
        SolveReport rep = solve_spd(A, rhs, y, opts.linear_tol);
        if (rep.indefinite) {
            sigma *= 4.0; // shift was not safe after all; report through the retry
            A = build_shifted(sigma);
            continue;
        }
        if (!rep.converged)
            throw solver_error("eigen_fem: inner PCG stalled at residual " +
                               format_double(rep.rel_residual));
        normalize_field(params, mesh, c, y);
        change = 0.0;
        for (int i = 0; i < n; ++i) change = std::max(change, std::abs(y[i] - u[i]));
        u = y;
        const double lambda = functionals_impl(params, mesh, c, u).j0;
        ++iterations;
        if (it > 0 && std::abs(lambda - lambda_prev) <= opts.value_tol * (1.0 + std::abs(lambda)) &&
            change <= opts.nodal_tol) {
            lambda_prev = lambda;
            break;
        }
        lambda_prev = lambda;
        // One safeguarded re-shift closes in on the eigenvalue for beta < 0
        // (a far shift makes inverse iteration crawl).
        if (params.beta < 0.0 && !reshifted && it == 4) {
            const double trial = lambda - 0.25 * (std::abs(lambda) + 1.0);
            if (trial > sigma) {
                sigma = trial;
                A = build_shifted(sigma);
                reshifted = true;
            }
        }
    }

    FemField out;
    out.u = std::move(u);
    out.params = params;
    out.mode = FieldMode::Eigen;
    out.value = lambda_prev;
    out.iterations = iterations;
    out.change = change;
    out.epsilon = 0.0;
    return out;
}

FemField eigen_picard(const ProblemParams& params, const Mesh& mesh, const Cache& c,
                      const FemOptions& opts) {
    const int n = static_cast<int>(mesh.nodes.size());
    const double eps = opts.epsilon_scale * c.diameter;
    std::vector<double> u(n, 1.0);
    normalize_field(params, mesh, c, u);
    double lambda_prev = functionals_impl(params, mesh, c, u).j0;
    int iterations = 0;
    double change = 0.0;
    for (int it = 0; it < opts.max_iter; ++it) {
        const std::vector<double> wtri = grad_weights(c, u, params.p, eps);
        const SparseMatrix A = assemble_stiffness(c, wtri);
        const SparseMatrix B = assemble_boundary(c, u, params.p, eps);
        const SparseMatrix Mk = assemble_pmass(c, u, params.p, eps);
        std::vector<Triplet> ts;
        for (int r = 0; r < n; ++r) {
            for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
                ts.push_back({r, A.col[k], A.val[k]});
            for (int k = B.row_ptr[r]; k < B.row_ptr[r + 1]; ++k)
                ts.push_back({r, B.col[k], params.beta * B.val[k]});
        }
        const SparseMatrix Ab = SparseMatrix::from_triplets(n, std::move(ts));
        std::vector<double> rhs(n);
        Mk.multiply(u, rhs);
        std::vector<double> z = u;
        axpy_solve(Ab, rhs, z, opts.linear_tol, "eigen_fem");
        normalize_field(params, mesh, c, z);
        std::vector<double> next(n);
        for (int i = 0; i < n; ++i) next[i] = u[i] + opts.damping * (z[i] - u[i]);
        normalize_field(params, mesh, c, next);
        change = 0.0;
        for (int i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - u[i]));
        u = std::move(next);
        const double lambda = functionals_impl(params, mesh, c, u).j0;
        ++iterations;
        if (std::abs(lambda - lambda_prev) <= opts.value_tol * (1.0 + std::abs(lambda)) &&
            change <= opts.nodal_tol) {
            lambda_prev = lambda;
            break;
        }
        lambda_prev = lambda;
        if (it + 1 == opts.max_iter)
            throw solver_error("eigen_fem: fixed-point iteration did not converge in " +
                               std::to_string(opts.max_iter) + " iterations (last change " +
                               format_double(change) + ", lambda " + format_double(lambda) + ")");
    }
    FemField out;
    out.u = std::move(u);
    out.params = params;
    out.mode = FieldMode::Eigen;
    out.value = lambda_prev;
    out.iterations = iterations;
    out.change = change;
    out.epsilon = eps;
    return out;
}

// beta < 0, p != 2: the linearized operator is indefinite, so minimize the
// quotient directly by H1-preconditioned projected gradient with Armijo.
FemField eigen_descent(const ProblemParams& params, const Mesh& mesh, const Cache& c,
                       const FemOptions& opts) {
    const int n = static_cast<int>(mesh.nodes.size());
    const double eps = opts.epsilon_scale * c.diameter;
    std::vector<double> ones(c.area.size(), 1.0);
    const SparseMatrix K = assemble_stiffness(c, ones);
    const SparseMatrix M = assemble_pmass(c, std::vector<double>(n, 0.0), 2.0, 0.0);
    std::vector<Triplet> hs;
    for (int r = 0; r < n; ++r) {
        for (int k = K.row_ptr[r]; k < K.row_ptr[r + 1]; ++k)
            hs.push_back({r, K.col[k], K.val[k]});
        for (int k = M.row_ptr[r]; k < M.row_ptr[r + 1]; ++k)
            hs.push_back({r, M.col[k], M.val[k]});
    }
    const SparseMatrix H = SparseMatrix::from_triplets(n, std::move(hs));

    std::vector<double> u(n, 1.0);
    normalize_field(params, mesh, c, u);
    double j_prev = functionals_impl(params, mesh, c, u).j0;
    int iterations = 0;
    double change = 0.0;
    for (int it = 0; it < opts.max_iter; ++it) {
        // gradient of J at u (p-mass normalized to 1)
        const std::vector<double> wtri = grad_weights(c, u, params.p, eps);
        const SparseMatrix A = assemble_stiffness(c, wtri);
        const SparseMatrix B = assemble_boundary(c, u, params.p, eps);
        const SparseMatrix Mp = assemble_pmass(c, u, params.p, eps);
        std::vector<double> g(n, 0.0), t1(n), t2(n), t3(n);
        A.multiply(u, t1);
        B.multiply(u, t2);
        Mp.multiply(u, t3);
        const double j = functionals_impl(params, mesh, c, u).j0;
        for (int i = 0; i < n; ++i)
            g[i] = params.p * (t1[i] + params.beta * t2[i] - j * t3[i]);

        std::vector<double> d(n, 0.0);
        axpy_solve(H, g, d, 1e-10, "eigen_fem(descent)");
        double gd = 0.0;
        for (int i = 0; i < n; ++i) gd += g[i] * d[i];
        if (gd <= 0.0) break; // preconditioned gradient vanished

        double step = 1.0;
        std::vector<double> trial(n);
        double j_new = j;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (int i = 0; i < n; ++i) trial[i] = u[i] - step * d[i];
            normalize_field(params, mesh, c, trial);
            j_new = functionals_impl(params, mesh, c, trial).j0;
            if (j_new <= j - 1e-4 * step * gd) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // no descent left at machine scale
        change = 0.0;
        for (int i = 0; i < n; ++i) change = std::max(change, std::abs(trial[i] - u[i]));
        u = std::move(trial);
        ++iterations;
        if (std::abs(j_new - j_prev) <= opts.value_tol * (1.0 + std::abs(j_new)) &&
            change <= opts.nodal_tol) {
            j_prev = j_new;
            break;
        }
        j_prev = j_new;
    }
    FemField out;
    out.u = std::move(u);
    out.params = params;
    out.mode = FieldMode::Eigen;
    out.value = j_prev;
    out.iterations = iterations;
    out.change = change;
    out.epsilon = eps;
    return out;
}

} // namespace

FieldFunctionals field_functionals(const ProblemParams& params, const Mesh& mesh,
                                   std::span<const double> u) {
    const Cache c(mesh);
    return functionals_impl(params, mesh, c, u);
}

FemField eigen_fem(const ProblemParams& params, const Mesh& mesh, const FemOptions& opts) {
    const Cache c(mesh);
    if (c.outer_edges.empty()) throw input_error("eigen_fem: mesh has no outer boundary edges");
    FemField f;
    if (params.p == 2.0)
        f = eigen_p2(params, mesh, c, opts);
    else if (params.beta > 0.0)
        f = eigen_picard(params, mesh, c, opts);
    else
        f = eigen_descent(params, mesh, c, opts);
    // simplicity surrogate: the converged minimizer must be one-signed
    double mn = 1e308;
    for (double v : f.u) mn = std::min(mn, v);
    if (mn <= 0.0)
        throw solver_error("eigen_fem: converged eigenfunction is not positive (min " +
                           format_double(mn) + ")");
    return f;
}

FemField torsion_fem(const ProblemParams& params, const Mesh& mesh, const FemOptions& opts) {
    if (!(params.beta > 0.0)) throw input_error("torsion_fem: beta must be positive");
    const Cache c(mesh);
    if (c.outer_edges.empty()) throw input_error("torsion_fem: mesh has no outer boundary edges");
    const int n = static_cast<int>(mesh.nodes.size());
    const double eps = (params.p == 2.0) ? 0.0 : opts.epsilon_scale * c.diameter;
    const std::vector<double> f = load_vector(mesh, c);

    std::vector<double> u(n, 0.0);
    int iterations = 0;
    double change = 0.0;
    for (int it = 0; it < opts.max_iter; ++it) {
        const std::vector<double> wtri =
            (params.p == 2.0) ? std::vector<double>(c.area.size(), 1.0)
                              : grad_weights(c, u, params.p, eps);
        const SparseMatrix A = assemble_stiffness(c, wtri);
        const SparseMatrix B = (params.p == 2.0)
                                   ? assemble_boundary(c, std::vector<double>(n, 0.0), 2.0, 0.0)
                                   : assemble_boundary(c, u, params.p, eps);
        std::vector<Triplet> ts;
        for (int r = 0; r < n; ++r) {
            for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
                ts.push_back({r, A.col[k], A.val[k]});
            for (int k = B.row_ptr[r]; k < B.row_ptr[r + 1]; ++k)
                ts.push_back({r, B.col[k], params.beta * B.val[k]});
        }
        const SparseMatrix Ab = SparseMatrix::from_triplets(n, std::move(ts));
        std::vector<double> z = u;
        axpy_solve(Ab, f, z, opts.linear_tol, "torsion_fem");
        if (params.p == 2.0) {
            u = std::move(z);
            iterations = 1;
            break;
        }
        std::vector<double> next(n);
        change = 0.0;
        for (int i = 0; i < n; ++i) {
            next[i] = u[i] + opts.damping * (z[i] - u[i]);
            change = std::max(change, std::abs(next[i] - u[i]));
        }
        u = std::move(next);
        ++iterations;
        double scale = 0.0;
        for (double v : u) scale = std::max(scale, std::abs(v));
        if (change <= opts.nodal_tol * (1.0 + scale)) break;
        if (it + 1 == opts.max_iter)
            throw solver_error("torsion_fem: fixed-point iteration did not converge in " +
                               std::to_string(opts.max_iter) + " iterations (last change " +
                               format_double(change) + ")");
    }

    FemField out;
    out.params = params;
    out.mode = FieldMode::Torsion;
    out.iterations = iterations;
    out.change = change;
    out.epsilon = eps;
    const FieldFunctionals fn = functionals_impl(params, mesh, c, u);
    out.value = std::pow(fn.mass, params.p - 1.0);
    out.energy_identity_residual =
        (fn.grad_energy + fn.boundary_term - fn.mass) / std::max(std::abs(fn.mass), 1e-300);
    out.u = std::move(u);
    return out;
}

double eigen_dirichlet_p2(const Mesh& mesh, const FemOptions& opts) {
    const Cache c(mesh);
    const int n = static_cast<int>(mesh.nodes.size());
    std::vector<bool> on_outer(n, false);
    for (int ei : c.outer_edges) {
        on_outer[mesh.boundary_edges[ei].a] = true;
        on_outer[mesh.boundary_edges[ei].b] = true;
    }
    std::vector<int> idx(n, -1);
    int m = 0;
    for (int i = 0; i < n; ++i)
        if (!on_outer[i]) idx[i] = m++;
    if (m == 0) throw input_error("eigen_dirichlet_p2: no free nodes");

    std::vector<double> ones(c.area.size(), 1.0);
    const SparseMatrix K = assemble_stiffness(c, ones);
    const SparseMatrix M = assemble_pmass(c, std::vector<double>(n, 0.0), 2.0, 0.0);
    auto restrict = [&](const SparseMatrix& a) {
        std::vector<Triplet> ts;
        for (int r = 0; r < n; ++r) {
            if (idx[r] < 0) continue;
            for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
                if (idx[a.col[k]] >= 0) ts.push_back({idx[r], idx[a.col[k]], a.val[k]});
        }
        return SparseMatrix::from_triplets(m, std::move(ts));
    };
    const SparseMatrix Kd = restrict(K);
    const SparseMatrix Md = restrict(M);

    std::vector<double> u(m, 1.0), y(m), rhs(m);
    double lambda = 0.0, lambda_prev = 0.0;
    for (int it = 0; it < opts.max_iter; ++it) {
        Md.multiply(u, rhs);
        axpy_solve(Kd, rhs, y, opts.linear_tol, "eigen_dirichlet_p2");
        double ym = 0.0;
        Md.multiply(y, rhs);
        for (int i = 0; i < m; ++i) ym += y[i] * rhs[i];
        const double nrm = std::sqrt(ym);
        for (int i = 0; i < m; ++i) y[i] /= nrm;
        std::vector<double> ky(m);
        Kd.multiply(y, ky);
        double num = 0.0;
        for (int i = 0; i < m; ++i) num += y[i] * ky[i];
        lambda = num; // y is M-normalized
        u = y;
        if (it > 3 && std::abs(lambda - lambda_prev) <= opts.value_tol * (1.0 + lambda)) break;
        lambda_prev = lambda;
    }
    return lambda;
}

void write_field_csv(std::ostream& out, const Mesh& mesh, const FemField& field) {
    out << "node,x,y,u\n";
    for (size_t i = 0; i < mesh.nodes.size(); ++i)
        out << i << "," << format_double(mesh.nodes[i].x) << "," << format_double(mesh.nodes[i].y)
            << "," << format_double(field.u[i]) << "\n";
}

std::string field_metadata_json(const FemField& field, const Mesh& mesh) {
    std::ostringstream os;
    os << "{\"p\":" << format_double(field.params.p)
       << ",\"beta\":" << format_double(field.params.beta) << ",\"mode\":\""
       << (field.mode == FieldMode::Eigen ? "eigen" : "torsion") << "\""
       << ",\"value\":" << format_double(field.value) << ",\"iterations\":" << field.iterations
       << ",\"change\":" << format_double(field.change)
       << ",\"epsilon\":" << format_double(field.epsilon) << ",\"nodes\":" << mesh.nodes.size()
       << ",\"triangles\":" << mesh.triangles.size() << "}";
    return os.str();
}

} // namespace plrn::fem
