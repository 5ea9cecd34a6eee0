#include "plrn/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace plrn::fem {

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> ts) {
    std::sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
        return a.r != b.r ? a.r < b.r : a.c < b.c;
    });
    SparseMatrix m;
    m.n = n;
    m.row_ptr.assign(n + 1, 0);
    m.col.reserve(ts.size());
    m.val.reserve(ts.size());
    for (size_t i = 0; i < ts.size();) {
        size_t j = i;
        double s = 0.0;
        while (j < ts.size() && ts[j].r == ts[i].r && ts[j].c == ts[i].c) s += ts[j++].v;
        m.col.push_back(ts[i].c);
        m.val.push_back(s);
        ++m.row_ptr[ts[i].r + 1];
        i = j;
    }
    for (int r = 0; r < n; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
        y[r] = s;
    }
}

std::vector<double> SparseMatrix::diagonal() const {
    std::vector<double> d(n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            if (col[k] == r) d[r] += val[k];
    return d;
}

SolveReport solve_spd(const SparseMatrix& a, std::span<const double> b, std::vector<double>& x,
                      double tol, int max_iter) {
    const int n = a.n;
    if (static_cast<int>(b.size()) != n) throw input_error("solve_spd: size mismatch");
    if (static_cast<int>(x.size()) != n) x.assign(n, 0.0);
    if (max_iter <= 0) max_iter = 20 * n + 2000;

    std::vector<double> diag = a.diagonal();
    for (double& d : diag) d = (std::abs(d) > 0.0) ? 1.0 / d : 1.0;

    std::vector<double> r(n), z(n), p(n), q(n);
    a.multiply(x, r);
    double bnorm = 0.0;
    for (int i = 0; i < n; ++i) {
        r[i] = b[i] - r[i];
        bnorm += b[i] * b[i];
    }
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        return SolveReport{true, 0, 0.0, false};
    }

    SolveReport rep;
    double rz = 0.0;
    for (int i = 0; i < n; ++i) {
        z[i] = diag[i] * r[i];
        rz += r[i] * z[i];
    }
    p = z;
    double rnorm = 0.0;
    for (int i = 0; i < n; ++i) rnorm += r[i] * r[i];
    rnorm = std::sqrt(rnorm);

    int it = 0;
    while (rnorm / bnorm > tol && it < max_iter) {
        a.multiply(p, q);
        double pq = 0.0;
        for (int i = 0; i < n; ++i) pq += p[i] * q[i];
        if (pq <= 0.0) {
            rep.indefinite = true; // negative curvature: matrix not SPD
            break;
        }
        const double alpha = rz / pq;
        rnorm = 0.0;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
            rnorm += r[i] * r[i];
        }
        rnorm = std::sqrt(rnorm);
        double rz_new = 0.0;
        for (int i = 0; i < n; ++i) {
            z[i] = diag[i] * r[i];
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        ++it;
    }
    rep.iterations = it;
    rep.rel_residual = rnorm / bnorm;
    rep.converged = rep.rel_residual <= tol && !rep.indefinite;
    return rep;
}

} // namespace plrn::fem
