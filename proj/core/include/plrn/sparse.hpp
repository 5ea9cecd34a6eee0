#pragma once

#include <span>
#include <vector>

#include "plrn/common.hpp"

namespace plrn::fem {

struct Triplet {
    int r{}, c{};
    double v{};
};

// Sparse matrix in CSR form; duplicate triplets are summed.
struct SparseMatrix {
    int n{};
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> val;

    static SparseMatrix from_triplets(int n, std::vector<Triplet> ts);
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> diagonal() const;
};

struct SolveReport {
    bool converged{false};
    int iterations{};
    double rel_residual{};
    bool indefinite{false}; // negative curvature seen; result untrustworthy
};

// Jacobi-preconditioned conjugate gradients for SPD systems.
// x is the initial guess on entry and the solution on exit.
SolveReport solve_spd(const SparseMatrix& a, std::span<const double> b, std::vector<double>& x,
                      double tol = 1e-12, int max_iter = 0);

} // namespace plrn::fem
