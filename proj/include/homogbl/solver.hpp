#pragma once

#include "homogbl/sparse.hpp"

#include <functional>
#include <vector>

namespace homogbl {

struct SolverConfig {
    double rel_tol = 1e-10; // on the 2-norm of the residual, relative to rhs
    int max_iter = 0;       // 0 -> max(500, 20*sqrt(dof))
    bool jacobi = true;     // Jacobi preconditioning (else none)
};

int default_max_iter(const SolverConfig& cfg, std::size_t dof);

struct CgResult {
    std::vector<double> x;
    int iterations = 0;
    double rel_residual = 0.0;
};

// Preconditioned conjugate gradients for K x = rhs with K SPD on the solve
// subspace.  `project` (optional) restores subspace membership each
// iteration — used for the periodic zero-mean quotient, where the kernel of
// K is the constants.  `x0` warm-starts the iteration.  Deterministic:
// fixed start, fixed reduction order, no randomness.
CgResult cg_solve(const Csr& K, const std::vector<double>& rhs,
                  const SolverConfig& cfg = {},
                  const std::vector<double>* x0 = nullptr,
                  const std::function<void(std::vector<double>&)>& project = nullptr,
                  std::vector<double>* residual_history = nullptr);

struct EigenPair {
    double lambda = 0.0;
    std::vector<double> vector; // mass-normalized: v^T M v = 1
    double residual = 0.0;      // ||K v - lambda M v|| in the M^{-1} norm
    int iterations = 0;         // outer inverse-iteration count
};

// Smallest eigenpair of K v = lambda M v by inverse power iteration with CG
// inner solves (warm-started, tolerance tightened as the pair converges).
// Start vector: all-ones, M-normalized.  Converged when the M^{-1}-norm
// residual drops below cfg.rel_tol * lambda.
EigenPair smallest_eigenpair(const Csr& K, const Csr& M, const SolverConfig& cfg = {},
                             const std::vector<double>* start = nullptr);

// Mean over entries; subtract_mean projects onto the zero-mean subspace
// (the kernel complement for periodic stiffness systems).
double mean_value(const std::vector<double>& v);
void subtract_mean(std::vector<double>& v);

} // namespace homogbl
