#include "homogbl/solver.hpp"

#include "homogbl/errors.hpp"
#include "homogbl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace homogbl {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

} // namespace

int default_max_iter(const SolverConfig& cfg, std::size_t dof) {
    if (cfg.max_iter > 0) return cfg.max_iter;
    const int scaled = static_cast<int>(20.0 * std::sqrt(static_cast<double>(dof)));
    return std::max(500, scaled);
}

double mean_value(const std::vector<double>& v) {
    double s = std::accumulate(v.begin(), v.end(), 0.0);
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

void subtract_mean(std::vector<double>& v) {
    const double m = mean_value(v);
    for (double& x : v) x -= m;
}

CgResult cg_solve(const Csr& K, const std::vector<double>& rhs, const SolverConfig& cfg,
                  const std::vector<double>* x0,
                  const std::function<void(std::vector<double>&)>& project,
                  std::vector<double>* residual_history) {
    const auto& kn = kernels::active();
    const std::size_t n = rhs.size();
    if (K.rows != static_cast<index_t>(n) || K.cols != K.rows)
        fail("bad-constraint", "matrix/vector size mismatch in cg_solve");
    if (!(cfg.rel_tol > 0.0) || cfg.rel_tol > 1e-4)
        fail("config-error", "cg rel_tol must lie in (0, 1e-4]");

    CgResult out;
    out.x.assign(n, 0.0);
    if (x0) {
        if (x0->size() != n) fail("bad-constraint", "x0 size mismatch in cg_solve");
        out.x = *x0;
        if (project) project(out.x);
    }

    const double rhs_norm = std::sqrt(kn.nrm2sq(rhs.data(), n));
    if (!std::isfinite(rhs_norm))
        fail("numerical-breakdown", "non-finite right-hand side");
    if (rhs_norm == 0.0) {
        out.x.assign(n, 0.0);
        return out;
    }
    const double target = cfg.rel_tol * rhs_norm;
    const int max_iter = default_max_iter(cfg, n);

    std::vector<double> inv_diag;
    if (cfg.jacobi) {
        inv_diag = K.diagonal();
        for (double& d : inv_diag) {
            if (!(d > 0.0))
                fail("numerical-breakdown", "nonpositive diagonal entry defeats the "
                                            "Jacobi preconditioner");
            d = 1.0 / d;
        }
    }

    std::vector<double> r(n), z(n), p(n), q(n);

    auto true_residual = [&]() {
        K.multiply(out.x.data(), r.data());
        // r = rhs - K x
        kn.xpay(-1.0, rhs.data(), r.data(), n);
        if (project) project(r);
        return std::sqrt(kn.nrm2sq(r.data(), n));
    };

    double res_norm = true_residual();
    int iter = 0;
    for (int attempt = 0; attempt < 3 && res_norm > target; ++attempt) {
        // (Re)start from the current true residual.
        if (cfg.jacobi)
            kn.hadamard(r.data(), inv_diag.data(), z.data(), n);
        else
            z = r;
        if (project) project(z);
        p = z;
        double rz = kn.dot(r.data(), z.data(), n);
        while (iter < max_iter) {
            ++iter;
            K.multiply(p.data(), q.data());
            const double pq = kn.dot(p.data(), q.data(), n);
            if (!std::isfinite(pq) || pq <= 0.0)
                fail("numerical-breakdown",
                     "conjugate gradients hit a nonpositive curvature direction "
                     "(p^T K p = " + fmt(pq) + ")");
            const double alpha = rz / pq;
            kn.axpy(alpha, p.data(), out.x.data(), n);
            kn.axpy(-alpha, q.data(), r.data(), n);
            if (project) project(r);
            res_norm = std::sqrt(kn.nrm2sq(r.data(), n));
            if (residual_history) residual_history->push_back(res_norm);
            if (!std::isfinite(res_norm))
                fail("numerical-breakdown", "non-finite residual in cg_solve");
            if (res_norm <= target) break;
            if (cfg.jacobi)
                kn.hadamard(r.data(), inv_diag.data(), z.data(), n);
            else
                z = r;
            if (project) project(z);
            const double rz_new = kn.dot(r.data(), z.data(), n);
            const double beta = rz_new / rz;
            kn.xpay(beta, z.data(), p.data(), n); // p = z + beta p
            rz = rz_new;
        }
        res_norm = true_residual(); // recurrence drift check
        if (iter >= max_iter) break;
    }

    out.iterations = iter;
    out.rel_residual = res_norm / rhs_norm;
    if (res_norm > target)
        fail("no-convergence", "cg_solve stalled after " + std::to_string(iter) +
                                   " iterations at relative residual " +
                                   fmt(out.rel_residual));
    return out;
}

EigenPair smallest_eigenpair(const Csr& K, const Csr& M, const SolverConfig& cfg,
                             const std::vector<double>* start) {
    const auto& kn = kernels::active();
    if (K.rows != M.rows || K.rows != K.cols || M.rows != M.cols)
        fail("bad-constraint", "eigenproblem needs square matrices of equal size");
    const std::size_t n = static_cast<std::size_t>(K.rows);

    SolverConfig mass_cfg;
    mass_cfg.rel_tol = 1e-10;

    auto m_norm_sq = [&](const std::vector<double>& v) {
        std::vector<double> mv(n);
        M.multiply(v.data(), mv.data());
        return kn.dot(v.data(), mv.data(), n);
    };

    EigenPair pair;
    if (start) {
        if (start->size() != n)
            fail("grid-incompatibility", "eigen start vector length mismatch");
        pair.vector = *start;
    } else {
        pair.vector.assign(n, 1.0);
    }
    double vmv = m_norm_sq(pair.vector);
    if (!(vmv > 0.0) || !std::isfinite(vmv))
        fail("numerical-breakdown", "mass matrix is not positive definite");
    kn.scal(1.0 / std::sqrt(vmv), pair.vector.data(), n);

    std::vector<double> mv(n), kv(n), resid(n), w;
    M.multiply(pair.vector.data(), mv.data());
    K.multiply(pair.vector.data(), kv.data());
    pair.lambda = kn.dot(pair.vector.data(), kv.data(), n);

    double inner_tol = 1e-4; // loosest tolerance cg_solve accepts
    const int max_outer = 200;
    for (int outer = 1; outer <= max_outer; ++outer) {
        pair.iterations = outer;

        SolverConfig inner_cfg = cfg;
        inner_cfg.rel_tol = inner_tol;
        // Warm start: near convergence w ~ v / lambda.
        std::vector<double> guess = pair.vector;
        kn.scal(1.0 / std::max(pair.lambda, 1e-300), guess.data(), n);
        w = cg_solve(K, mv, inner_cfg, &guess).x;

        std::vector<double> mw(n), kw(n);
        M.multiply(w.data(), mw.data());
        K.multiply(w.data(), kw.data());
        const double wmw = kn.dot(w.data(), mw.data(), n);
        if (!(wmw > 0.0) || !std::isfinite(wmw))
            fail("numerical-breakdown", "inverse iteration produced a degenerate "
                                        "iterate");
        pair.lambda = kn.dot(w.data(), kw.data(), n) / wmw;
        const double s = 1.0 / std::sqrt(wmw);
        pair.vector = w;
        kn.scal(s, pair.vector.data(), n);
        mv = mw;
        kn.scal(s, mv.data(), n);
        kv = kw;
        kn.scal(s, kv.data(), n);

        // residual = K v - lambda M v, measured in the M^{-1} norm.
        resid = kv;
        kn.axpy(-pair.lambda, mv.data(), resid.data(), n);
        const auto minv_r = cg_solve(M, resid, mass_cfg).x;
        const double r2 = kn.dot(resid.data(), minv_r.data(), n);
        pair.residual = std::sqrt(std::max(r2, 0.0));

        if (pair.residual <= cfg.rel_tol * pair.lambda) return pair;
        inner_tol = std::clamp(0.1 * pair.residual / pair.lambda, 0.05 * cfg.rel_tol,
                               1e-4);
    }
    fail("no-convergence",
         "inverse iteration did not converge in " + std::to_string(max_outer) +
             " outer iterations (residual " + fmt(pair.residual) + ")");
}

} // namespace homogbl
