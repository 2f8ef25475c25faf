#include "homogbl/spectral.hpp"

#include "homogbl/errors.hpp"
#include "homogbl/fields.hpp"
#include "homogbl/kernels.hpp"
#include "homogbl/unfolding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

namespace homogbl {

namespace {

constexpr double kPi = std::numbers::pi;

// Exact transfer of a cell-grid nodal field to the fine node (i1,i2); the
// fine grid must resolve each eps-cell with a divisor of the cell resolution.
struct CellTransfer {
    int k = 0;
    int stride = 0;
    int nc = 0;

    static CellTransfer make(const CellSolutions& cells, const Grid& fine, double eps) {
        const int cps = cells_per_side(eps);
        if (fine.n % cps != 0)
            fail("grid-incompatibility",
                 "fine resolution " + std::to_string(fine.n) +
                     " does not split into " + std::to_string(cps) + " cells");
        CellTransfer t;
        t.k = fine.n / cps;
        t.stride = transfer_stride(cells.grid, t.k);
        t.nc = cells.grid.n;
        return t;
    }

    int cell_node(int i1, int i2) const {
        return (i2 % k) * stride * (nc + 1) + (i1 % k) * stride;
    }
};

// 1^T M v with the zero-boundary convention (decides the sign fix).
double mass_integral(const Csr& mass, const std::vector<double>& v) {
    std::vector<double> mv(v.size());
    mass.multiply(v.data(), mv.data());
    return std::accumulate(mv.begin(), mv.end(), 0.0);
}

struct Ops {
    DirichletOperator mass, hom, osc;
};

Ops build_ops(const Coefficient& coeff, const SymMat2& a_hom, double eps,
              const Grid& fine) {
    Ops ops;
    ops.mass = DirichletOperator::build(fine, assemble_mass(fine));
    ops.hom = DirichletOperator::build(fine, assemble_stiffness(fine, a_hom));
    ops.osc = DirichletOperator::build(fine, assemble_stiffness(fine, coeff, eps));
    return ops;
}

SpectralPair pair_from_ops(const Ops& ops, const Grid& fine,
                           const SolverConfig& cfg) {
    const auto& kn = kernels::active();
    // The lowest mode of any constant SPD tensor on the square is close to
    // the product sine; it is the exact discrete start for diagonal tensors.
    std::vector<double> start(fine.node_count());
    for (int idx = 0; idx < fine.node_count(); ++idx) {
        auto [x1, x2] = fine.node_coord(idx);
        start[idx] = 2.0 * std::sin(kPi * x1) * std::sin(kPi * x2);
    }
    std::vector<double> start_red = ops.hom.reduce_vec(start);

    SpectralPair pair;
    EigenPair hom = smallest_eigenpair(ops.hom.reduced, ops.mass.reduced, cfg,
                                       &start_red);
    pair.lambda_hom = hom.lambda;
    pair.v = ops.hom.expand_vec(hom.vector);
    if (mass_integral(ops.mass.full, pair.v) < 0.0) {
        kn.scal(-1.0, pair.v.data(), pair.v.size());
        kn.scal(-1.0, hom.vector.data(), hom.vector.size());
    }

    EigenPair osc = smallest_eigenpair(ops.osc.reduced, ops.mass.reduced, cfg,
                                       &hom.vector);
    pair.lambda_eps = osc.lambda;
    pair.v_eps = ops.osc.expand_vec(osc.vector);
    if (mass_integral(ops.mass.full, pair.v_eps) < 0.0)
        kn.scal(-1.0, pair.v_eps.data(), pair.v_eps.size());
    return pair;
}

std::vector<double> layer_from_op(const CellSolutions& cells,
                                  const std::vector<double>& v, double eps,
                                  const DirichletOperator& op,
                                  const SolverConfig& cfg) {
    const Grid& fine = op.grid;
    if (v.size() != static_cast<std::size_t>(fine.node_count()))
        fail("grid-incompatibility", "eigenfunction length does not match the grid");
    const CellTransfer tr = CellTransfer::make(cells, fine, eps);
    const int nf = fine.n;
    const double inv2h = static_cast<double>(nf) / 2.0;
    auto vat = [&](int i, int j) { return v[fine.node_index(i, j)]; };

    // Trace chi_j(x/eps) dv/dx_j: along each edge the tangential derivative
    // of v vanishes (zero Dirichlet data), the normal derivative comes from
    // the second-order one-sided difference with the boundary value zero,
    // and corners carry zero data (the gradient of the lowest mode vanishes
    // there).
    std::vector<double> g(fine.node_count(), 0.0);
    for (int j = 1; j < nf; ++j) {
        const double dleft = (4.0 * vat(1, j) - vat(2, j)) * inv2h;
        const double dright = (vat(nf - 2, j) - 4.0 * vat(nf - 1, j)) * inv2h;
        g[fine.node_index(0, j)] = cells.chi_nodal[0][tr.cell_node(0, j)] * dleft;
        g[fine.node_index(nf, j)] = cells.chi_nodal[0][tr.cell_node(nf, j)] * dright;
    }
    for (int i = 1; i < nf; ++i) {
        const double dbottom = (4.0 * vat(i, 1) - vat(i, 2)) * inv2h;
        const double dtop = (vat(i, nf - 2) - 4.0 * vat(i, nf - 1)) * inv2h;
        g[fine.node_index(i, 0)] = cells.chi_nodal[1][tr.cell_node(i, 0)] * dbottom;
        g[fine.node_index(i, nf)] = cells.chi_nodal[1][tr.cell_node(i, nf)] * dtop;
    }

    const std::vector<double> zero_load(fine.node_count(), 0.0);
    CgResult r = cg_solve(op.reduced, op.lifted_rhs(zero_load, g), cfg);
    return op.expand_vec(r.x, &g);
}

} // namespace

SpectralPair solve_spectral_pair(const Coefficient& coeff, const SymMat2& a_hom,
                                 double eps, const Grid& fine,
                                 const SolverConfig& cfg) {
    if (fine.kind != GridKind::domain_dirichlet)
        fail("bad-constraint", "spectral solves need a domain grid");
    const Ops ops = build_ops(coeff, a_hom, eps, fine);
    return pair_from_ops(ops, fine, cfg);
}

std::vector<double> eigen_boundary_layer(const CellSolutions& cells,
                                         const std::vector<double>& v, double eps,
                                         const Grid& fine,
                                         const SolverConfig& cfg) {
    if (fine.kind != GridKind::domain_dirichlet)
        fail("bad-constraint", "the eigenvalue boundary layer needs a domain grid");
    DirichletOperator op =
        DirichletOperator::build(fine, assemble_stiffness(fine, *cells.coeff, eps));
    return layer_from_op(cells, v, eps, op, cfg);
}

SpectralReport eigen_corrector_study(const CellSolutions& cells,
                                     const SpectralConfig& cfg) {
    SpectralReport report;
    report.tensor = cells.a_hom;
    if (cfg.consistent_tensor) {
        // The fine operator resolves each cell with points_per_cell elements,
        // so its effective tensor is the one attained at that resolution;
        // comparing against it removes a resolution mismatch that would
        // otherwise enter the eigenvalue gap as an eps-independent offset.
        Grid coarse_cell = build_cell_grid(cfg.points_per_cell,
                                           cells.coeff->discontinuous());
        CellSolutions coarse = solve_first_cell(coarse_cell, cells.coeff, cfg.solver);
        report.tensor = coarse.a_hom;
    }

    for (double eps : cfg.eps_list) {
        try {
            const int cps = cells_per_side(eps);
            const Grid fine = build_domain_grid(cps * cfg.points_per_cell);
            const Ops ops = build_ops(*cells.coeff, report.tensor, eps, fine);
            const SpectralPair pair = pair_from_ops(ops, fine, cfg.solver);
            const std::vector<double> theta_bar =
                layer_from_op(cells, pair.v, eps, ops.osc, cfg.solver);

            std::vector<double> mv(pair.v.size());
            ops.mass.full.multiply(pair.v.data(), mv.data());
            const double integral = kernels::active().dot(
                theta_bar.data(), mv.data(), mv.size());

            SpectralRow row;
            row.eps = eps;
            row.lambda_eps = pair.lambda_eps;
            row.lambda_hom = pair.lambda_hom;
            row.corrector_integral = integral;
            row.residual = pair.lambda_eps - pair.lambda_hom -
                           eps * pair.lambda_hom * integral;
            report.rows.push_back(row);
        } catch (const error& e) {
            report.failures.push_back("eps=" + std::to_string(eps) + ": " + e.what());
            report.all_pass = false;
        }
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> eps_pts, gaps, resids;
    double lambda_scale = 1.0;
    for (const auto& row : report.rows) {
        eps_pts.push_back(row.eps);
        gaps.push_back(std::abs(row.lambda_eps - row.lambda_hom));
        resids.push_back(std::abs(row.residual));
        lambda_scale = std::max(lambda_scale, std::abs(row.lambda_hom));
    }
    const double noise = 1e-9 * lambda_scale;
    const bool gap_noise =
        !gaps.empty() && *std::max_element(gaps.begin(), gaps.end()) <= noise;
    const bool resid_noise =
        !resids.empty() && *std::max_element(resids.begin(), resids.end()) <= noise;

    // Short series (solver failures upstream) must surface as failed rate
    // rows, not as a thrown fit error that hides the per-eps messages.
    const bool fittable = eps_pts.size() >= 3;
    {
        RateRow row;
        row.kind = "eigenvalue-gap";
        row.threshold = ">= 0.9";
        if (gap_noise) {
            row.value = 0.0;
            row.pass = true;
            row.note = "gaps at noise level";
        } else if (!fittable) {
            row.value = 0.0;
            row.pass = false;
            row.note = "only " + std::to_string(eps_pts.size()) +
                       " usable sweep point(s)";
        } else {
            row.value = fit_rate(eps_pts, gaps);
            row.pass = row.value >= 0.9;
        }
        report.rates.push_back(row);
    }
    {
        RateRow row;
        row.kind = "eigenvalue-gap-ratio";
        row.threshold = "max/min <= 4";
        if (gap_noise) {
            row.value = 1.0;
            row.pass = true;
            row.note = "gaps at noise level";
        } else {
            double mx = 0.0, mn = inf;
            for (std::size_t i = 0; i < gaps.size(); ++i) {
                const double r = gaps[i] / eps_pts[i];
                mx = std::max(mx, r);
                mn = std::min(mn, r);
            }
            row.value = mn > 0.0 ? mx / mn : inf;
            row.pass = gaps.size() >= 2 && row.value <= 4.0;
        }
        report.rates.push_back(row);
    }
    {
        RateRow row;
        row.kind = "eigen-residual";
        row.threshold = "> 1.0";
        if (resid_noise) {
            row.value = 0.0;
            row.pass = true;
            row.note = "residuals at noise level";
        } else if (!fittable) {
            row.value = 0.0;
            row.pass = false;
            row.note = "only " + std::to_string(eps_pts.size()) +
                       " usable sweep point(s)";
        } else {
            row.value = fit_rate(eps_pts, resids);
            row.pass = row.value > 1.0;
            if (!row.pass) {
                bool pos = false, neg = false;
                for (const auto& r : report.rows) {
                    pos = pos || r.residual > 0.0;
                    neg = neg || r.residual < 0.0;
                }
                const bool ratio_ok = report.rates.size() >= 2 && report.rates[1].pass;
                if (pos && neg && ratio_ok) {
                    report.non_uniqueness = true;
                    row.pass = true;
                    row.note = "non-uniqueness flagged: residual signs oscillate "
                               "with a bounded eigenvalue gap";
                }
            }
        }
        report.rates.push_back(row);
    }

    for (const auto& row : report.rates)
        report.all_pass = report.all_pass && row.pass;
    return report;
}

} // namespace homogbl
