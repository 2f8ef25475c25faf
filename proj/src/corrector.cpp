#include "homogbl/corrector.hpp"

#include "homogbl/errors.hpp"
#include "homogbl/unfolding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

namespace homogbl {

namespace {

constexpr double kPi = std::numbers::pi;

// Exact nodal transfer of cell-grid fields to fine-grid nodes: the fine node
// (i1,i2) sits at the fractional cell position ((i1 mod k)/k, (i2 mod k)/k),
// which is a cell-grid node whenever stride = n_cell / k is an integer.
struct CellTransfer {
    int k = 0;
    int stride = 0;
    int nc = 0;

    int cell_node(int i1, int i2) const {
        const int ci = (i1 % k) * stride;
        const int cj = (i2 % k) * stride;
        return cj * (nc + 1) + ci;
    }
};

CellTransfer make_transfer(const CellSolutions& cells, int points_per_cell) {
    CellTransfer t;
    t.k = points_per_cell;
    t.stride = transfer_stride(cells.grid, points_per_cell);
    t.nc = cells.grid.n;
    return t;
}

std::vector<double> boundary_trace(const Grid& grid, const std::vector<double>& field) {
    std::vector<double> g(grid.node_count(), 0.0);
    for (int idx : grid.boundary_nodes()) g[idx] = field[idx];
    return g;
}

// Cell solutions at the resolution the fine operator actually realizes per
// cell.  Reuses `cells` when it already matches (and carries chi2); solves a
// small k-by-k cell problem set otherwise.
const CellSolutions& matched_cells(const CellSolutions& cells, int points_per_cell,
                                   const SolverConfig& cfg, CellSolutions& storage,
                                   std::vector<std::string>* notes) {
    if (cells.grid.n == points_per_cell && cells.has_chi2) return cells;
    const Grid grid = build_cell_grid(points_per_cell, cells.coeff->discontinuous());
    storage = solve_first_cell(grid, cells.coeff, cfg);
    homogenized_tensor(storage);
    solve_second_cell(storage, cfg);
    if (notes && cells.grid.n != points_per_cell)
        notes->push_back("expansion fields built from a " +
                         std::to_string(points_per_cell) +
                         "-point cell solve matching the fine operator "
                         "(configured cell grid: " +
                         std::to_string(cells.grid.n) + ")");
    return storage;
}

} // namespace

double Manufactured::u0(double x1, double x2) const {
    return std::sin(kPi * x1) * std::sin(kPi * x2);
}

std::array<double, 2> Manufactured::grad_u0(double x1, double x2) const {
    return {kPi * std::cos(kPi * x1) * std::sin(kPi * x2),
            kPi * std::sin(kPi * x1) * std::cos(kPi * x2)};
}

std::array<double, 3> Manufactured::hess_u0(double x1, double x2) const {
    const double pp = kPi * kPi;
    return {-pp * std::sin(kPi * x1) * std::sin(kPi * x2),
            pp * std::cos(kPi * x1) * std::cos(kPi * x2),
            -pp * std::sin(kPi * x1) * std::sin(kPi * x2)};
}

double Manufactured::f(double x1, double x2) const {
    // f = -div(a_hom grad u0) with constant a_hom
    const auto h = hess_u0(x1, x2);
    return -(a_hom.a11 * h[0] + 2.0 * a_hom.a12 * h[1] + a_hom.a22 * h[2]);
}

Manufactured manufacture_problem(const SymMat2& a_hom) { return Manufactured{a_hom}; }

double fit_rate(const std::vector<double>& eps, const std::vector<double>& errors,
                int* excluded) {
    if (eps.size() != errors.size())
        fail("inconsistency", "rate fit received mismatched eps/error lists");
    std::vector<double> xs, ys;
    int dropped = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(errors[i] > 0.0) || !std::isfinite(errors[i])) {
            ++dropped;
            continue;
        }
        if (!(eps[i] > 0.0))
            fail("inconsistency", "rate fit requires positive eps values");
        xs.push_back(std::log(eps[i]));
        ys.push_back(std::log(errors[i]));
    }
    if (excluded) *excluded = dropped;
    if (xs.size() < 3)
        fail("insufficient-data",
             "rate fit needs at least 3 usable points, got " + std::to_string(xs.size()));
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx <= 0.0)
        fail("insufficient-data", "rate fit needs at least two distinct eps values");
    return sxy / sxx;
}

int transfer_stride(const Grid& cell_grid, int points_per_cell) {
    if (points_per_cell < 1)
        fail("invalid-resolution", "points-per-cell must be positive");
    if (cell_grid.n % points_per_cell != 0)
        fail("grid-incompatibility",
             "cell resolution " + std::to_string(cell_grid.n) +
                 " is not divisible by points-per-cell " +
                 std::to_string(points_per_cell) +
                 "; exact nodal transfer needs divisibility");
    return cell_grid.n / points_per_cell;
}

ReducedSystem fine_system(const Grid& fine, const Coefficient& coeff, double eps,
                          const std::vector<double>& load) {
    Csr K = assemble_stiffness(fine, coeff, eps);
    const BoundaryCondition zero_bc =
        dirichlet_from(fine, [](double, double) { return 0.0; });
    return apply_dirichlet(K, load, fine, zero_bc);
}

ExpansionBundle build_bundle(const CellSolutions& cells, const Manufactured& mf,
                             double eps, int points_per_cell,
                             const SolverConfig& cfg) {
    if (!cells.has_chi2)
        fail("inconsistency",
             "the expansion bundle needs the second-order cell correctors; "
             "solve the second cell problems first");
    const int cps = cells_per_side(eps);
    const CellTransfer tr = make_transfer(cells, points_per_cell);
    const int nf = cps * points_per_cell;

    ExpansionBundle b;
    b.eps = eps;
    b.points_per_cell = points_per_cell;
    b.fine = build_domain_grid(nf);
    const Grid& fine = b.fine;
    const int nn = fine.node_count();

    // Oscillating stiffness, reduced once and reused by the four solves.
    Csr K = assemble_stiffness(fine, *cells.coeff, eps);
    DirichletOperator op = DirichletOperator::build(fine, std::move(K));
    const std::vector<double> load =
        assemble_load(fine, [&](double x1, double x2) { return mf.f(x1, x2); });

    // Regularized slopes Q_eps(d_j u0), one interpolant per direction.
    const QInterp q1 = q_interp(
        [&](double x1, double x2) { return mf.grad_u0(x1, x2)[0]; }, eps);
    const QInterp q2 = q_interp(
        [&](double x1, double x2) { return mf.grad_u0(x1, x2)[1]; }, eps);

    b.u0.resize(nn);
    b.w1.resize(nn);
    b.u1_q.resize(nn);
    b.u2.resize(nn);
    for (int j = 0; j <= nf; ++j) {
        for (int i = 0; i <= nf; ++i) {
            const int idx = fine.node_index(i, j);
            auto [x1, x2] = fine.node_coord(idx);
            const int cn = tr.cell_node(i, j);
            const double c1 = cells.chi_nodal[0][cn];
            const double c2 = cells.chi_nodal[1][cn];
            const auto g = mf.grad_u0(x1, x2);
            const auto h = mf.hess_u0(x1, x2);
            b.u0[idx] = mf.u0(x1, x2);
            b.w1[idx] = c1 * g[0] + c2 * g[1];
            b.u1_q[idx] = c1 * q1(x1, x2) + c2 * q2(x1, x2);
            b.u2[idx] = cells.chi2_nodal[0][0][cn] * h[0] +
                        (cells.chi2_nodal[0][1][cn] + cells.chi2_nodal[1][0][cn]) * h[1] +
                        cells.chi2_nodal[1][1][cn] * h[2];
        }
    }

    // Oscillating Galerkin solution (zero trace, manufactured load).
    {
        const std::vector<double> rhs = op.reduce_vec(load);
        CgResult r = cg_solve(op.reduced, rhs, cfg);
        b.u_eps = op.expand_vec(r.x);
    }

    // Boundary layers: zero load, trace matching the expansion field.
    const std::vector<double> zero_load(nn, 0.0);
    const std::vector<double> g_theta = boundary_trace(fine, b.w1);
    const std::vector<double> g_beta = boundary_trace(fine, b.u1_q);
    const std::vector<double> g_phi = boundary_trace(fine, b.u2);

    CgResult theta = cg_solve(op.reduced, op.lifted_rhs(zero_load, g_theta), cfg);
    b.theta = op.expand_vec(theta.x, &g_theta);
    // beta's trace differs from theta's only through the Q_eps smoothing, so
    // theta's interior is a strong warm start.
    CgResult beta =
        cg_solve(op.reduced, op.lifted_rhs(zero_load, g_beta), cfg, &theta.x);
    b.beta = op.expand_vec(beta.x, &g_beta);
    CgResult phi = cg_solve(op.reduced, op.lifted_rhs(zero_load, g_phi), cfg);
    b.phi = op.expand_vec(phi.x, &g_phi);
    return b;
}

std::vector<ErrorRecord> evaluate_errors(const ExpansionBundle& bundle,
                                         const NormContext& norms) {
    const double eps = bundle.eps;
    const double e2 = eps * eps;
    std::vector<ErrorRecord> out;
    auto push = [&](const std::string& kind, const std::vector<double>& field,
                    double extra = 0.0) {
        const Norms n = norms.norms(field);
        out.push_back(ErrorRecord{eps, kind, n.l2, n.h1, extra});
    };

    const std::vector<double> a = combine(
        bundle.u_eps, {{-1.0, &bundle.u0}, {-eps, &bundle.w1}});
    const std::vector<double> b = combine(a, {{eps, &bundle.theta}});
    const std::vector<double> c = combine(
        bundle.u_eps,
        {{-1.0, &bundle.u0}, {-eps, &bundle.u1_q}, {eps, &bundle.beta}});
    const std::vector<double> d =
        combine(b, {{-e2, &bundle.u2}, {e2, &bundle.phi}});
    const std::vector<double> d_nophi = combine(b, {{-e2, &bundle.u2}});

    push("plain-first", a);
    push("first-with-theta", b);
    push("first-with-beta-Q", c);
    push("second-with-both", d);
    push("second-no-phi", d_nophi);

    std::vector<double> eps_phi(bundle.phi.size());
    for (std::size_t i = 0; i < eps_phi.size(); ++i) eps_phi[i] = eps * bundle.phi[i];
    const Norms np = norms.norms(eps_phi);
    out.push_back(ErrorRecord{eps, "phi-growth", np.l2, np.h1,
                              np.h1 / std::sqrt(eps)});
    return out;
}

namespace {

struct SeriesView {
    std::vector<double> eps, l2, h1, extra;
};

SeriesView series_for(const std::vector<ErrorRecord>& records, const std::string& kind) {
    SeriesView s;
    for (const auto& r : records) {
        if (r.kind != kind) continue;
        s.eps.push_back(r.eps);
        s.l2.push_back(r.l2);
        s.h1.push_back(r.h1);
        s.extra.push_back(r.extra);
    }
    return s;
}

RateRow slope_row(const std::vector<ErrorRecord>& records, const std::string& kind,
                  bool use_l2, double lo, double hi, const std::string& threshold) {
    RateRow row;
    row.kind = kind + (use_l2 ? "-l2" : "-h1");
    row.threshold = threshold;
    const SeriesView s = series_for(records, kind);
    int excluded = 0;
    row.value = fit_rate(s.eps, use_l2 ? s.l2 : s.h1, &excluded);
    row.pass = row.value >= lo && row.value <= hi;
    if (excluded > 0)
        row.note = std::to_string(excluded) + " nonpositive point(s) excluded";
    return row;
}

} // namespace

SweepResult run_sweep(const CellSolutions& cells, const SweepConfig& cfg) {
    SweepResult result;
    CellSolutions storage;
    const CellSolutions& expansion =
        cfg.consistent_expansion
            ? matched_cells(cells, cfg.points_per_cell, cfg.solver, storage,
                            &result.notes)
            : cells;
    result.expansion_tensor = expansion.a_hom;
    const Manufactured mf = manufacture_problem(expansion.a_hom);

    for (double eps : cfg.eps_list) {
        try {
            ExpansionBundle bundle =
                build_bundle(expansion, mf, eps, cfg.points_per_cell, cfg.solver);
            NormContext norms(bundle.fine);
            auto recs = evaluate_errors(bundle, norms);
            result.records.insert(result.records.end(), recs.begin(), recs.end());
        } catch (const error& e) {
            result.failures.push_back("eps=" + std::to_string(eps) + ": " + e.what());
            result.all_pass = false;
        }
    }

    const double inf = std::numeric_limits<double>::infinity();
    result.rates.push_back(slope_row(result.records, "plain-first", false, 0.4, 0.8,
                                     "in [0.4 .. 0.8]"));
    result.rates.push_back(slope_row(result.records, "first-with-theta", false, 0.9,
                                     inf, ">= 0.9"));
    result.rates.push_back(slope_row(result.records, "first-with-theta", true, 1.8,
                                     inf, ">= 1.8"));
    result.rates.push_back(slope_row(result.records, "first-with-beta-Q", false, 0.9,
                                     inf, ">= 0.9"));
    result.rates.push_back(slope_row(result.records, "second-with-both", false, 1.8,
                                     inf, ">= 1.8"));
    result.rates.push_back(slope_row(result.records, "second-no-phi", false, 1.35,
                                     inf, ">= 1.35"));

    // ||eps*phi||_H1 / sqrt(eps) may vary by at most a factor 3 over the sweep.
    {
        const SeriesView s = series_for(result.records, "phi-growth");
        RateRow row;
        row.kind = "phi-growth";
        row.threshold = "max/min <= 3";
        if (s.extra.size() >= 2) {
            const double mx = *std::max_element(s.extra.begin(), s.extra.end());
            const double mn = *std::min_element(s.extra.begin(), s.extra.end());
            row.value = mn > 0.0 ? mx / mn : inf;
            row.pass = row.value <= 3.0;
            // Families whose third expansion field vanishes identically leave
            // phi at solver noise; a ratio of noise magnitudes says nothing,
            // while the growth bound itself holds trivially at zero.
            const double mx_h1 = *std::max_element(s.h1.begin(), s.h1.end());
            if (mx_h1 < 1e-10) {
                row.pass = true;
                row.note = "layer magnitude at solver noise level; growth bound "
                           "holds trivially";
            }
        } else {
            row.value = inf;
            row.pass = false;
            row.note = "fewer than 2 sweep points";
        }
        result.rates.push_back(row);
    }

    // Empirical ordering: error(d) <= error(b) <= 2*error(a) pointwise in eps
    // (soft flag; the coarsest eps is allowed to stray).
    for (double eps : cfg.eps_list) {
        double ea = -1.0, eb = -1.0, ed = -1.0;
        for (const auto& r : result.records) {
            if (r.eps != eps) continue;
            if (r.kind == "plain-first") ea = r.h1;
            if (r.kind == "first-with-theta") eb = r.h1;
            if (r.kind == "second-with-both") ed = r.h1;
        }
        if (ea < 0.0 || eb < 0.0 || ed < 0.0) continue;
        if (ed > eb)
            result.notes.push_back("ordering: error(d) > error(b) at eps=" +
                                   std::to_string(eps));
        if (eb > 2.0 * ea)
            result.notes.push_back("ordering: error(b) > 2*error(a) at eps=" +
                                   std::to_string(eps));
    }

    for (const auto& row : result.rates) result.all_pass = result.all_pass && row.pass;
    return result;
}

SweepResult oscillating_dirichlet_study(const CellSolutions& cells,
                                        const SweepConfig& cfg,
                                        const std::vector<double>* phi_star,
                                        const ScalarFn* z) {
    SweepResult result;
    CellSolutions storage;
    const CellSolutions& expansion =
        cfg.consistent_expansion
            ? matched_cells(cells, cfg.points_per_cell, cfg.solver, storage,
                            &result.notes)
            : cells;
    if (!expansion.has_chi2 && phi_star == nullptr)
        fail("inconsistency",
             "the default oscillating trace uses the chi_11 second corrector; "
             "solve the second cell problems or pass a cell field");
    result.expansion_tensor = expansion.a_hom;
    const Manufactured mf = manufacture_problem(expansion.a_hom);
    // A caller-supplied trace field lives on the configured cell grid; the
    // default comes from the expansion-resolution solve.
    const Grid& phi_grid = phi_star ? cells.grid : expansion.grid;
    const std::vector<double>& phi_field =
        phi_star ? *phi_star : expansion.chi2_nodal[0][0];
    if (phi_field.size() != static_cast<std::size_t>(phi_grid.node_count()))
        fail("grid-incompatibility",
             "the oscillating trace field must be nodal on the cell grid");
    const ScalarFn z_fn = z ? *z : ScalarFn([&mf](double x1, double x2) {
        return mf.hess_u0(x1, x2)[0];
    });

    CellTransfer tr_phi;
    tr_phi.k = cfg.points_per_cell;
    tr_phi.stride = transfer_stride(phi_grid, cfg.points_per_cell);
    tr_phi.nc = phi_grid.n;

    for (double eps : cfg.eps_list) {
        try {
            const int cps = cells_per_side(eps);
            const CellTransfer tr = make_transfer(expansion, cfg.points_per_cell);
            const int nf = cps * cfg.points_per_cell;
            const Grid fine = build_domain_grid(nf);
            const int nn = fine.node_count();

            Csr K = assemble_stiffness(fine, *expansion.coeff, eps);
            DirichletOperator op = DirichletOperator::build(fine, std::move(K));
            const std::vector<double> load = assemble_load(
                fine, [&](double x1, double x2) { return mf.f(x1, x2); });

            // Oscillating trace eps * Phi*(x/eps) * z(x) at boundary nodes.
            std::vector<double> g(nn, 0.0);
            for (int idx : fine.boundary_nodes()) {
                auto [x1, x2] = fine.node_coord(idx);
                const int i = idx % (nf + 1);
                const int j = idx / (nf + 1);
                g[idx] = eps * phi_field[tr_phi.cell_node(i, j)] * z_fn(x1, x2);
            }

            CgResult r = cg_solve(op.reduced, op.lifted_rhs(load, g), cfg.solver);
            const std::vector<double> y_eps = op.expand_vec(r.x, &g);

            // Regularized first-order expansion of y* = u0.
            const QInterp q1 = q_interp(
                [&](double x1, double x2) { return mf.grad_u0(x1, x2)[0]; }, eps);
            const QInterp q2 = q_interp(
                [&](double x1, double x2) { return mf.grad_u0(x1, x2)[1]; }, eps);
            std::vector<double> field(nn);
            for (int j = 0; j <= nf; ++j) {
                for (int i = 0; i <= nf; ++i) {
                    const int idx = fine.node_index(i, j);
                    auto [x1, x2] = fine.node_coord(idx);
                    const int cn = tr.cell_node(i, j);
                    field[idx] =
                        mf.u0(x1, x2) + eps * (expansion.chi_nodal[0][cn] * q1(x1, x2) +
                                               expansion.chi_nodal[1][cn] * q2(x1, x2));
                }
            }

            const std::vector<double> err = combine(y_eps, {{-1.0, &field}});
            NormContext norms(fine);
            const Norms n = norms.norms(err);
            result.records.push_back(
                ErrorRecord{eps, "oscillating-dirichlet", n.l2, n.h1, 0.0});
        } catch (const error& e) {
            result.failures.push_back("eps=" + std::to_string(eps) + ": " + e.what());
            result.all_pass = false;
        }
    }

    result.rates.push_back(slope_row(result.records, "oscillating-dirichlet", false,
                                     0.45, std::numeric_limits<double>::infinity(),
                                     ">= 0.45"));
    for (const auto& row : result.rates) result.all_pass = result.all_pass && row.pass;
    return result;
}

} // namespace homogbl
