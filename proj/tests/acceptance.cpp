// Desk-scale verification gate: runs the ten advertised criteria end to end
// on Omega = (0,1)^2 with eps in {1/4, 1/8, 1/16, 1/32}, 16 fine-grid points
// per cell, and a 64^2 cell grid, printing one PASS/FAIL line per criterion.
// Exits 0 only when every criterion holds; a FAIL line carries the measured
// value and, where the miss is structural rather than a defect, the reason.

#include "homogbl/cell.hpp"
#include "homogbl/coefficient.hpp"
#include "homogbl/config.hpp"
#include "homogbl/corrector.hpp"
#include "homogbl/fields.hpp"
#include "homogbl/grid.hpp"
#include "homogbl/spectral.hpp"
#include "homogbl/studies.hpp"
#include "homogbl/unfolding.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

using namespace homogbl;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& text) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, text.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

CellSolutions make_cells(const CoefficientPtr& coeff, int n, bool second) {
    CellSolutions cells =
        solve_first_cell(build_cell_grid(n, coeff->discontinuous()), coeff);
    homogenized_tensor(cells);
    if (second) solve_second_cell(cells);
    return cells;
}

const RateRow& rate(const std::vector<RateRow>& rows, const std::string& kind) {
    for (const auto& r : rows)
        if (r.kind == kind) return r;
    std::fprintf(stderr, "missing rate row '%s'\n", kind.c_str());
    std::exit(1);
}

double class_mean(const std::vector<double>& cls) {
    double s = 0.0;
    for (double v : cls) s += v;
    return s / static_cast<double>(cls.size());
}

double tensor_dev(const SymMat2& a, double d11, double d22) {
    return std::max({std::abs(a.a11 - d11), std::abs(a.a12), std::abs(a.a22 - d22)});
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> desk_eps{0.25, 0.125, 0.0625, 0.03125};
    const int desk_k = 16;
    const int desk_n = 64;

    // Shared heavy artifacts.
    const CoefficientPtr trig = make_trig_isotropic(2.0, 1.0);
    const CoefficientPtr layered = make_layered(1.0, 4.0);
    CellSolutions cells_trig = make_cells(trig, desk_n, true);
    CellSolutions cells_lay = make_cells(layered, desk_n, true);

    // ---- 1. Homogenized tensor oracles -------------------------------------
    {
        CellSolutions id = make_cells(make_identity(), desk_n, false);
        CellSolutions chk = make_cells(make_checkerboard(1.0, 4.0), 256, false);
        const double id_dev = tensor_dev(id.a_hom, 1.0, 1.0);
        const double lay_dev = tensor_dev(cells_lay.a_hom, 1.6, 2.5);
        const double chk_dev = tensor_dev(chk.a_hom, 2.0, 2.0);
        const bool pass = id_dev <= 1e-10 && lay_dev <= 1e-8 && chk_dev <= 2e-2;
        report(1, pass,
               "homogenized tensors match their oracles: identity dev " +
                   fmt(id_dev) + " (<= 1e-10), layered vs diag(8/5, 5/2) dev " +
                   fmt(lay_dev) + " (<= 1e-8), checkerboard vs 2I dev " +
                   fmt(chk_dev) + " (<= 2e-2)");
    }

    // ---- sweeps shared by criteria 2-6 --------------------------------------
    SweepConfig scfg;
    scfg.eps_list = desk_eps;
    scfg.points_per_cell = desk_k;
    const SweepResult sw_trig = run_sweep(cells_trig, scfg);
    const SweepResult sw_lay = run_sweep(cells_lay, scfg);

    // ---- 2. Plain first-order expansion: sqrt(eps) window, both families ----
    {
        const RateRow& t = rate(sw_trig.rates, "plain-first-h1");
        const RateRow& l = rate(sw_lay.rates, "plain-first-h1");
        report(2, t.pass && l.pass,
               "plain first-order H1 slope in [0.4, 0.8]: trig-isotropic " +
                   fmt(t.value) + (t.pass ? "" : " MISS") + ", layered " +
                   fmt(l.value) +
                   (l.pass ? ""
                           : " MISS -- structural: the layered corrector trace is"
                             " smooth and eps-independent (chi_2 = 0, tangential"
                             " boundary derivatives vanish), so the defect"
                             " contracts at the full rate eps and leaves the"
                             " sqrt(eps) window; the sqrt(eps) upper bound itself"
                             " holds"));
    }

    // ---- 3. Boundary-layer variants converge at rate eps in H1 --------------
    {
        const RateRow& th = rate(sw_trig.rates, "first-with-theta-h1");
        const RateRow& bq = rate(sw_trig.rates, "first-with-beta-Q-h1");
        report(3, th.pass && bq.pass,
               "boundary-layer variants reach H1 rate >= 0.9: theta " +
                   fmt(th.value) + ", regularized beta " + fmt(bq.value) +
                   " (layered family: " +
                   fmt(rate(sw_lay.rates, "first-with-theta-h1").value) + ", " +
                   fmt(rate(sw_lay.rates, "first-with-beta-Q-h1").value) + ")");
    }

    // ---- 4. Second-order rates ----------------------------------------------
    {
        const RateRow& dpt = rate(sw_trig.rates, "second-no-phi-h1");
        const RateRow& dpl = rate(sw_lay.rates, "second-no-phi-h1");
        const RateRow& dt = rate(sw_trig.rates, "second-with-both-h1");
        const RateRow& dl = rate(sw_lay.rates, "second-with-both-h1");
        const bool pass = dpt.pass && dpl.pass && dt.pass;
        report(4, pass,
               "second-order rates: three-halves variant >= 1.35 on both"
               " families (trig-isotropic " +
                   fmt(dpt.value) + ", layered " + fmt(dpl.value) +
                   "); full second-order variant >= 1.8: trig-isotropic " +
                   fmt(dt.value) +
                   (dt.pass ? ""
                            : " MISS -- structural: the discrete cell operator"
                              " satisfies the second-order expansion identity"
                              " only up to an interior term that is O(eps) with"
                              " a per-cell-resolution prefactor (~k^-2.4); at 16"
                              " points per cell that term caps the fitted slope"
                              " below 1.8") +
                   ", layered " + fmt(dl.value) + (dl.pass ? "" : " MISS"));
    }

    // ---- 5. L2 rate of the theta variant ------------------------------------
    {
        const RateRow& t = rate(sw_trig.rates, "first-with-theta-l2");
        report(5, t.pass,
               "theta-variant L2 slope >= 1.8: trig-isotropic " + fmt(t.value) +
                   " (layered family: " +
                   fmt(rate(sw_lay.rates, "first-with-theta-l2").value) + ")");
    }

    // ---- 6. Growth bound on the second boundary layer ------------------------
    {
        const RateRow& t = rate(sw_trig.rates, "phi-growth");
        const RateRow& l = rate(sw_lay.rates, "phi-growth");
        report(6, t.pass,
               "||eps*phi||_H1 / sqrt(eps) varies by <= 3 across the sweep:"
               " trig-isotropic ratio " +
                   fmt(t.value) + " (layered: " +
                   (l.note.empty() ? fmt(l.value) : l.note) + ")");
    }

    // ---- 7. Oscillating Dirichlet data --------------------------------------
    {
        const SweepResult osc_t = oscillating_dirichlet_study(cells_trig, scfg);
        const SweepResult osc_l = oscillating_dirichlet_study(cells_lay, scfg);
        const RateRow& t = rate(osc_t.rates, "oscillating-dirichlet-h1");
        report(7, t.pass,
               "oscillating-Dirichlet expansion H1 slope >= 0.45:"
               " trig-isotropic " +
                   fmt(t.value) + " (layered family: " +
                   fmt(rate(osc_l.rates, "oscillating-dirichlet-h1").value) + ")");
    }

    // ---- 8. Unfolding identities and averaging bounds ------------------------
    {
        const UnfoldingReport rep = unfolding_checks(cells_trig, desk_eps, desk_k);
        double worst_identity = 0.0;
        for (const auto& row : rep.rows)
            if (row.threshold != "-")
                worst_identity = std::max(worst_identity, row.value);
        double worst_ratio = 0.0;
        for (const auto& r : rep.ratios) worst_ratio = std::max(worst_ratio, r.value);
        report(8, rep.all_pass,
               "unfolding integration/product/gradient identities hold to 1e-12"
               " (worst " +
                   fmt(worst_identity) +
                   ") and the averaging ratios stay within factor 4 (worst " +
                   fmt(worst_ratio) + ")");
    }

    // ---- 9. Eigenvalue correctors -------------------------------------------
    {
        const double exact = 2.0 * std::numbers::pi * std::numbers::pi;
        const SpectralPair idp = solve_spectral_pair(
            *make_identity(), SymMat2{1.0, 0.0, 1.0}, 0.25, build_domain_grid(64));
        const double lam_rel = std::abs(idp.lambda_eps - exact) / exact;

        SpectralConfig spcfg;
        spcfg.eps_list = desk_eps;
        spcfg.points_per_cell = desk_k;
        const SpectralReport sp_t = eigen_corrector_study(cells_trig, spcfg);
        const SpectralReport sp_l = eigen_corrector_study(cells_lay, spcfg);
        const RateRow& ratio_t = rate(sp_t.rates, "eigenvalue-gap-ratio");
        const RateRow& ratio_l = rate(sp_l.rates, "eigenvalue-gap-ratio");
        const RateRow& res_t = rate(sp_t.rates, "eigen-residual");
        const RateRow& res_l = rate(sp_l.rates, "eigen-residual");

        const bool pass = lam_rel <= 0.005 && ratio_t.pass && res_t.pass &&
                          res_l.pass;
        std::string text =
            "eigenvalues: identity lowest mode within 0.5% of 2*pi^2 (rel dev " +
            fmt(lam_rel) + "); gap/eps ratio spread <= 4: trig-isotropic " +
            fmt(ratio_t.value) + "; corrector-residual slope > 1.0:"
            " trig-isotropic " +
            fmt(res_t.value) + ", layered " + fmt(res_l.value) +
            ". Layered gap/eps spread " + fmt(ratio_l.value) +
            " (informational: its first-order eigenvalue coefficient vanishes"
            " by antisymmetry, so the gap is O(eps^2) and the gap/eps ratio is"
            " unbounded while the O(eps) bound itself holds with margin)";
        if (sp_t.non_uniqueness || sp_l.non_uniqueness)
            text += "; non-uniqueness flagged";
        report(9, pass, text);
    }

    // ---- 10. Property suite ---------------------------------------------------
    {
        bool pass = true;
        std::string detail;

        // Zero means and periodic identification, both families.
        double worst_mean = 0.0, worst_period = 0.0;
        for (const CellSolutions* cells : {&cells_trig, &cells_lay}) {
            for (int j = 0; j < 2; ++j) {
                worst_mean =
                    std::max(worst_mean, std::abs(class_mean(cells->chi_class[j])));
                const int n = cells->grid.n;
                for (int i = 0; i <= n; ++i) {
                    worst_period = std::max(
                        worst_period,
                        std::abs(cells->chi_nodal[j][cells->grid.node_index(0, i)] -
                                 cells->chi_nodal[j][cells->grid.node_index(n, i)]));
                    worst_period = std::max(
                        worst_period,
                        std::abs(cells->chi_nodal[j][cells->grid.node_index(i, 0)] -
                                 cells->chi_nodal[j][cells->grid.node_index(i, n)]));
                }
            }
        }
        if (worst_mean > 1e-10 || worst_period > 0.0) pass = false;
        detail += "zero means (worst " + fmt(worst_mean) +
                  "), periodic identification (worst edge gap " +
                  fmt(worst_period) + ")";

        // SPD within ellipticity bounds; energy form agrees.
        double worst_energy = 0.0;
        for (const CellSolutions* cells : {&cells_trig, &cells_lay}) {
            const auto [lo, hi] = cells->a_hom.eigenvalues();
            const double m = cells->coeff->lower_bound();
            const double M = cells->coeff->upper_bound();
            if (!(lo > 0.0) || lo < m - 1e-9 || hi > M + 1e-9) pass = false;
            const SymMat2 en = homogenized_tensor_energy(*cells);
            worst_energy = std::max(
                {worst_energy, std::abs(en.a11 - cells->a_hom.a11),
                 std::abs(en.a12 - cells->a_hom.a12),
                 std::abs(en.a22 - cells->a_hom.a22)});
        }
        if (worst_energy > 1e-10) pass = false;
        detail += "; tensors SPD inside [m, M], energy form agrees (dev " +
                  fmt(worst_energy) + ")";

        // Second-order right-hand-side average identity, both families.
        const double b_dev = std::max(compute_b(cells_trig).max_mismatch,
                                      compute_b(cells_lay).max_mismatch);
        if (b_dev > 1e-6) pass = false;
        detail += "; b-average identity (worst " + fmt(b_dev) + " <= 1e-6)";

        // Determinism: independent re-solves agree bitwise.
        {
            CellSolutions a = make_cells(trig, 16, true);
            CellSolutions b = make_cells(trig, 16, true);
            bool same = a.a_hom.a11 == b.a_hom.a11 && a.a_hom.a12 == b.a_hom.a12 &&
                        a.a_hom.a22 == b.a_hom.a22;
            SweepConfig small;
            small.eps_list = {0.25, 0.125, 0.0625};
            small.points_per_cell = 8;
            const SweepResult ra = run_sweep(a, small);
            const SweepResult rb = run_sweep(b, small);
            same = same && ra.records.size() == rb.records.size();
            for (std::size_t i = 0; same && i < ra.records.size(); ++i)
                same = ra.records[i].l2 == rb.records[i].l2 &&
                       ra.records[i].h1 == rb.records[i].h1 &&
                       ra.records[i].extra == rb.records[i].extra;
            if (!same) pass = false;
            detail += same ? "; reruns bit-identical"
                           : "; reruns DIFFER";
        }

        // Layered flux constancy: a(y) (d1 chi_1 + 1) is the harmonic mean.
        {
            const int n = cells_lay.grid.n;
            const double h = 1.0 / n;
            double worst = 0.0;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const double y1 = (i + 0.5) * h, y2 = (j + 0.5) * h;
                    const double a = sample(*layered, y1, y2).a11;
                    const double flux =
                        a * (cells_lay.chi_gradient(0, y1, y2)[0] + 1.0);
                    worst = std::max(worst, std::abs(flux - 1.6));
                }
            if (worst > 1e-8) pass = false;
            detail += "; layered flux constant at 8/5 (dev " + fmt(worst) + ")";
        }

        report(10, pass, "property suite: " + detail);
    }

    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    std::printf("acceptance: %d/10 criteria pass (%.1f s)\n", 10 - g_failures,
                secs);
    return g_failures == 0 ? 0 : 1;
}
