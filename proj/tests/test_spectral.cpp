#include "doctest.h"

#include "checks.hpp"
#include "homogbl/fields.hpp"
#include "homogbl/spectral.hpp"

#include <cmath>
#include <numbers>

using namespace homogbl;

namespace {

constexpr double pi = std::numbers::pi;

CellSolutions make_cells(const CoefficientPtr& coeff, int n) {
    CellSolutions cells =
        solve_first_cell(build_cell_grid(n, coeff->discontinuous()), coeff);
    homogenized_tensor(cells);
    return cells;
}

const RateRow& row_for(const std::vector<RateRow>& rows, const std::string& kind) {
    for (const auto& r : rows)
        if (r.kind == kind) return r;
    REQUIRE(false);
    return rows.front();
}

} // namespace

TEST_CASE("the identity medium's lowest mode matches the Laplace eigenvalue") {
    const SymMat2 identity{1.0, 0.0, 1.0};
    const Grid fine = build_domain_grid(64);
    const SpectralPair pair =
        solve_spectral_pair(*make_identity(), identity, 0.25, fine);

    const double exact = 2.0 * pi * pi;
    CHECK(std::abs(pair.lambda_hom - exact) <= 0.005 * exact);
    CHECK(std::abs(pair.lambda_eps - exact) <= 0.005 * exact);
    // The oscillating operator IS the constant one here.
    CHECK(std::abs(pair.lambda_eps - pair.lambda_hom) <= 1e-6 * exact);

    // Mass-normalized, sign fixed to positive integral, peak at the center.
    NormContext nc(fine);
    CHECK(std::abs(nc.l2(pair.v) - 1.0) <= 1e-6);
    CHECK(nc.integral(pair.v) > 0.0);
    CHECK(fe_value(fine, pair.v, 0.5, 0.5) == doctest::Approx(2.0).epsilon(2e-2));
    for (int idx : fine.boundary_nodes()) CHECK(pair.v[idx] == 0.0);
}

TEST_CASE("constant isotropic tensors scale the Laplace eigenvalue exactly") {
    const Grid fine = build_domain_grid(32);
    const SymMat2 identity{1.0, 0.0, 1.0};
    const SpectralPair base =
        solve_spectral_pair(*make_identity(), identity, 0.25, fine);

    const double a = 1.9354;
    const SymMat2 scaled{a, 0.0, a};
    const SpectralPair sc = solve_spectral_pair(*make_identity(), scaled, 0.25, fine);
    CHECK(sc.lambda_hom ==
          doctest::Approx(a * base.lambda_hom).epsilon(1e-6));

    // An anisotropic tensor pins the mode between its extreme eigenvalues.
    const SymMat2 aniso{2.0, 0.5, 3.0};
    const auto [lo, hi] = aniso.eigenvalues();
    const SpectralPair an = solve_spectral_pair(*make_identity(), aniso, 0.25, fine);
    CHECK(an.lambda_hom >= lo * base.lambda_hom * (1.0 - 1e-8));
    CHECK(an.lambda_hom <= hi * base.lambda_hom * (1.0 + 1e-8));

    // Oscillating coefficients obey the same variational envelope.
    const CoefficientPtr trig = make_trig_isotropic(2.0, 1.0);
    const SpectralPair osc = solve_spectral_pair(*trig, identity, 0.25, fine);
    CHECK(osc.lambda_eps >= trig->lower_bound() * base.lambda_hom * (1.0 - 1e-8));
    CHECK(osc.lambda_eps <= trig->upper_bound() * base.lambda_hom * (1.0 + 1e-8));

    CHECK(checks::thrown_code([&] {
              solve_spectral_pair(*make_identity(), identity, 0.25,
                                  build_cell_grid(16));
          }) == "bad-constraint");
}

TEST_CASE("eigen boundary layers carry the corrector trace structure") {
    const Grid fine = build_domain_grid(32);
    const SymMat2 identity{1.0, 0.0, 1.0};

    // Identity cells: zero correctors leave only solver noise in the layer.
    CellSolutions id_cells = make_cells(make_identity(), 8);
    const SpectralPair pair = solve_spectral_pair(*make_identity(), identity, 0.25, fine);
    const auto quiet = eigen_boundary_layer(id_cells, pair.v, 0.25, fine);
    double mx = 0.0;
    for (double v : quiet) mx = std::max(mx, std::abs(v));
    CHECK(mx <= 1e-8);

    // Layered cells: vertical edges sample chi_1 at the cell origin (-0.15),
    // horizontal edges multiply the vanishing chi_2.
    CellSolutions lay = make_cells(make_layered(1.0, 4.0), 8);
    const SpectralPair lp =
        solve_spectral_pair(*lay.coeff, lay.a_hom, 0.25, fine);
    const auto layer = eigen_boundary_layer(lay, lp.v, 0.25, fine);
    const int nf = fine.n;
    const double inv2h = nf / 2.0;
    auto vat = [&](int i, int j) { return lp.v[fine.node_index(i, j)]; };
    for (int j = 1; j < nf; ++j) {
        const double dleft = (4.0 * vat(1, j) - vat(2, j)) * inv2h;
        CHECK(layer[fine.node_index(0, j)] ==
              doctest::Approx(-0.15 * dleft).epsilon(1e-7));
    }
    for (int i = 1; i < nf; ++i) {
        CHECK(std::abs(layer[fine.node_index(i, 0)]) <= 1e-9);
        CHECK(std::abs(layer[fine.node_index(i, nf)]) <= 1e-9);
    }
    CHECK(layer[fine.node_index(0, 0)] == 0.0);
    CHECK(layer[fine.node_index(nf, nf)] == 0.0);

    const std::vector<double> wrong(5, 0.0);
    CHECK(checks::thrown_code([&] {
              eigen_boundary_layer(lay, wrong, 0.25, fine);
          }) == "grid-incompatibility");
    CHECK(checks::thrown_code([&] {
              eigen_boundary_layer(lay, lp.v, 0.25, build_cell_grid(32));
          }) == "bad-constraint");
}

TEST_CASE("the corrector study resolves the first-order eigenvalue gap") {
    CellSolutions cells = make_cells(make_trig_isotropic(2.0, 1.0), 16);
    SpectralConfig cfg;
    cfg.points_per_cell = 8;
    cfg.eps_list = {0.25, 0.125, 0.0625};
    const SpectralReport rep = eigen_corrector_study(cells, cfg);

    CHECK(rep.failures.empty());
    REQUIRE(rep.rows.size() == 3);
    for (const auto& r : rep.rows) {
        CHECK(r.lambda_eps > 0.0);
        CHECK(r.lambda_hom > 0.0);
        CHECK(std::isfinite(r.corrector_integral));
        // The residual really subtracts the corrector formula.
        CHECK(r.residual ==
              doctest::Approx(r.lambda_eps - r.lambda_hom -
                              r.eps * r.lambda_hom * r.corrector_integral)
                  .epsilon(1e-14));
    }

    // The reference tensor is re-resolved at the operator's own per-cell
    // resolution.
    CellSolutions matched = solve_first_cell(build_cell_grid(8), cells.coeff,
                                             cfg.solver);
    homogenized_tensor(matched);
    CHECK(rep.tensor.a11 == doctest::Approx(matched.a_hom.a11).epsilon(1e-12));
    CHECK(rep.tensor.a22 == doctest::Approx(matched.a_hom.a22).epsilon(1e-12));

    SpectralConfig raw = cfg;
    raw.consistent_tensor = false;
    const SpectralReport rep_raw = eigen_corrector_study(cells, raw);
    CHECK(rep_raw.tensor.a11 == cells.a_hom.a11);

    REQUIRE(rep.rates.size() == 3);
    CHECK(rep.rates[0].kind == "eigenvalue-gap");
    CHECK(rep.rates[1].kind == "eigenvalue-gap-ratio");
    CHECK(rep.rates[2].kind == "eigen-residual");
    CHECK(row_for(rep.rates, "eigenvalue-gap").pass);
    CHECK(row_for(rep.rates, "eigenvalue-gap-ratio").pass);
    CHECK(row_for(rep.rates, "eigen-residual").pass);
    CHECK_FALSE(rep.non_uniqueness);
    CHECK(rep.all_pass);
}

TEST_CASE("identity media report eigenvalue gaps at noise level") {
    CellSolutions cells = make_cells(make_identity(), 8);
    SpectralConfig cfg;
    cfg.points_per_cell = 8;
    cfg.eps_list = {0.25, 0.125, 0.0625};
    const SpectralReport rep = eigen_corrector_study(cells, cfg);

    CHECK(rep.failures.empty());
    REQUIRE(rep.rows.size() == 3);
    for (const auto& r : rep.rows)
        CHECK(std::abs(r.lambda_eps - r.lambda_hom) <= 1e-9 * r.lambda_hom);

    for (const char* kind : {"eigenvalue-gap", "eigenvalue-gap-ratio", "eigen-residual"}) {
        const RateRow& row = row_for(rep.rates, kind);
        CHECK(row.pass);
        CHECK(row.note.find("noise") != std::string::npos);
    }
    CHECK(rep.all_pass);
}

TEST_CASE("short eigenvalue series fail their rate rows without throwing") {
    CellSolutions cells = make_cells(make_trig_isotropic(2.0, 1.0), 16);
    SpectralConfig cfg;
    cfg.points_per_cell = 8;
    cfg.eps_list = {0.25, 0.3}; // the second point is not a reciprocal integer
    const SpectralReport rep = eigen_corrector_study(cells, cfg);

    CHECK(rep.rows.size() == 1);
    REQUIRE(rep.failures.size() == 1);
    CHECK(rep.failures[0].find("unsupported-scale") != std::string::npos);

    const RateRow& gap = row_for(rep.rates, "eigenvalue-gap");
    CHECK_FALSE(gap.pass);
    CHECK(gap.note.find("usable") != std::string::npos);
    CHECK_FALSE(row_for(rep.rates, "eigenvalue-gap-ratio").pass);
    CHECK_FALSE(row_for(rep.rates, "eigen-residual").pass);
    CHECK_FALSE(rep.all_pass);
}
