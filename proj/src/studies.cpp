#include "homogbl/studies.hpp"

#include "homogbl/errors.hpp"
#include "homogbl/fields.hpp"
#include "homogbl/unfolding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace homogbl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kExactTol = 1e-12;

double f1(double x1, double x2) { return std::cos(2.0 * kPi * x1) * (x2 * x2 + 0.5); }
double f2(double x1, double x2) { return std::sin(2.0 * kPi * x2) + x1; }
double psi(double x1, double x2) { return std::sin(kPi * x1) * std::sin(kPi * x2); }
std::array<double, 2> psi_grad(double x1, double x2) {
    return {kPi * std::cos(kPi * x1) * std::sin(kPi * x2),
            kPi * std::sin(kPi * x1) * std::cos(kPi * x2)};
}

RateRow bounded_ratio_row(const std::string& kind, const std::vector<double>& values) {
    RateRow row;
    row.kind = kind;
    row.threshold = "max/min <= 4";
    if (values.size() < 2) {
        row.value = std::numeric_limits<double>::infinity();
        row.pass = false;
        row.note = "fewer than 2 sweep points";
        return row;
    }
    const double mx = *std::max_element(values.begin(), values.end());
    const double mn = *std::min_element(values.begin(), values.end());
    row.value = mn > 0.0 ? mx / mn : std::numeric_limits<double>::infinity();
    row.pass = row.value <= 4.0;
    return row;
}

} // namespace

UnfoldingReport unfolding_checks(const CellSolutions& cells,
                                 const std::vector<double>& eps_list,
                                 int points_per_cell) {
    UnfoldingReport report;
    std::vector<double> r_mean, r_q, r_qmean, r_local;

    for (double eps : eps_list) {
        try {
            const int cps = cells_per_side(eps);
            const int k = points_per_cell;

            // Integration identity: the unfolded integral over all cells
            // equals the direct domain quadrature at the same Gauss points.
            {
                const UnfoldedField uf = unfold(f1, eps, k);
                const double lhs = integrate_unfolded(uf);
                const double rhs = integrate_domain(f1, eps, k);
                const double diff = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
                report.rows.push_back(CheckRow{"integration-identity", eps, diff,
                                               "<= 1e-12", diff <= kExactTol});
            }

            // Product rule: unfolding commutes with pointwise products.
            {
                const UnfoldedField ua = unfold(f1, eps, k);
                const UnfoldedField ub = unfold(f2, eps, k);
                const UnfoldedField uab = unfold(
                    [](double x1, double x2) { return f1(x1, x2) * f2(x1, x2); }, eps,
                    k);
                double worst = 0.0;
                for (std::size_t c = 0; c < ua.values.size(); ++c)
                    for (std::size_t s = 0; s < ua.values[c].size(); ++s)
                        worst = std::max(worst,
                                         std::abs(uab.values[c][s] -
                                                  ua.values[c][s] * ub.values[c][s]));
                report.rows.push_back(CheckRow{"product-rule", eps, worst, "<= 1e-12",
                                               worst <= kExactTol});
            }

            // Gradient rule: grad_y of the unfolded field equals eps times
            // the unfolded gradient at interior Gauss points.
            {
                const Grid fine = build_domain_grid(cps * k);
                const std::vector<double> nodal = interpolate(fine, psi);
                const double worst = gradient_rule_check(fine, nodal, eps);
                report.rows.push_back(CheckRow{"gradient-rule", eps, worst, "<= 1e-12",
                                               worst <= kExactTol});
            }

            // Averaging ratios (informational rows; verdicts are the
            // boundedness of each sequence across the sweep).
            {
                const AveragingRatios ar = averaging_ratios(psi, eps, k);
                report.rows.push_back(
                    CheckRow{"avg-v-minus-mean", eps, ar.v_minus_mean, "-", true});
                report.rows.push_back(
                    CheckRow{"avg-v-minus-q", eps, ar.v_minus_q, "-", true});
                report.rows.push_back(
                    CheckRow{"avg-q-minus-mean", eps, ar.q_minus_mean, "-", true});
                r_mean.push_back(ar.v_minus_mean);
                r_q.push_back(ar.v_minus_q);
                r_qmean.push_back(ar.q_minus_mean);
            }
            {
                const double ratio = local_average_ratio(
                    cells.grid, cells.chi_nodal[0], psi, psi_grad, eps);
                report.rows.push_back(
                    CheckRow{"local-average", eps, ratio, "-", true});
                r_local.push_back(ratio);
            }
        } catch (const error& e) {
            report.failures.push_back("eps=" + std::to_string(eps) + ": " + e.what());
            report.all_pass = false;
        }
    }

    report.ratios.push_back(bounded_ratio_row("avg-v-minus-mean-ratio", r_mean));
    report.ratios.push_back(bounded_ratio_row("avg-v-minus-q-ratio", r_q));
    report.ratios.push_back(bounded_ratio_row("avg-q-minus-mean-ratio", r_qmean));
    report.ratios.push_back(bounded_ratio_row("local-average-ratio", r_local));

    for (const auto& row : report.rows) report.all_pass = report.all_pass && row.pass;
    for (const auto& row : report.ratios)
        report.all_pass = report.all_pass && row.pass;
    return report;
}

} // namespace homogbl
