#include "homogbl/unfolding.hpp"

#include "homogbl/errors.hpp"
#include "homogbl/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace homogbl {

int cells_per_side(double eps) {
    if (!(eps > 0.0) || eps > 1.0)
        fail("unsupported-scale", "eps must lie in (0, 1]");
    const double kd = 1.0 / eps;
    const int k = static_cast<int>(std::lround(kd));
    if (k < 1 || std::abs(kd - k) > 1e-12 * kd)
        fail("unsupported-scale",
             "eps = " + std::to_string(eps) + " is not the reciprocal of an integer");
    return k;
}

namespace {

template <typename Eval>
UnfoldedField unfold_impl(Eval&& at, double eps, int sample_n, UnfoldSampling mode) {
    const int k = cells_per_side(eps);
    if (sample_n < 1) fail("invalid-resolution", "sample grid needs at least 1 element");
    UnfoldedField out;
    out.eps = eps;
    out.k = k;
    out.sample_n = sample_n;
    out.mode = mode;
    out.values.resize(static_cast<std::size_t>(k) * k);
    const double hs = 1.0 / sample_n;
    for (int cy = 0; cy < k; ++cy) {
        for (int cx = 0; cx < k; ++cx) {
            auto& cell = out.values[static_cast<std::size_t>(cy) * k + cx];
            cell.reserve(mode == UnfoldSampling::gauss
                             ? static_cast<std::size_t>(sample_n) * sample_n * 4
                             : static_cast<std::size_t>(sample_n + 1) * (sample_n + 1));
            if (mode == UnfoldSampling::gauss) {
                for (int ey = 0; ey < sample_n; ++ey)
                    for (int ex = 0; ex < sample_n; ++ex)
                        for (int q = 0; q < 4; ++q) {
                            auto [xi, eta] = q1::gauss_point(q);
                            const double y1 = (ex + xi) * hs;
                            const double y2 = (ey + eta) * hs;
                            cell.push_back(at(eps * (cx + y1), eps * (cy + y2)));
                        }
            } else {
                for (int j = 0; j <= sample_n; ++j)
                    for (int i = 0; i <= sample_n; ++i)
                        cell.push_back(at(eps * (cx + i * hs), eps * (cy + j * hs)));
            }
        }
    }
    return out;
}

} // namespace

UnfoldedField unfold(const ScalarFn& phi, double eps, int sample_n, UnfoldSampling mode) {
    return unfold_impl(phi, eps, sample_n, mode);
}

UnfoldedField unfold(const Grid& grid, const std::vector<double>& nodal, double eps,
                     int sample_n, UnfoldSampling mode) {
    return unfold_impl(
        [&](double x1, double x2) {
            return fe_value(grid, nodal, std::min(x1, 1.0), std::min(x2, 1.0));
        },
        eps, sample_n, mode);
}

double integrate_unfolded(const UnfoldedField& u) {
    if (u.mode != UnfoldSampling::gauss)
        fail("bad-constraint", "integration needs Gauss sampling");
    const double w = (1.0 / u.sample_n) * (1.0 / u.sample_n) / 4.0;
    double total = 0.0;
    for (const auto& cell : u.values) {
        double s = 0.0;
        for (double v : cell) s += v;
        total += u.eps * u.eps * w * s;
    }
    return total;
}

double integrate_domain(const ScalarFn& phi, double eps, int sample_n) {
    const int k = cells_per_side(eps);
    const int n = k * sample_n;
    const double h = 1.0 / n;
    const double w = h * h / 4.0;
    double total = 0.0;
    for (int ey = 0; ey < n; ++ey)
        for (int ex = 0; ex < n; ++ex)
            for (int q = 0; q < 4; ++q) {
                auto [xi, eta] = q1::gauss_point(q);
                total += w * phi((ex + xi) * h, (ey + eta) * h);
            }
    return total;
}

double gradient_rule_check(const Grid& grid, const std::vector<double>& nodal,
                           double eps) {
    const int k = cells_per_side(eps);
    if (grid.n % k != 0)
        fail("grid-incompatibility",
             "fine grid must be an integer refinement of the eps-cells");
    const int sn = grid.n / k; // sample elements per cell side
    const double hs = 1.0 / sn;
    double max_dev = 0.0;
    // Per cell: nodal re-indexed samples form the unfolded field; its Q1
    // y-gradient at Gauss points must equal eps times the fine-field
    // gradient at the mapped points.
    std::vector<double> cell_vals(static_cast<std::size_t>(sn + 1) * (sn + 1));
    Grid sample_grid{GridKind::cell_periodic, sn};
    for (int cy = 0; cy < k; ++cy) {
        for (int cx = 0; cx < k; ++cx) {
            for (int j = 0; j <= sn; ++j)
                for (int i = 0; i <= sn; ++i)
                    cell_vals[static_cast<std::size_t>(j) * (sn + 1) + i] =
                        nodal[grid.node_index(cx * sn + i, cy * sn + j)];
            for (int ey = 0; ey < sn; ++ey)
                for (int ex = 0; ex < sn; ++ex)
                    for (int q = 0; q < 4; ++q) {
                        auto [xi, eta] = q1::gauss_point(q);
                        const double y1 = (ex + xi) * hs;
                        const double y2 = (ey + eta) * hs;
                        const auto gy = fe_gradient(sample_grid, cell_vals, y1, y2);
                        const auto gx = fe_gradient(grid, nodal, eps * (cx + y1),
                                                    eps * (cy + y2));
                        max_dev = std::max(max_dev, std::abs(gy[0] - eps * gx[0]));
                        max_dev = std::max(max_dev, std::abs(gy[1] - eps * gx[1]));
                    }
        }
    }
    return max_dev;
}

CellAverageField cell_average(const ScalarFn& phi, double eps, int sample_n) {
    const int k = cells_per_side(eps);
    CellAverageField out;
    out.eps = eps;
    out.k = k;
    out.means.resize(static_cast<std::size_t>(k) * k);
    const double hs = 1.0 / sample_n;
    const double w = hs * hs / 4.0; // reference-cell quadrature: mean directly
    for (int cy = 0; cy < k; ++cy)
        for (int cx = 0; cx < k; ++cx) {
            double s = 0.0;
            for (int ey = 0; ey < sample_n; ++ey)
                for (int ex = 0; ex < sample_n; ++ex)
                    for (int q = 0; q < 4; ++q) {
                        auto [xi, eta] = q1::gauss_point(q);
                        s += w * phi(eps * (cx + (ex + xi) * hs),
                                     eps * (cy + (ey + eta) * hs));
                    }
            out.means[static_cast<std::size_t>(cy) * k + cx] = s;
        }
    return out;
}

CellAverageField cell_average(const Grid& grid, const std::vector<double>& nodal,
                              double eps) {
    const int k = cells_per_side(eps);
    if (grid.n % k != 0)
        fail("grid-incompatibility",
             "fine grid must be an integer refinement of the eps-cells");
    const int sn = grid.n / k;
    return cell_average(
        [&](double x1, double x2) {
            return fe_value(grid, nodal, std::min(x1, 1.0), std::min(x2, 1.0));
        },
        eps, sn);
}

QInterp::QInterp(double eps, int k, std::vector<double> knot_means)
    : eps_(eps), k_(k), knots_(std::move(knot_means)) {
    if (knots_.size() != static_cast<std::size_t>(k_ + 1) * (k_ + 1))
        fail("grid-incompatibility", "Q_eps needs (k+1)^2 knot means");
}

double QInterp::operator()(double x1, double x2) const {
    const double t1 = x1 / eps_;
    const double t2 = x2 / eps_;
    const int i = std::clamp(static_cast<int>(std::floor(t1)), 0, k_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor(t2)), 0, k_ - 1);
    const double u = t1 - i;
    const double v = t2 - j;
    const auto knot = [&](int a, int b) {
        return knots_[static_cast<std::size_t>(b) * (k_ + 1) + a];
    };
    return (1 - u) * (1 - v) * knot(i, j) + u * (1 - v) * knot(i + 1, j) +
           u * v * knot(i + 1, j + 1) + (1 - u) * v * knot(i, j + 1);
}

QInterp q_interp(const ScalarFn& phi, double eps, int sample_n) {
    const int k = cells_per_side(eps);
    // Means over all cells reachable by the interpolation stencil, including
    // one ghost layer outside the domain, integrated analytically.
    std::vector<double> knots(static_cast<std::size_t>(k + 1) * (k + 1));
    const double hs = 1.0 / sample_n;
    const double w = hs * hs / 4.0;
    for (int cy = 0; cy <= k; ++cy)
        for (int cx = 0; cx <= k; ++cx) {
            double s = 0.0;
            for (int ey = 0; ey < sample_n; ++ey)
                for (int ex = 0; ex < sample_n; ++ex)
                    for (int q = 0; q < 4; ++q) {
                        auto [xi, eta] = q1::gauss_point(q);
                        s += w * phi(eps * (cx + (ex + xi) * hs),
                                     eps * (cy + (ey + eta) * hs));
                    }
            knots[static_cast<std::size_t>(cy) * (k + 1) + cx] = s;
        }
    return QInterp(eps, k, std::move(knots));
}

QInterp q_interp(const Grid& grid, const std::vector<double>& nodal, double eps) {
    const auto base = cell_average(grid, nodal, eps);
    const int k = base.k;
    std::vector<double> knots(static_cast<std::size_t>(k + 1) * (k + 1));
    for (int cy = 0; cy <= k; ++cy)
        for (int cx = 0; cx <= k; ++cx)
            knots[static_cast<std::size_t>(cy) * (k + 1) + cx] =
                base.at(std::min(cx, k - 1), std::min(cy, k - 1));
    return QInterp(eps, k, std::move(knots));
}

double rho_cutoff(double x1, double x2, double eps) {
    const double d = std::min(std::min(x1, 1.0 - x1), std::min(x2, 1.0 - x2));
    return std::min(std::max(d, 0.0) / eps, 1.0);
}

AveragingRatios averaging_ratios(const ScalarFn& v, double eps, int sample_n) {
    const int k = cells_per_side(eps);
    const auto means = cell_average(v, eps, sample_n);
    const auto q = q_interp(v, eps, sample_n);
    const double hs = 1.0 / sample_n;
    const double w = eps * eps * hs * hs / 4.0;
    double s_mean = 0.0, s_q = 0.0, s_qm = 0.0;
    for (int cy = 0; cy < k; ++cy)
        for (int cx = 0; cx < k; ++cx) {
            const double m = means.at(cx, cy);
            for (int ey = 0; ey < sample_n; ++ey)
                for (int ex = 0; ex < sample_n; ++ex)
                    for (int qq = 0; qq < 4; ++qq) {
                        auto [xi, eta] = q1::gauss_point(qq);
                        const double x1 = eps * (cx + (ex + xi) * hs);
                        const double x2 = eps * (cy + (ey + eta) * hs);
                        const double vv = v(x1, x2);
                        const double qv = q(x1, x2);
                        s_mean += w * (vv - m) * (vv - m);
                        s_q += w * (vv - qv) * (vv - qv);
                        s_qm += w * (qv - m) * (qv - m);
                    }
        }
    AveragingRatios out;
    out.v_minus_mean = std::sqrt(s_mean) / eps;
    out.v_minus_q = std::sqrt(s_q) / eps;
    out.q_minus_mean = std::sqrt(s_qm) / eps;
    return out;
}

double local_average_ratio(const Grid& cell_grid, const std::vector<double>& phi_nodal,
                           const ScalarFn& psi,
                           const std::function<std::array<double, 2>(double, double)>& psi_grad,
                           double eps) {
    const int k = cells_per_side(eps);
    const int sn = cell_grid.n; // sample at the cell grid's own resolution
    const auto psi_means = cell_average(psi, eps, sn);
    const double hs = 1.0 / sn;
    const double w = eps * eps * hs * hs / 4.0;
    double lhs = 0.0;
    double psi_h1 = 0.0;
    for (int cy = 0; cy < k; ++cy)
        for (int cx = 0; cx < k; ++cx) {
            const double m = psi_means.at(cx, cy);
            for (int ey = 0; ey < sn; ++ey)
                for (int ex = 0; ex < sn; ++ex)
                    for (int q = 0; q < 4; ++q) {
                        auto [xi, eta] = q1::gauss_point(q);
                        const double y1 = (ex + xi) * hs;
                        const double y2 = (ey + eta) * hs;
                        const double x1 = eps * (cx + y1);
                        const double x2 = eps * (cy + y2);
                        const auto g = fe_gradient(cell_grid, phi_nodal, y1, y2);
                        const double psv = psi(x1, x2);
                        const auto psg = psi_grad(x1, x2);
                        const double d = psv - m;
                        lhs += w * (g[0] * g[0] + g[1] * g[1]) * d * d;
                        psi_h1 += w * (psv * psv + psg[0] * psg[0] + psg[1] * psg[1]);
                    }
        }
    if (psi_h1 <= 0.0) return 0.0;
    return lhs / (eps * eps * psi_h1);
}

} // namespace homogbl
