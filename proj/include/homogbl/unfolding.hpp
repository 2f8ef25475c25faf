#pragma once

#include "homogbl/assembly.hpp"
#include "homogbl/grid.hpp"

#include <functional>
#include <vector>

namespace homogbl {

// eps must be the reciprocal of a positive integer K (then the domain is an
// exact union of eps-cells and the unfolding identities hold to machine
// precision); returns K or raises unsupported-scale.
int cells_per_side(double eps);

enum class UnfoldSampling {
    gauss, // 2x2 Gauss points of each sample-grid element (integrals, gradients)
    nodes, // sample-grid nodes (continuity checks, exact re-indexing)
};

// T_eps(phi)(x, y) = phi(eps*[x/eps] + eps*y) sampled per cell xi on a
// reference grid over Y.  values[cell][sample]: cells in row-major order
// (xi_y * K + xi_x); samples element-major then Gauss-point order for gauss
// mode, node order for nodes mode.
struct UnfoldedField {
    double eps = 0.0;
    int k = 0;        // cells per side
    int sample_n = 0; // sample-grid elements per side
    UnfoldSampling mode = UnfoldSampling::gauss;
    std::vector<std::vector<double>> values;

    std::size_t samples_per_cell() const {
        return mode == UnfoldSampling::gauss
                   ? static_cast<std::size_t>(sample_n) * sample_n * 4
                   : static_cast<std::size_t>(sample_n + 1) * (sample_n + 1);
    }
};

UnfoldedField unfold(const ScalarFn& phi, double eps, int sample_n,
                     UnfoldSampling mode = UnfoldSampling::gauss);
UnfoldedField unfold(const Grid& grid, const std::vector<double>& nodal, double eps,
                     int sample_n, UnfoldSampling mode = UnfoldSampling::gauss);

// (1/|Y|) * sum_cells eps^2 * int_Y of the unfolded samples; equals the
// direct domain quadrature exactly for reciprocal-integer eps.
double integrate_unfolded(const UnfoldedField& u);

// Direct Gauss quadrature of a function over the domain with per-cell
// resolution sample_n (the comparison side of the integration identity).
double integrate_domain(const ScalarFn& phi, double eps, int sample_n);

// max over interior Gauss points of |grad_y T_eps(u) - eps T_eps(grad u)|
// for a Q1 nodal field; the fine grid must be an integer refinement of the
// eps-cells.
double gradient_rule_check(const Grid& grid, const std::vector<double>& nodal,
                           double eps);

// Per-cell averages M_Y^eps(phi), row-major over cells.
struct CellAverageField {
    double eps = 0.0;
    int k = 0;
    std::vector<double> means;

    double at(int cx, int cy) const { return means[static_cast<std::size_t>(cy) * k + cx]; }
};

CellAverageField cell_average(const ScalarFn& phi, double eps, int sample_n = 16);
// Exact per-cell averages of a Q1 field whose grid refines the eps-cells.
CellAverageField cell_average(const Grid& grid, const std::vector<double>& nodal,
                              double eps);

// Q_eps: continuous piecewise-multilinear interpolation of the cell
// averages, anchored at cell origins (Q_eps(phi)(eps*xi) = mean over cell
// xi).  The evaluation needs one layer of means outside the domain; they
// come from analytic integration when phi is a function, or by constant
// extension of the nearest interior cell otherwise.
class QInterp {
public:
    QInterp(double eps, int k, std::vector<double> knot_means);

    double operator()(double x1, double x2) const;
    double eps() const { return eps_; }

private:
    double eps_;
    int k_;
    std::vector<double> knots_; // (k+1)^2 means, row-major, ghost layer included
};

QInterp q_interp(const ScalarFn& phi, double eps, int sample_n = 16);
QInterp q_interp(const Grid& grid, const std::vector<double>& nodal, double eps);

// rho_eps(x) = min(dist(x, boundary)/eps, 1) on the unit square.
double rho_cutoff(double x1, double x2, double eps);

// L2 ratios of Prop-style averaging estimates for a smooth v:
//   ||v - M^eps v|| / eps, ||v - Q_eps v|| / eps, ||Q_eps v - M^eps v|| / eps;
// each stays bounded as eps halves.
struct AveragingRatios {
    double v_minus_mean = 0.0;
    double v_minus_q = 0.0;
    double q_minus_mean = 0.0;
};

AveragingRatios averaging_ratios(const ScalarFn& v, double eps, int sample_n = 16);

// Local-average inequality ratio for a cell field Phi and a smooth psi:
//   int |grad_y Phi(x/eps)|^2 (psi - M^eps psi)^2 dx
//   ------------------------------------------------ ,
//   eps^2 * ||psi||_{H1}^2
// bounded across the eps sweep.  psi_grad supplies the analytic gradient
// for the H1 norm.
double local_average_ratio(const Grid& cell_grid, const std::vector<double>& phi_nodal,
                           const ScalarFn& psi,
                           const std::function<std::array<double, 2>(double, double)>& psi_grad,
                           double eps);

} // namespace homogbl
