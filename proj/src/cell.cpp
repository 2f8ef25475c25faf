#include "homogbl/cell.hpp"

#include "homogbl/errors.hpp"
#include "homogbl/fields.hpp"
#include "homogbl/parallel.hpp"

#include <cmath>
#include <cstdio>

namespace homogbl {

namespace {

// Fixed-order loop over all elements and their 2x2 Gauss points; fn receives
// the element id, its corner nodes, the physical point, the quadrature
// weight, the shape values, and the physical shape gradients.
template <typename Fn>
void for_each_gauss(const Grid& grid, const Coefficient& coeff, Fn&& fn) {
    const double h = grid.h();
    const double w = h * h / 4.0;
    const double inv_h = 1.0 / h;
    // Reference tables for the 4 Gauss points.
    std::array<std::array<double, 4>, 4> shape_tab;
    std::array<std::array<std::array<double, 2>, 4>, 4> grad_tab;
    for (int q = 0; q < 4; ++q) {
        auto [xi, eta] = q1::gauss_point(q);
        shape_tab[q] = q1::shape(xi, eta);
        auto g = q1::shape_grad(xi, eta);
        for (int a = 0; a < 4; ++a) {
            grad_tab[q][a] = {g[a][0] * inv_h, g[a][1] * inv_h};
        }
    }
    for (int e = 0; e < grid.element_count(); ++e) {
        auto [ex, ey] = grid.element_cell(e);
        const auto nodes = grid.element_nodes(e);
        for (int q = 0; q < 4; ++q) {
            auto [xi, eta] = q1::gauss_point(q);
            const double y1 = (ex + xi) * h;
            const double y2 = (ey + eta) * h;
            const SymMat2 aq = coeff.at(frac_unit(y1), frac_unit(y2));
            fn(e, nodes, aq, w, shape_tab[q], grad_tab[q]);
        }
    }
}

} // namespace

std::vector<double> expand_periodic(const Grid& grid, const std::vector<double>& cls) {
    if (cls.size() != static_cast<std::size_t>(grid.class_count()))
        fail("grid-incompatibility", "class vector size mismatch");
    std::vector<double> nodal(grid.node_count());
    for (int idx = 0; idx < grid.node_count(); ++idx)
        nodal[idx] = cls[grid.periodic_class(idx)];
    return nodal;
}

double CellSolutions::chi_value(int j, double y1, double y2) const {
    return fe_value(grid, chi_nodal[j], frac_unit(y1), frac_unit(y2));
}

std::array<double, 2> CellSolutions::chi_gradient(int j, double y1, double y2) const {
    return fe_gradient(grid, chi_nodal[j], frac_unit(y1), frac_unit(y2));
}

double CellSolutions::chi2_value(int i, int j, double y1, double y2) const {
    return fe_value(grid, chi2_nodal[i][j], frac_unit(y1), frac_unit(y2));
}

std::array<double, 2> CellSolutions::chi2_gradient(int i, int j, double y1,
                                                   double y2) const {
    return fe_gradient(grid, chi2_nodal[i][j], frac_unit(y1), frac_unit(y2));
}

CellSolutions solve_first_cell(const Grid& grid, const CoefficientPtr& coeff,
                               const SolverConfig& cfg) {
    if (grid.kind != GridKind::cell_periodic)
        fail("bad-constraint", "cell problems need a cell-periodic grid");
    CellSolutions cells;
    cells.grid = grid;
    cells.coeff = coeff;
    cells.k_per = assemble_stiffness_periodic(grid, *coeff);

    // rhs_a = -int_Y (A e_j) . grad phi_a, accumulated over periodic classes.
    std::array<std::vector<double>, 2> rhs;
    rhs[0].assign(grid.class_count(), 0.0);
    rhs[1].assign(grid.class_count(), 0.0);
    for_each_gauss(grid, *coeff,
                   [&](int, const std::array<int, 4>& nodes, const SymMat2& aq,
                       double w, const std::array<double, 4>&,
                       const std::array<std::array<double, 2>, 4>& grads) {
                       for (int a = 0; a < 4; ++a) {
                           const int cls = grid.periodic_class(nodes[a]);
                           // column j of A dotted with grad phi_a
                           rhs[0][cls] -= w * (aq.a11 * grads[a][0] + aq.a12 * grads[a][1]);
                           rhs[1][cls] -= w * (aq.a12 * grads[a][0] + aq.a22 * grads[a][1]);
                       }
                   });

    run_tasks(2, [&](std::size_t j) {
        auto sys = apply_periodic_zero_mean(cells.k_per, rhs[j], grid);
        auto result = cg_solve(sys.K, sys.rhs, cfg, nullptr, subtract_mean);
        subtract_mean(result.x);
        cells.chi_class[j] = std::move(result.x);
        cells.chi_nodal[j] = expand_periodic(grid, cells.chi_class[j]);
    });

    homogenized_tensor(cells);
    return cells;
}

namespace {

// Gradient of a class-indexed cell field inside one element, from the
// physical shape gradients.
std::array<double, 2> field_gradient(const Grid& grid, const std::vector<double>& cls,
                                     const std::array<int, 4>& nodes,
                                     const std::array<std::array<double, 2>, 4>& grads) {
    double g1 = 0.0, g2 = 0.0;
    for (int a = 0; a < 4; ++a) {
        const double v = cls[grid.periodic_class(nodes[a])];
        g1 += v * grads[a][0];
        g2 += v * grads[a][1];
    }
    return {g1, g2};
}

double field_value(const Grid& grid, const std::vector<double>& cls,
                   const std::array<int, 4>& nodes, const std::array<double, 4>& shape) {
    double s = 0.0;
    for (int a = 0; a < 4; ++a) s += cls[grid.periodic_class(nodes[a])] * shape[a];
    return s;
}

} // namespace

SymMat2 homogenized_tensor(CellSolutions& cells) {
    const Grid& grid = cells.grid;
    double acc[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for_each_gauss(grid, *cells.coeff,
                   [&](int, const std::array<int, 4>& nodes, const SymMat2& aq, double w,
                       const std::array<double, 4>&,
                       const std::array<std::array<double, 2>, 4>& grads) {
                       for (int j = 0; j < 2; ++j) {
                           const auto gchi =
                               field_gradient(grid, cells.chi_class[j], nodes, grads);
                           const auto flux = aq.apply(gchi);
                           const double col_j1 = j == 0 ? aq.a11 : aq.a12;
                           const double col_j2 = j == 0 ? aq.a12 : aq.a22;
                           acc[0][j] += w * (col_j1 + flux[0]);
                           acc[1][j] += w * (col_j2 + flux[1]);
                       }
                   });
    cells.a_hom = SymMat2{acc[0][0], 0.5 * (acc[0][1] + acc[1][0]), acc[1][1]};
    return cells.a_hom;
}

SymMat2 homogenized_tensor_energy(const CellSolutions& cells) {
    const Grid& grid = cells.grid;
    double acc[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for_each_gauss(grid, *cells.coeff,
                   [&](int, const std::array<int, 4>& nodes, const SymMat2& aq, double w,
                       const std::array<double, 4>&,
                       const std::array<std::array<double, 2>, 4>& grads) {
                       std::array<std::array<double, 2>, 2> dir;
                       for (int j = 0; j < 2; ++j) {
                           auto g = field_gradient(grid, cells.chi_class[j], nodes, grads);
                           g[j] += 1.0; // grad chi_j + e_j
                           dir[j] = g;
                       }
                       for (int i = 0; i < 2; ++i) {
                           const auto adi = aq.apply(dir[i]);
                           for (int j = 0; j < 2; ++j)
                               acc[i][j] += w * (adi[0] * dir[j][0] + adi[1] * dir[j][1]);
                       }
                   });
    return SymMat2{acc[0][0], 0.5 * (acc[0][1] + acc[1][0]), acc[1][1]};
}

BData compute_b(const CellSolutions& cells) {
    const Grid& grid = cells.grid;
    BData out;
    double avg[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    // Weak realization of the divergence part against the constant test
    // function: sum_a of -int A_ik chi_j d_k phi_a; the shape gradients sum
    // to zero within each element, so this must vanish identically.
    double div_avg = 0.0;
    for_each_gauss(grid, *cells.coeff,
                   [&](int, const std::array<int, 4>& nodes, const SymMat2& aq, double w,
                       const std::array<double, 4>& shape,
                       const std::array<std::array<double, 2>, 4>& grads) {
                       for (int j = 0; j < 2; ++j) {
                           const auto gchi =
                               field_gradient(grid, cells.chi_class[j], nodes, grads);
                           const auto flux = aq.apply(gchi);
                           const double a1j = j == 0 ? aq.a11 : aq.a12;
                           const double a2j = j == 0 ? aq.a12 : aq.a22;
                           avg[0][j] += w * (-a1j - flux[0]);
                           avg[1][j] += w * (-a2j - flux[1]);
                           const double chij = field_value(grid, cells.chi_class[j],
                                                           nodes, shape);
                           double grad_sum1 = 0.0, grad_sum2 = 0.0;
                           for (int a = 0; a < 4; ++a) {
                               grad_sum1 += grads[a][0];
                               grad_sum2 += grads[a][1];
                           }
                           div_avg -= w * chij * (aq.a11 * grad_sum1 + aq.a12 * grad_sum2);
                       }
                   });
    out.pointwise_average = {{{avg[0][0], avg[0][1]}, {avg[1][0], avg[1][1]}}};
    out.divergence_average = div_avg;
    const double hom[2][2] = {{cells.a_hom.a11, cells.a_hom.a12},
                              {cells.a_hom.a12, cells.a_hom.a22}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.max_mismatch =
                std::max(out.max_mismatch, std::abs(avg[i][j] + hom[i][j]));
    if (out.max_mismatch > 1e-6) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3e", out.max_mismatch);
        fail("inconsistency", std::string("M_Y(b_ij) deviates from -a^hom_ij by ") +
                                  buf + "; cell solve or quadrature is broken");
    }
    return out;
}

void solve_second_cell(CellSolutions& cells, const SolverConfig& cfg) {
    compute_b(cells); // validates the average identity before using b
    const Grid& grid = cells.grid;

    // rhs_a for chi_ij:
    //   -int (p_ij + a^hom_ij) phi_a - int (A_ik chi_j) d_k phi_a
    // with p_ij = -A_ij - (A grad chi_j)_i.
    std::array<std::array<std::vector<double>, 2>, 2> rhs;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) rhs[i][j].assign(grid.class_count(), 0.0);
    const double hom[2][2] = {{cells.a_hom.a11, cells.a_hom.a12},
                              {cells.a_hom.a12, cells.a_hom.a22}};

    for_each_gauss(grid, *cells.coeff,
                   [&](int, const std::array<int, 4>& nodes, const SymMat2& aq, double w,
                       const std::array<double, 4>& shape,
                       const std::array<std::array<double, 2>, 4>& grads) {
                       for (int j = 0; j < 2; ++j) {
                           const auto gchi =
                               field_gradient(grid, cells.chi_class[j], nodes, grads);
                           const auto flux = aq.apply(gchi);
                           const double chij =
                               field_value(grid, cells.chi_class[j], nodes, shape);
                           const double aj[2] = {j == 0 ? aq.a11 : aq.a12,
                                                 j == 0 ? aq.a12 : aq.a22};
                           for (int i = 0; i < 2; ++i) {
                               const double p = -aj[i] - flux[i];
                               // row i of A times chi_j, dotted with grad phi_a
                               const double c1 =
                                   (i == 0 ? aq.a11 : aq.a12) * chij;
                               const double c2 =
                                   (i == 0 ? aq.a12 : aq.a22) * chij;
                               for (int a = 0; a < 4; ++a) {
                                   const int cls = grid.periodic_class(nodes[a]);
                                   rhs[i][j][cls] -=
                                       w * ((p + hom[i][j]) * shape[a] +
                                            c1 * grads[a][0] + c2 * grads[a][1]);
                               }
                           }
                       }
                   });

    run_tasks(4, [&](std::size_t t) {
        const int i = static_cast<int>(t) / 2;
        const int j = static_cast<int>(t) % 2;
        auto sys = apply_periodic_zero_mean(cells.k_per, rhs[i][j], grid);
        auto result = cg_solve(sys.K, sys.rhs, cfg, nullptr, subtract_mean);
        subtract_mean(result.x);
        cells.chi2_class[i][j] = std::move(result.x);
        cells.chi2_nodal[i][j] = expand_periodic(grid, cells.chi2_class[i][j]);
    });
    cells.has_chi2 = true;
}

} // namespace homogbl
