#pragma once

#include "homogbl/coefficient.hpp"
#include "homogbl/grid.hpp"
#include "homogbl/sparse.hpp"

#include <array>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace homogbl {

// Q1 reference element on [0,1]^2, corner order (0,0),(1,0),(1,1),(0,1),
// with the 2x2 Gauss rule (weights 1/4 on the reference square).
namespace q1 {

inline constexpr double gauss_offset = 0.28867513459481288225457439025098; // 1/(2*sqrt(3))
inline constexpr std::array<double, 2> gauss_1d = {0.5 - gauss_offset, 0.5 + gauss_offset};

// Reference coordinates of quadrature point q (q = 2*qy + qx).
inline std::array<double, 2> gauss_point(int q) {
    return {gauss_1d[q % 2], gauss_1d[q / 2]};
}

inline std::array<double, 4> shape(double xi, double eta) {
    return {(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
}

// Reference gradients d(N_a)/d(xi, eta).
inline std::array<std::array<double, 2>, 4> shape_grad(double xi, double eta) {
    return {{{-(1 - eta), -(1 - xi)},
             {1 - eta, -xi},
             {eta, xi},
             {-eta, 1 - xi}}};
}

// Exact element mass matrix scale factors: M_ab = h^2/36 * mass_pattern[a][b].
inline constexpr std::array<std::array<double, 4>, 4> mass_pattern = {{
    {4, 2, 1, 2},
    {2, 4, 2, 1},
    {1, 2, 4, 2},
    {2, 1, 2, 4},
}};

} // namespace q1

// Matrix-valued coefficient evaluated at physical quadrature points.
using MatrixFn = std::function<SymMat2(double x1, double x2)>;
using ScalarFn = std::function<double(double x1, double x2)>;

// Stiffness over raw nodes: K_ij = sum_e int_e (A grad phi_i) . grad phi_j,
// 2x2 Gauss with pointwise coefficient sampling.  Deterministic traversal.
Csr assemble_stiffness(const Grid& grid, const MatrixFn& a);
// Constant-tensor convenience (homogenized operator).
Csr assemble_stiffness(const Grid& grid, const SymMat2& a);
// Coefficient-field version: cell grids sample A(y) directly (eps must be
// empty); domain grids sample A({x/eps}) and demand eps unless the family is
// constant.  Missing eps -> missing-scale.
Csr assemble_stiffness(const Grid& grid, const Coefficient& coeff,
                       std::optional<double> eps);

// Stiffness over periodic classes of a cell grid (n^2 unknowns, kernel =
// constants).
Csr assemble_stiffness_periodic(const Grid& grid, const Coefficient& coeff);

// Exact Q1 mass matrix; entries sum to the domain area 1.
Csr assemble_mass(const Grid& grid);

// Load vector int f phi_i via 2x2 Gauss.
std::vector<double> assemble_load(const Grid& grid, const ScalarFn& f);

// Dirichlet data as explicit (node, value) pairs; nodes must be boundary
// nodes of the grid they are applied to.
struct BoundaryCondition {
    std::vector<std::pair<index_t, double>> values;
};

// Dirichlet data for every boundary node from a trace function.
BoundaryCondition dirichlet_from(const Grid& grid, const ScalarFn& g);

// Reusable interior reduction of one assembled matrix: build once, then
// solve against many Dirichlet data sets (boundary layers share the
// oscillating stiffness).
struct DirichletOperator {
    Grid grid;
    Csr full;                           // raw-node matrix
    Csr reduced;                        // interior block
    std::vector<index_t> interior;      // interior node ids, ascending
    std::vector<index_t> full_to_reduced; // -1 for boundary nodes

    static DirichletOperator build(const Grid& grid, Csr full_matrix);

    std::vector<double> reduce_vec(const std::vector<double>& full_vec) const;
    // Interior solution + boundary values (zero if omitted) -> full vector.
    std::vector<double> expand_vec(const std::vector<double>& interior_vec,
                                   const std::vector<double>* boundary_full = nullptr) const;
    // (load - K g)|interior for full-length load and boundary extension g.
    std::vector<double> lifted_rhs(const std::vector<double>& load_full,
                                   const std::vector<double>& g_full) const;
};

// Interior-reduced SPD system with the boundary values lifted into the right
// hand side; expand() reassembles the full nodal vector.
struct ReducedSystem {
    Csr K;                              // interior x interior
    std::vector<double> rhs;            // lifted load
    std::vector<index_t> interior;      // interior node ids, ascending
    std::vector<double> boundary_full;  // full-length: g on boundary, 0 inside

    std::vector<double> expand(const std::vector<double>& x_interior) const;
};

ReducedSystem apply_dirichlet(const Csr& K, const std::vector<double>& load,
                              const Grid& grid, const BoundaryCondition& bc);

// Periodic zero-mean system over classes: validates load compatibility
// (constants in the kernel force sum(load) ~ 0) and packages the projection
// solve.  Incompatible load -> incompatible-rhs.
struct PeriodicSystem {
    Csr K;                   // class x class
    std::vector<double> rhs; // class-indexed
};

PeriodicSystem apply_periodic_zero_mean(Csr K, std::vector<double> load,
                                        const Grid& grid);

} // namespace homogbl
