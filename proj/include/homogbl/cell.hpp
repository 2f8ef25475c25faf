#pragma once

#include "homogbl/assembly.hpp"
#include "homogbl/coefficient.hpp"
#include "homogbl/grid.hpp"
#include "homogbl/solver.hpp"
#include "homogbl/sparse.hpp"

#include <array>
#include <vector>

namespace homogbl {

// Discrete solutions of the periodic cell problems on Y:
//   first order:  div_y(A (grad chi_j + e_j)) = 0,      chi_j in W_per(Y)
//   second order: div_y(A grad chi_ij) = b_ij + a^hom_ij, chi_ij in W_per(Y)
// with b_ij = -A_ij - A_ik d_k chi_j - d_k(A_ik chi_j).  Solutions are kept
// both class-indexed (periodic identification) and as raw nodal fields for
// point evaluation.
struct CellSolutions {
    Grid grid; // cell-periodic
    CoefficientPtr coeff;
    Csr k_per; // periodic stiffness, shared by all solves

    std::array<std::vector<double>, 2> chi_class;
    std::array<std::vector<double>, 2> chi_nodal;
    SymMat2 a_hom;

    bool has_chi2 = false;
    std::array<std::array<std::vector<double>, 2>, 2> chi2_class;
    std::array<std::array<std::vector<double>, 2>, 2> chi2_nodal;

    // Q1 evaluation at a cell point (coordinates reduced to [0,1) first).
    double chi_value(int j, double y1, double y2) const;
    std::array<double, 2> chi_gradient(int j, double y1, double y2) const;
    double chi2_value(int i, int j, double y1, double y2) const;
    std::array<double, 2> chi2_gradient(int i, int j, double y1, double y2) const;
};

// Expand a class-indexed vector to all raw nodes (periodic partners get
// identical values exactly).
std::vector<double> expand_periodic(const Grid& grid, const std::vector<double>& cls);

// Solve both first-order cell problems; fills chi and the periodic stiffness.
CellSolutions solve_first_cell(const Grid& grid, const CoefficientPtr& coeff,
                               const SolverConfig& cfg = {});

// a^hom_ij = M_Y(A_ij + A_ik d_k chi_j), evaluated with the assembly
// quadrature.  Also stores the tensor into `cells`.
SymMat2 homogenized_tensor(CellSolutions& cells);

// Equivalent energy form M_Y((grad chi_i + e_i)^T A (grad chi_j + e_j));
// agrees with homogenized_tensor for the discrete solution.
SymMat2 homogenized_tensor_energy(const CellSolutions& cells);

// Average data of the second-order right-hand side b_ij: the pointwise part
// -A_ij - A_ik d_k chi_j must average to -a^hom_ij (checked; mismatch beyond
// 1e-6 raises inconsistency), and the weak realization of the divergence
// part must average to zero.
struct BData {
    std::array<std::array<double, 2>, 2> pointwise_average;
    double divergence_average = 0.0;
    double max_mismatch = 0.0; // max_ij |M_Y(b_ij) + a^hom_ij|
};

BData compute_b(const CellSolutions& cells);

// Solve the four second-order cell problems (divergence part of b handled
// weakly: moved onto the test function, never differenced).
void solve_second_cell(CellSolutions& cells, const SolverConfig& cfg = {});

} // namespace homogbl
