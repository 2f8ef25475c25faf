#pragma once

#include "homogbl/assembly.hpp"
#include "homogbl/grid.hpp"
#include "homogbl/sparse.hpp"

#include <array>
#include <vector>

namespace homogbl {

// Nodal samples of a scalar function (one value per grid node).
std::vector<double> interpolate(const Grid& grid, const ScalarFn& f);

// Q1 finite-element evaluation of a nodal field at an arbitrary point of
// [0,1]^2 (points on the closed upper/right edges fall into the last
// element).
double fe_value(const Grid& grid, const std::vector<double>& values, double x1,
                double x2);
std::array<double, 2> fe_gradient(const Grid& grid, const std::vector<double>& values,
                                  double x1, double x2);

struct Norms {
    double l2 = 0.0; // sqrt(v^T M v)
    double h1 = 0.0; // sqrt(v^T M v + v^T K_I v), K_I the unweighted stiffness
};

// Discrete L2/H1 norms on one grid; assembles the mass and the
// identity-coefficient stiffness once and reuses them.
class NormContext {
public:
    explicit NormContext(const Grid& grid);

    Norms norms(const std::vector<double>& v) const;
    double l2(const std::vector<double>& v) const;
    // integral of the Q1 interpolant: 1^T M v
    double integral(const std::vector<double>& v) const;

    const Grid& grid() const { return grid_; }
    const Csr& mass() const { return mass_; }
    const Csr& stiffness_identity() const { return stiff_; }

private:
    Grid grid_;
    Csr mass_;
    Csr stiff_;
};

// y_i = a_i (copy), then y += s*b for each (s, b) pair: fixed-order linear
// combination helper for expansion differences.
std::vector<double> combine(const std::vector<double>& base,
                            const std::vector<std::pair<double, const std::vector<double>*>>& terms);

} // namespace homogbl
