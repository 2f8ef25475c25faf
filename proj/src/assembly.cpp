#include "homogbl/assembly.hpp"

#include "homogbl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace homogbl {

namespace {

// Element stiffness for one element with corner (ex, ey): the physical
// gradient carries 1/h, the quadrature weight h^2/4, so the result is
// h-independent in 2D.
std::array<std::array<double, 4>, 4> element_stiffness(const Grid& grid,
                                                       const MatrixFn& a, int ex,
                                                       int ey) {
    const double h = grid.h();
    std::array<std::array<double, 4>, 4> ke{};
    for (int q = 0; q < 4; ++q) {
        auto [xi, eta] = q1::gauss_point(q);
        const double x1 = (ex + xi) * h;
        const double x2 = (ey + eta) * h;
        const SymMat2 aq = a(x1, x2);
        const auto g = q1::shape_grad(xi, eta);
        // (A grad_a) . grad_b with reference gradients; 1/h^2 from the two
        // physical gradients cancels the h^2 quadrature weight.
        for (int i = 0; i < 4; ++i) {
            const auto agi = aq.apply(g[i]);
            for (int j = 0; j < 4; ++j)
                ke[i][j] += 0.25 * (agi[0] * g[j][0] + agi[1] * g[j][1]);
        }
    }
    return ke;
}

} // namespace

Csr assemble_stiffness(const Grid& grid, const MatrixFn& a) {
    TripletBuilder builder(grid.node_count(), grid.node_count(),
                           static_cast<std::size_t>(grid.element_count()) * 16);
    for (int e = 0; e < grid.element_count(); ++e) {
        auto [ex, ey] = grid.element_cell(e);
        const auto ke = element_stiffness(grid, a, ex, ey);
        const auto nodes = grid.element_nodes(e);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) builder.add(nodes[i], nodes[j], ke[i][j]);
    }
    return builder.compress();
}

Csr assemble_stiffness(const Grid& grid, const SymMat2& a) {
    return assemble_stiffness(grid, [&a](double, double) { return a; });
}

Csr assemble_stiffness(const Grid& grid, const Coefficient& coeff,
                       std::optional<double> eps) {
    if (grid.kind == GridKind::cell_periodic) {
        if (eps)
            fail("inconsistency", "cell-grid assembly samples A(y) directly; eps "
                                  "does not apply");
        return assemble_stiffness(grid, [&coeff](double y1, double y2) {
            return coeff.at(frac_unit(y1), frac_unit(y2));
        });
    }
    const bool constant = coeff.lower_bound() == coeff.upper_bound();
    if (!eps && !constant)
        fail("missing-scale",
             "domain assembly of an oscillatory coefficient needs eps");
    if (!eps)
        return assemble_stiffness(grid,
                                  [&coeff](double, double) { return coeff.at(0, 0); });
    const double e = *eps;
    if (!(e > 0.0)) fail("missing-scale", "eps must be positive");
    return assemble_stiffness(grid, [&coeff, e](double x1, double x2) {
        return coeff.at(frac_unit(x1 / e), frac_unit(x2 / e));
    });
}

Csr assemble_stiffness_periodic(const Grid& grid, const Coefficient& coeff) {
    if (grid.kind != GridKind::cell_periodic)
        fail("bad-constraint", "periodic assembly needs a cell-periodic grid");
    TripletBuilder builder(grid.class_count(), grid.class_count(),
                           static_cast<std::size_t>(grid.element_count()) * 16);
    const MatrixFn a = [&coeff](double y1, double y2) {
        return coeff.at(frac_unit(y1), frac_unit(y2));
    };
    for (int e = 0; e < grid.element_count(); ++e) {
        auto [ex, ey] = grid.element_cell(e);
        const auto ke = element_stiffness(grid, a, ex, ey);
        const auto nodes = grid.element_nodes(e);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                builder.add(grid.periodic_class(nodes[i]), grid.periodic_class(nodes[j]),
                            ke[i][j]);
    }
    return builder.compress();
}

Csr assemble_mass(const Grid& grid) {
    TripletBuilder builder(grid.node_count(), grid.node_count(),
                           static_cast<std::size_t>(grid.element_count()) * 16);
    const double scale = grid.h() * grid.h() / 36.0;
    for (int e = 0; e < grid.element_count(); ++e) {
        const auto nodes = grid.element_nodes(e);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                builder.add(nodes[i], nodes[j], scale * q1::mass_pattern[i][j]);
    }
    return builder.compress();
}

std::vector<double> assemble_load(const Grid& grid, const ScalarFn& f) {
    std::vector<double> load(grid.node_count(), 0.0);
    const double h = grid.h();
    const double w = h * h / 4.0;
    for (int e = 0; e < grid.element_count(); ++e) {
        auto [ex, ey] = grid.element_cell(e);
        const auto nodes = grid.element_nodes(e);
        for (int q = 0; q < 4; ++q) {
            auto [xi, eta] = q1::gauss_point(q);
            const double fq = f((ex + xi) * h, (ey + eta) * h);
            const auto nq = q1::shape(xi, eta);
            for (int i = 0; i < 4; ++i) load[nodes[i]] += w * fq * nq[i];
        }
    }
    return load;
}

BoundaryCondition dirichlet_from(const Grid& grid, const ScalarFn& g) {
    BoundaryCondition bc;
    for (int idx : grid.boundary_nodes()) {
        auto [x1, x2] = grid.node_coord(idx);
        bc.values.emplace_back(idx, g(x1, x2));
    }
    return bc;
}

std::vector<double> ReducedSystem::expand(const std::vector<double>& x_interior) const {
    std::vector<double> full = boundary_full;
    for (std::size_t k = 0; k < interior.size(); ++k) full[interior[k]] = x_interior[k];
    return full;
}

DirichletOperator DirichletOperator::build(const Grid& grid, Csr full_matrix) {
    if (grid.kind != GridKind::domain_dirichlet)
        fail("bad-constraint", "Dirichlet data applies to domain grids");
    if (full_matrix.rows != grid.node_count() || full_matrix.cols != grid.node_count())
        fail("bad-constraint", "matrix size does not match the grid node count");
    DirichletOperator op;
    op.grid = grid;
    op.full = std::move(full_matrix);
    op.full_to_reduced.assign(grid.node_count(), -1);
    for (int idx = 0; idx < grid.node_count(); ++idx) {
        if (!grid.is_boundary_node(idx)) {
            op.full_to_reduced[idx] = static_cast<index_t>(op.interior.size());
            op.interior.push_back(idx);
        }
    }

    // Interior-to-interior block, row by row (rows already sorted).
    TripletBuilder builder(static_cast<index_t>(op.interior.size()),
                           static_cast<index_t>(op.interior.size()), op.full.nnz());
    for (std::size_t k = 0; k < op.interior.size(); ++k) {
        const index_t r = op.interior[k];
        for (index_t p = op.full.rowptr[r]; p < op.full.rowptr[r + 1]; ++p) {
            const index_t cr = op.full_to_reduced[op.full.col[p]];
            if (cr >= 0) builder.add(static_cast<index_t>(k), cr, op.full.val[p]);
        }
    }
    op.reduced = builder.compress();
    return op;
}

std::vector<double> DirichletOperator::reduce_vec(const std::vector<double>& full_vec) const {
    if (full_vec.size() != static_cast<std::size_t>(grid.node_count()))
        fail("grid-incompatibility", "vector length does not match the grid");
    std::vector<double> out(interior.size());
    for (std::size_t k = 0; k < interior.size(); ++k) out[k] = full_vec[interior[k]];
    return out;
}

std::vector<double> DirichletOperator::expand_vec(
    const std::vector<double>& interior_vec,
    const std::vector<double>* boundary_full) const {
    if (interior_vec.size() != interior.size())
        fail("grid-incompatibility", "interior vector length mismatch");
    std::vector<double> out(grid.node_count(), 0.0);
    if (boundary_full) {
        if (boundary_full->size() != out.size())
            fail("grid-incompatibility", "boundary vector length mismatch");
        for (int idx : grid.boundary_nodes()) out[idx] = (*boundary_full)[idx];
    }
    for (std::size_t k = 0; k < interior.size(); ++k)
        out[interior[k]] = interior_vec[k];
    return out;
}

std::vector<double> DirichletOperator::lifted_rhs(
    const std::vector<double>& load_full, const std::vector<double>& g_full) const {
    if (load_full.size() != static_cast<std::size_t>(grid.node_count()) ||
        g_full.size() != load_full.size())
        fail("grid-incompatibility", "vector length does not match the grid");
    std::vector<double> kg(grid.node_count());
    full.multiply(g_full.data(), kg.data());
    std::vector<double> rhs(interior.size());
    for (std::size_t k = 0; k < interior.size(); ++k) {
        const index_t idx = interior[k];
        rhs[k] = load_full[idx] - kg[idx];
    }
    return rhs;
}

ReducedSystem apply_dirichlet(const Csr& K, const std::vector<double>& load,
                              const Grid& grid, const BoundaryCondition& bc) {
    DirichletOperator op = DirichletOperator::build(grid, K);
    ReducedSystem sys;
    sys.boundary_full.assign(grid.node_count(), 0.0);
    for (const auto& [node, value] : bc.values) {
        if (node < 0 || node >= grid.node_count() || !grid.is_boundary_node(node))
            fail("bad-constraint",
                 "Dirichlet value at non-boundary node " + std::to_string(node));
        sys.boundary_full[node] = value;
    }
    sys.rhs = op.lifted_rhs(load, sys.boundary_full);
    sys.interior = std::move(op.interior);
    sys.K = std::move(op.reduced);
    return sys;
}

PeriodicSystem apply_periodic_zero_mean(Csr K, std::vector<double> load,
                                        const Grid& grid) {
    if (grid.kind != GridKind::cell_periodic)
        fail("bad-constraint", "zero-mean constraint applies to cell-periodic grids");
    if (K.rows != grid.class_count() ||
        load.size() != static_cast<std::size_t>(grid.class_count()))
        fail("bad-constraint", "system size does not match the periodic class count");
    double sum = 0.0;
    double scale = 0.0;
    for (double v : load) {
        sum += v;
        scale += std::abs(v);
    }
    if (std::abs(sum) > 1e-10 * std::max(scale, 1.0))
        fail("incompatible-rhs",
             "load sum " + std::to_string(sum) + " violates the compatibility "
             "condition for the periodic problem");
    return PeriodicSystem{std::move(K), std::move(load)};
}

} // namespace homogbl
