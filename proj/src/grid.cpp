#include "homogbl/grid.hpp"

#include "homogbl/errors.hpp"

#include <string>

namespace homogbl {

std::vector<int> Grid::boundary_nodes() const {
    std::vector<int> out;
    out.reserve(4 * n);
    for (int idx = 0; idx < node_count(); ++idx)
        if (is_boundary_node(idx)) out.push_back(idx);
    return out;
}

std::vector<int> Grid::interior_nodes() const {
    std::vector<int> out;
    out.reserve((n - 1) * (n - 1));
    for (int idx = 0; idx < node_count(); ++idx)
        if (!is_boundary_node(idx)) out.push_back(idx);
    return out;
}

namespace {

void check_resolution(int n) {
    if (n < 2)
        fail("invalid-resolution",
             "grid needs at least 2 elements per side, got " + std::to_string(n));
}

} // namespace

Grid build_cell_grid(int n, bool discontinuous_coefficient) {
    check_resolution(n);
    if (discontinuous_coefficient && n % 2 != 0)
        fail("interface-misalignment",
             "coefficient interfaces at 1/2 need an even cell grid, got n = " +
                 std::to_string(n));
    return Grid{GridKind::cell_periodic, n};
}

Grid build_domain_grid(int n) {
    check_resolution(n);
    return Grid{GridKind::domain_dirichlet, n};
}

} // namespace homogbl
