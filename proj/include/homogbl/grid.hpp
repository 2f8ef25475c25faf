#pragma once

#include <array>
#include <vector>

namespace homogbl {

enum class GridKind {
    cell_periodic,    // unit cell Y with opposite-face identification
    domain_dirichlet, // physical domain with a Dirichlet boundary
};

// Uniform n-by-n quadrilateral mesh of the unit square.  Nodes are numbered
// x-fastest: node (i, j) -> j*(n+1) + i, coordinates exactly (i/n, j/n).
// Elements are numbered the same way over the n-by-n cells.
struct Grid {
    GridKind kind;
    int n; // elements per side

    double h() const { return 1.0 / n; }
    int nodes_per_side() const { return n + 1; }
    int node_count() const { return (n + 1) * (n + 1); }
    int element_count() const { return n * n; }

    int node_index(int i, int j) const { return j * (n + 1) + i; }
    std::array<int, 2> node_ij(int idx) const {
        return {idx % (n + 1), idx / (n + 1)};
    }
    std::array<double, 2> node_coord(int idx) const {
        auto [i, j] = node_ij(idx);
        return {static_cast<double>(i) / n, static_cast<double>(j) / n};
    }

    bool is_boundary_node(int idx) const {
        auto [i, j] = node_ij(idx);
        return i == 0 || j == 0 || i == n || j == n;
    }
    // All boundary node indices in increasing index order (4n of them).
    std::vector<int> boundary_nodes() const;
    // Interior nodes in increasing index order ((n-1)^2 of them).
    std::vector<int> interior_nodes() const;

    // Element (ex, ey) covers [ex, ex+1] x [ey, ey+1] scaled by h.
    std::array<int, 2> element_cell(int e) const { return {e % n, e / n}; }
    // Corner nodes counterclockwise from the lower-left:
    // (ex,ey), (ex+1,ey), (ex+1,ey+1), (ex,ey+1).
    std::array<int, 4> element_nodes(int e) const {
        auto [ex, ey] = element_cell(e);
        int a = node_index(ex, ey);
        return {a, a + 1, a + n + 2, a + n + 1};
    }

    // Periodic identification (cell kind): raw node -> class in [0, n^2).
    // Face nodes at i==n or j==n share the class of their i%n, j%n partner;
    // the four corners share one class.
    int periodic_class(int idx) const {
        auto [i, j] = node_ij(idx);
        return (j % n) * n + (i % n);
    }
    int class_count() const { return n * n; }
};

// Mesh of the unit cell Y with periodic identification.  Discontinuous
// coefficient families (interfaces at 1/2) require even n so interfaces lie
// on grid lines.
Grid build_cell_grid(int n, bool discontinuous_coefficient = false);

// Mesh of the physical domain with Dirichlet boundary handling.
Grid build_domain_grid(int n);

} // namespace homogbl
