#pragma once

#include "homogbl/kernels.hpp"

#include <cstddef>
#include <vector>

namespace homogbl {

using kernels::index_t;

// Compressed sparse row matrix with strictly increasing column indices per
// row and no stored zeros.  Products go through the runtime-selected kernel
// backend.
struct Csr {
    index_t rows = 0;
    index_t cols = 0;
    std::vector<index_t> rowptr; // size rows + 1
    std::vector<index_t> col;
    std::vector<double> val;

    std::size_t nnz() const { return col.size(); }

    void multiply(const double* x, double* y) const;
    std::vector<double> multiply(const std::vector<double>& x) const;

    std::vector<double> diagonal() const;

    static Csr identity(index_t n);
};

// Accumulates (row, col, value) triplets in a fixed insertion order and
// compresses with a stable sort, so duplicate entries are summed in exactly
// the order they were added: assembly is bit-deterministic.
class TripletBuilder {
public:
    TripletBuilder(index_t rows, index_t cols, std::size_t reserve_hint = 0);

    void add(index_t r, index_t c, double v);

    // Sort, merge duplicates, drop exact zeros, produce the CSR matrix.
    Csr compress();

private:
    struct Entry {
        index_t r, c;
        double v;
    };
    index_t rows_, cols_;
    std::vector<Entry> entries_;
};

// max |K - K^T| over all entries, via densification; small matrices only
// (symmetry audit for tests and invariant checks).
double symmetry_defect(const Csr& m);

} // namespace homogbl
