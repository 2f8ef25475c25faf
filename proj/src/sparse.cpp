#include "homogbl/sparse.hpp"

#include "homogbl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace homogbl {

void Csr::multiply(const double* x, double* y) const {
    kernels::active().spmv(static_cast<std::size_t>(rows), rowptr.data(), col.data(),
                           val.data(), x, y);
}

std::vector<double> Csr::multiply(const std::vector<double>& x) const {
    std::vector<double> y(static_cast<std::size_t>(rows));
    multiply(x.data(), y.data());
    return y;
}

std::vector<double> Csr::diagonal() const {
    std::vector<double> d(static_cast<std::size_t>(rows), 0.0);
    for (index_t r = 0; r < rows; ++r)
        for (index_t k = rowptr[r]; k < rowptr[r + 1]; ++k)
            if (col[k] == r) d[r] = val[k];
    return d;
}

Csr Csr::identity(index_t n) {
    Csr m;
    m.rows = m.cols = n;
    m.rowptr.resize(n + 1);
    m.col.resize(n);
    m.val.assign(n, 1.0);
    for (index_t i = 0; i < n; ++i) {
        m.rowptr[i] = i;
        m.col[i] = i;
    }
    m.rowptr[n] = n;
    return m;
}

TripletBuilder::TripletBuilder(index_t rows, index_t cols, std::size_t reserve_hint)
    : rows_(rows), cols_(cols) {
    entries_.reserve(reserve_hint);
}

void TripletBuilder::add(index_t r, index_t c, double v) {
    entries_.push_back(Entry{r, c, v});
}

Csr TripletBuilder::compress() {
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const Entry& a, const Entry& b) {
                         return a.r != b.r ? a.r < b.r : a.c < b.c;
                     });
    Csr m;
    m.rows = rows_;
    m.cols = cols_;
    m.rowptr.assign(static_cast<std::size_t>(rows_) + 1, 0);
    m.col.reserve(entries_.size());
    m.val.reserve(entries_.size());
    std::size_t i = 0;
    for (index_t r = 0; r < rows_; ++r) {
        while (i < entries_.size() && entries_[i].r == r) {
            index_t c = entries_[i].c;
            double v = 0.0;
            for (; i < entries_.size() && entries_[i].r == r && entries_[i].c == c; ++i)
                v += entries_[i].v;
            if (v != 0.0) {
                m.col.push_back(c);
                m.val.push_back(v);
            }
        }
        m.rowptr[static_cast<std::size_t>(r) + 1] = static_cast<index_t>(m.col.size());
    }
    entries_.clear();
    entries_.shrink_to_fit();
    return m;
}

double symmetry_defect(const Csr& m) {
    if (m.rows != m.cols) fail("inconsistency", "symmetry check needs a square matrix");
    std::vector<double> dense(static_cast<std::size_t>(m.rows) * m.cols, 0.0);
    for (index_t r = 0; r < m.rows; ++r)
        for (index_t k = m.rowptr[r]; k < m.rowptr[r + 1]; ++k)
            dense[static_cast<std::size_t>(r) * m.cols + m.col[k]] = m.val[k];
    double defect = 0.0;
    for (index_t r = 0; r < m.rows; ++r)
        for (index_t c = 0; c < m.cols; ++c)
            defect = std::max(defect,
                              std::abs(dense[static_cast<std::size_t>(r) * m.cols + c] -
                                       dense[static_cast<std::size_t>(c) * m.cols + r]));
    return defect;
}

} // namespace homogbl
