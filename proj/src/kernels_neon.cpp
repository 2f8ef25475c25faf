// NEON kernel variants for aarch64; double-precision two-lane operations.
// Same fixed block/lane reduction order contract as the other backends.
// Element-wise ops round like the scalar backend (multiply, then add; no
// fused multiply-add), so backend selection never changes their results;
// fused ops stay confined to the reductions.

#include "homogbl/kernels.hpp"

#if defined(HOMOGBL_HAVE_NEON)

#include <arm_neon.h>

#include <algorithm>
#include <cstddef>

namespace homogbl::kernels {

namespace {

double dot_block_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    float64x2_t acc = vaddq_f64(acc0, acc1);
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double dot_neon(const double* x, const double* y, std::size_t n) {
    double total = 0.0;
    for (std::size_t off = 0; off < n; off += reduction_block) {
        std::size_t len = std::min(reduction_block, n - off);
        total += dot_block_neon(x + off, y + off, len);
    }
    return total;
}

double nrm2sq_neon(const double* x, std::size_t n) {
    return dot_neon(x, x, n);
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
    for (; i < n; ++i) y[i] += a * x[i];
}

void xpay_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vaddq_f64(vld1q_f64(x + i), vmulq_f64(va, vld1q_f64(y + i))));
    for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

void scal_neon(double a, double* x, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void hadamard_neon(const double* x, const double* y, double* z, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(z + i, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    for (; i < n; ++i) z[i] = x[i] * y[i];
}

void spmv_neon(std::size_t rows, const index_t* rowptr, const index_t* col,
               const double* val, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        index_t k = rowptr[r];
        const index_t end = rowptr[r + 1];
        float64x2_t acc = vdupq_n_f64(0.0);
        for (; k + 2 <= end; k += 2) {
            float64x2_t vx = {x[col[k]], x[col[k + 1]]};
            acc = vfmaq_f64(acc, vld1q_f64(val + k), vx);
        }
        double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
        for (; k < end; ++k) s += val[k] * x[col[k]];
        y[r] = s;
    }
}

} // namespace

const Backend& neon_backend() {
    static const Backend b{
        "neon",     dot_neon,  nrm2sq_neon,   axpy_neon,
        xpay_neon,  scal_neon, hadamard_neon, spmv_neon,
    };
    return b;
}

} // namespace homogbl::kernels

#endif // HOMOGBL_HAVE_NEON
