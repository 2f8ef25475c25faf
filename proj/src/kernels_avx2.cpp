// AVX2/FMA kernel variants.  This translation unit is the only one compiled
// with -mavx2 -mfma; callers reach it through the runtime dispatch in
// kernels.cpp.  Reductions keep a fixed block/lane order so results are
// deterministic for this backend.  Element-wise ops must round exactly like
// the scalar backend (multiply, then add -- no fused multiply-add), so that
// backend selection never changes their results; fused ops stay confined to
// the reductions, whose cross-backend agreement is tolerance-based anyway.

#include "homogbl/kernels.hpp"

#if defined(HOMOGBL_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>
#include <cstddef>

namespace homogbl::kernels {

namespace {

inline double hsum(__m256d v) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, v);
    return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

double dot_block_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    __m256d acc = _mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    double total = 0.0;
    for (std::size_t off = 0; off < n; off += reduction_block) {
        std::size_t len = std::min(reduction_block, n - off);
        total += dot_block_avx2(x + off, y + off, len);
    }
    return total;
}

double nrm2sq_avx2(const double* x, std::size_t n) {
    return dot_avx2(x, x, n);
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_add_pd(_mm256_loadu_pd(y + i),
                                   _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void xpay_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_add_pd(_mm256_loadu_pd(x + i),
                                   _mm256_mul_pd(va, _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

void scal_avx2(double a, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void hadamard_avx2(const double* x, const double* y, double* z, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(z + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) z[i] = x[i] * y[i];
}

void spmv_avx2(std::size_t rows, const index_t* rowptr, const index_t* col,
               const double* val, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        index_t k = rowptr[r];
        const index_t end = rowptr[r + 1];
        __m256d acc = _mm256_setzero_pd();
        for (; k + 4 <= end; k += 4) {
            __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + k));
            __m256d vx = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + k), vx, acc);
        }
        double s = hsum(acc);
        for (; k < end; ++k) s += val[k] * x[col[k]];
        y[r] = s;
    }
}

} // namespace

bool avx2_supported() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Backend& avx2_backend() {
    static const Backend b{
        "avx2",     dot_avx2,  nrm2sq_avx2,   axpy_avx2,
        xpay_avx2,  scal_avx2, hadamard_avx2, spmv_avx2,
    };
    return b;
}

} // namespace homogbl::kernels

#endif // HOMOGBL_HAVE_AVX2
