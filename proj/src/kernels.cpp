#include "homogbl/kernels.hpp"

#include "homogbl/errors.hpp"

#include <algorithm>
#include <cstdlib>

namespace homogbl::kernels {

namespace {

double dot_block_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double total = 0.0;
    for (std::size_t off = 0; off < n; off += reduction_block) {
        std::size_t len = std::min(reduction_block, n - off);
        total += dot_block_scalar(x + off, y + off, len);
    }
    return total;
}

double nrm2sq_scalar(const double* x, std::size_t n) {
    return dot_scalar(x, x, n);
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpay_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void hadamard_scalar(const double* x, const double* y, double* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

void spmv_scalar(std::size_t rows, const index_t* rowptr, const index_t* col,
                 const double* val, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (index_t k = rowptr[r]; k < rowptr[r + 1]; ++k) s += val[k] * x[col[k]];
        y[r] = s;
    }
}

} // namespace

const Backend& scalar_backend() {
    static const Backend b{
        "scalar",       dot_scalar,  nrm2sq_scalar, axpy_scalar,
        xpay_scalar,    scal_scalar, hadamard_scalar, spmv_scalar,
    };
    return b;
}

#if defined(HOMOGBL_HAVE_AVX2)
const Backend& avx2_backend();
bool avx2_supported();
#endif
#if defined(HOMOGBL_HAVE_NEON)
const Backend& neon_backend();
#endif

const Backend& by_name(std::string_view name) {
    if (name == "scalar") return scalar_backend();
#if defined(HOMOGBL_HAVE_AVX2)
    if (name == "avx2") {
        if (!avx2_supported())
            fail("config-error", "kernel backend 'avx2' not supported by this CPU");
        return avx2_backend();
    }
#endif
#if defined(HOMOGBL_HAVE_NEON)
    if (name == "neon") return neon_backend();
#endif
    fail("config-error",
         "unknown or unavailable kernel backend '" + std::string(name) + "'");
}

std::vector<std::string> available() {
    std::vector<std::string> names{"scalar"};
#if defined(HOMOGBL_HAVE_AVX2)
    if (avx2_supported()) names.emplace_back("avx2");
#endif
#if defined(HOMOGBL_HAVE_NEON)
    names.emplace_back("neon");
#endif
    return names;
}

namespace {

const Backend& resolve_active() {
    const char* env = std::getenv("HOMOGBL_KERNELS");
    std::string_view req = env ? std::string_view(env) : std::string_view("auto");
    if (req != "auto" && !req.empty()) return by_name(req);
#if defined(HOMOGBL_HAVE_AVX2)
    if (avx2_supported()) return avx2_backend();
#endif
#if defined(HOMOGBL_HAVE_NEON)
    return neon_backend();
#else
    return scalar_backend();
#endif
}

} // namespace

const Backend& active() {
    static const Backend& b = resolve_active();
    return b;
}

} // namespace homogbl::kernels
