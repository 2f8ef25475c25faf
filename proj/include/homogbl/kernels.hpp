#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace homogbl::kernels {

using index_t = std::int32_t;

// One implementation of the hot vector/matrix-vector loops used by the
// iterative solvers.  Element-wise ops (axpy, xpay, scal, hadamard) round
// each entry as a plain multiply-then-add, so every backend produces
// bit-identical results for them.  Reductions (dot, nrm2sq, spmv) accumulate
// over fixed-size blocks in a fixed order, so each backend is deterministic
// run-to-run, but different backends may differ in the last bits (different
// association), which the equivalence tests account for.
struct Backend {
    const char* name;
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*nrm2sq)(const double* x, std::size_t n);
    // y += a*x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // y = x + a*y
    void (*xpay)(double a, const double* x, double* y, std::size_t n);
    void (*scal)(double a, double* x, std::size_t n);
    // z = x .* y (elementwise; used for Jacobi preconditioning)
    void (*hadamard)(const double* x, const double* y, double* z, std::size_t n);
    // y = A x, A in CSR with strictly increasing columns per row
    void (*spmv)(std::size_t rows, const index_t* rowptr, const index_t* col,
                 const double* val, const double* x, double* y);
};

// Reference implementation; always available.
const Backend& scalar_backend();

// Backend chosen at process start: honours HOMOGBL_KERNELS
// (auto | scalar | avx2 | neon), otherwise picks the widest instruction set
// the CPU supports among the compiled variants.
const Backend& active();

// Lookup by name; throws config-error for unknown or unsupported names.
const Backend& by_name(std::string_view name);

// Names of all backends usable on this machine.
std::vector<std::string> available();

// Reduction block length shared by all backends (keeps partial-sum order
// identical for a given backend regardless of call site).
inline constexpr std::size_t reduction_block = 4096;

} // namespace homogbl::kernels
