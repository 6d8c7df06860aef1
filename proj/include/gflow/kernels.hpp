#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace gflow::kernels {

// Numeric inner loops behind the dense and sparse linear algebra. Every
// kernel exists in a scalar reference form and, on x86-64 with AVX2+FMA, a
// vectorized form. A backend is selected once at startup (overridable with
// GFLOW_KERNELS=scalar|avx2) and the two implementations are equivalence-
// tested against each other.
//
// Conventions: all matrices are dense row-major double unless a CSR triplet
// (row_ptr/col/val) is passed explicitly; leading dimensions equal the
// logical column counts (no padding).

struct Ops {
    // C (m x n) = A (m x k) * B (k x n); accumulates into C when acc is set.
    void (*gemm_nn)(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n, bool acc);
    // C (m x n) = A^T * B with A stored (k x m), B (k x n).
    void (*gemm_tn)(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n, bool acc);
    // C (m x n) = A * B^T with A stored (m x k), B (n x k).
    void (*gemm_nt)(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n, bool acc);
    // C (rows x f) = S * H where S is CSR (rows x anything) and H is (cols x f).
    void (*csr_dense)(const int* row_ptr, const int* col, const double* val, int rows,
                      const double* h, double* c, std::size_t f);
    // y = max(x, 0) elementwise.
    void (*relu)(const double* x, double* y, std::size_t len);
    // gin = gout where pre > 0, else 0.
    void (*relu_backward)(const double* pre, const double* gout, double* gin, std::size_t len);
    // Fused bias-corrected Adam update on one tensor:
    //   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2
    //   p -= eta * (m*bc1) / (sqrt(v*bc2) + eps)
    // with bc1 = 1/(1-b1^t), bc2 = 1/(1-b2^t) precomputed by the caller.
    void (*adam_update)(double* p, double* m, double* v, const double* g, std::size_t len,
                        double eta, double b1, double b2, double bc1, double bc2, double eps);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t len);
    void (*scale)(double a, double* x, std::size_t len);
    double (*dot)(const double* x, const double* y, std::size_t len);
    double (*reduce_max)(const double* x, std::size_t len);
    double (*reduce_sum)(const double* x, std::size_t len);
};

enum class Backend { Scalar, Avx2 };

extern const Ops scalar_ops;
#if defined(__x86_64__) || defined(_M_X64)
extern const Ops avx2_ops;
#endif

// True when the AVX2 table is both compiled in and runnable on this CPU.
bool avx2_available();

// Active table. Resolved once: GFLOW_KERNELS env var wins, otherwise the
// widest available backend.
const Ops& ops();
Backend active_backend();
const char* backend_name(Backend b);

// Force a backend (tests use this to cross-check). Throws ConfigError if the
// requested backend is unavailable.
void set_backend(Backend b);

} // namespace gflow::kernels
