#include "gflow/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

// Scalar reference kernels. These define the semantics; the SIMD variants
// must agree with them to tight tolerance on random inputs.

namespace gflow::kernels {
namespace {

void gemm_nn_scalar(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n, bool acc) {
    if (!acc) std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t t = 0; t < k; ++t) {
            const double av = arow[t];
            const double* brow = b + t * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void gemm_tn_scalar(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n, bool acc) {
    if (!acc) std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t t = 0; t < k; ++t) {
        const double* arow = a + t * m;
        const double* brow = b + t * n;
        for (std::size_t i = 0; i < m; ++i) {
            const double av = arow[i];
            double* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void gemm_nt_scalar(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n, bool acc) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            double s = 0.0;
            for (std::size_t t = 0; t < k; ++t) s += arow[t] * brow[t];
            crow[j] = acc ? crow[j] + s : s;
        }
    }
}

void csr_dense_scalar(const int* row_ptr, const int* col, const double* val, int rows,
                      const double* h, double* c, std::size_t f) {
    for (int i = 0; i < rows; ++i) {
        double* crow = c + static_cast<std::size_t>(i) * f;
        std::memset(crow, 0, f * sizeof(double));
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            const double w = val[p];
            const double* hrow = h + static_cast<std::size_t>(col[p]) * f;
            for (std::size_t j = 0; j < f; ++j) crow[j] += w * hrow[j];
        }
    }
}

void relu_scalar(const double* x, double* y, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_scalar(const double* pre, const double* gout, double* gin, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) gin[i] = pre[i] > 0.0 ? gout[i] : 0.0;
}

void adam_update_scalar(double* p, double* m, double* v, const double* g, std::size_t len,
                        double eta, double b1, double b2, double bc1, double bc2, double eps) {
    for (std::size_t i = 0; i < len; ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        p[i] -= eta * (m[i] * bc1) / (std::sqrt(v[i] * bc2) + eps);
    }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) x[i] *= a;
}

double dot_scalar(const double* x, const double* y, std::size_t len) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += x[i] * y[i];
    return s;
}

double reduce_max_scalar(const double* x, std::size_t len) {
    double m = x[0];
    for (std::size_t i = 1; i < len; ++i) m = std::max(m, x[i]);
    return m;
}

double reduce_sum_scalar(const double* x, std::size_t len) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += x[i];
    return s;
}

} // namespace

const Ops scalar_ops = {
    gemm_nn_scalar,  gemm_tn_scalar,      gemm_nt_scalar, csr_dense_scalar,
    relu_scalar,     relu_backward_scalar, adam_update_scalar,
    axpy_scalar,     scale_scalar,        dot_scalar,     reduce_max_scalar,
    reduce_sum_scalar,
};

} // namespace gflow::kernels
