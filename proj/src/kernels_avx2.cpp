#include "gflow/kernels.hpp"

// AVX2+FMA kernels, 4 doubles per vector. This translation unit is compiled
// with -mavx2 -mfma on x86-64 and left empty elsewhere; dispatch checks the
// CPU at runtime before routing here. Unaligned loads throughout since
// Matrix rows have no padding guarantees.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace gflow::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

void gemm_nn_avx2(const double* a, const double* b, double* c,
                  std::size_t m, std::size_t k, std::size_t n, bool acc) {
    if (!acc) std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t t = 0; t < k; ++t) {
            const __m256d av = _mm256_set1_pd(arow[t]);
            const double* brow = b + t * n;
            std::size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cj = _mm256_loadu_pd(crow + j);
                cj = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), cj);
                _mm256_storeu_pd(crow + j, cj);
            }
            for (; j < n; ++j) crow[j] += arow[t] * brow[j];
        }
    }
}

void gemm_tn_avx2(const double* a, const double* b, double* c,
                  std::size_t m, std::size_t k, std::size_t n, bool acc) {
    if (!acc) std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t t = 0; t < k; ++t) {
        const double* arow = a + t * m;
        const double* brow = b + t * n;
        for (std::size_t i = 0; i < m; ++i) {
            const __m256d av = _mm256_set1_pd(arow[i]);
            double* crow = c + i * n;
            std::size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cj = _mm256_loadu_pd(crow + j);
                cj = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), cj);
                _mm256_storeu_pd(crow + j, cj);
            }
            for (; j < n; ++j) crow[j] += arow[i] * brow[j];
        }
    }
}

void gemm_nt_avx2(const double* a, const double* b, double* c,
                  std::size_t m, std::size_t k, std::size_t n, bool acc) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            __m256d accv = _mm256_setzero_pd();
            std::size_t t = 0;
            for (; t + 4 <= k; t += 4) {
                accv = _mm256_fmadd_pd(_mm256_loadu_pd(arow + t), _mm256_loadu_pd(brow + t), accv);
            }
            double s = hsum(accv);
            for (; t < k; ++t) s += arow[t] * brow[t];
            crow[j] = acc ? crow[j] + s : s;
        }
    }
}

void csr_dense_avx2(const int* row_ptr, const int* col, const double* val, int rows,
                    const double* h, double* c, std::size_t f) {
    for (int i = 0; i < rows; ++i) {
        double* crow = c + static_cast<std::size_t>(i) * f;
        std::memset(crow, 0, f * sizeof(double));
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            const __m256d w = _mm256_set1_pd(val[p]);
            const double* hrow = h + static_cast<std::size_t>(col[p]) * f;
            std::size_t j = 0;
            for (; j + 4 <= f; j += 4) {
                __m256d cj = _mm256_loadu_pd(crow + j);
                cj = _mm256_fmadd_pd(w, _mm256_loadu_pd(hrow + j), cj);
                _mm256_storeu_pd(crow + j, cj);
            }
            for (; j < f; ++j) crow[j] += val[p] * hrow[j];
        }
    }
}

void relu_avx2(const double* x, double* y, std::size_t len) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
    }
    for (; i < len; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_avx2(const double* pre, const double* gout, double* gin, std::size_t len) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(pre + i), zero, _CMP_GT_OQ);
        _mm256_storeu_pd(gin + i, _mm256_and_pd(mask, _mm256_loadu_pd(gout + i)));
    }
    for (; i < len; ++i) gin[i] = pre[i] > 0.0 ? gout[i] : 0.0;
}

void adam_update_avx2(double* p, double* m, double* v, const double* g, std::size_t len,
                      double eta, double b1, double b2, double bc1, double bc2, double eps) {
    const __m256d vb1 = _mm256_set1_pd(b1);
    const __m256d vb2 = _mm256_set1_pd(b2);
    const __m256d vb1c = _mm256_set1_pd(1.0 - b1);
    const __m256d vb2c = _mm256_set1_pd(1.0 - b2);
    const __m256d veta = _mm256_set1_pd(eta);
    const __m256d vbc1 = _mm256_set1_pd(bc1);
    const __m256d vbc2 = _mm256_set1_pd(bc2);
    const __m256d veps = _mm256_set1_pd(eps);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        const __m256d gi = _mm256_loadu_pd(g + i);
        __m256d mi = _mm256_fmadd_pd(vb1, _mm256_loadu_pd(m + i), _mm256_mul_pd(vb1c, gi));
        __m256d vi = _mm256_fmadd_pd(vb2, _mm256_loadu_pd(v + i),
                                     _mm256_mul_pd(vb2c, _mm256_mul_pd(gi, gi)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vi, vbc2)), veps);
        const __m256d step = _mm256_div_pd(_mm256_mul_pd(veta, _mm256_mul_pd(mi, vbc1)), denom);
        _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
    }
    for (; i < len; ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        p[i] -= eta * (m[i] * bc1) / (std::sqrt(v[i] * bc2) + eps);
    }
}

void axpy_avx2(double a, const double* x, double* y, std::size_t len) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        __m256d yi = _mm256_loadu_pd(y + i);
        yi = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yi);
        _mm256_storeu_pd(y + i, yi);
    }
    for (; i < len; ++i) y[i] += a * x[i];
}

void scale_avx2(double a, double* x, std::size_t len) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    }
    for (; i < len; ++i) x[i] *= a;
}

double dot_avx2(const double* x, const double* y, std::size_t len) {
    __m256d accv = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        accv = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), accv);
    }
    double s = hsum(accv);
    for (; i < len; ++i) s += x[i] * y[i];
    return s;
}

double reduce_max_avx2(const double* x, std::size_t len) {
    if (len < 4) {
        double m = x[0];
        for (std::size_t i = 1; i < len; ++i) m = std::max(m, x[i]);
        return m;
    }
    __m256d mv = _mm256_loadu_pd(x);
    std::size_t i = 4;
    for (; i + 4 <= len; i += 4) mv = _mm256_max_pd(mv, _mm256_loadu_pd(x + i));
    __m128d lo = _mm_max_pd(_mm256_castpd256_pd128(mv), _mm256_extractf128_pd(mv, 1));
    double m = std::max(_mm_cvtsd_f64(lo), _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo)));
    for (; i < len; ++i) m = std::max(m, x[i]);
    return m;
}

double reduce_sum_avx2(const double* x, std::size_t len) {
    __m256d accv = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) accv = _mm256_add_pd(accv, _mm256_loadu_pd(x + i));
    double s = hsum(accv);
    for (; i < len; ++i) s += x[i];
    return s;
}

} // namespace

const Ops avx2_ops = {
    gemm_nn_avx2,  gemm_tn_avx2,       gemm_nt_avx2, csr_dense_avx2,
    relu_avx2,     relu_backward_avx2, adam_update_avx2,
    axpy_avx2,     scale_avx2,         dot_avx2,     reduce_max_avx2,
    reduce_sum_avx2,
};

} // namespace gflow::kernels

#endif // x86-64
