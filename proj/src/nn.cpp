#include "gflow/nn.hpp"

#include <cmath>
#include <string>

#include "gflow/errors.hpp"
#include "gflow/kernels.hpp"

namespace gflow {

namespace {
namespace k = kernels;

void add_bias_rows(Matrix& z, const std::vector<double>& b) {
    for (std::size_t i = 0; i < z.rows(); ++i) {
        auto row = z.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += b[j];
    }
}

bool all_finite(const double* x, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
        if (!std::isfinite(x[i])) return false;
    }
    return true;
}

} // namespace

std::size_t DenseParams::num_params() const {
    std::size_t s = 0;
    for (const auto& l : layers) s += l.w.size() + l.b.size();
    return s;
}

void DenseParams::check_chain() const {
    if (layers.empty()) throw ShapeError("empty parameter stack");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].b.size() != layers[l].w.cols())
            throw ShapeError("layer " + std::to_string(l) + ": bias width mismatch");
        if (l + 1 < layers.size() && layers[l].w.cols() != layers[l + 1].w.rows())
            throw ShapeError("layer dimensions do not chain at layer " + std::to_string(l));
    }
}

void DenseGrads::add(const DenseGrads& other) {
    for (std::size_t l = 0; l < dw.size(); ++l) {
        k::ops().axpy(1.0, other.dw[l].data(), dw[l].data(), dw[l].size());
        k::ops().axpy(1.0, other.db[l].data(), db[l].data(), db[l].size());
    }
}

void DenseGrads::scale(double a) {
    for (std::size_t l = 0; l < dw.size(); ++l) {
        k::ops().scale(a, dw[l].data(), dw[l].size());
        k::ops().scale(a, db[l].data(), db[l].size());
    }
}

DenseParams make_mlp(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts) {
    if (dims.size() < 2 || acts.size() != dims.size() - 1)
        throw ShapeError("make_mlp: need L+1 dims and L activations");
    DenseParams p;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        p.layers.push_back({Matrix(dims[l], dims[l + 1]), std::vector<double>(dims[l + 1], 0.0), acts[l]});
    }
    return p;
}

DenseGrads make_zero_grads(const DenseParams& params) {
    DenseGrads g;
    for (const auto& l : params.layers) {
        g.dw.emplace_back(l.w.rows(), l.w.cols());
        g.db.emplace_back(l.b.size(), 0.0);
    }
    return g;
}

void glorot_init(DenseParams& params, Rng& rng) {
    for (auto& l : params.layers) {
        const double limit = std::sqrt(6.0 / static_cast<double>(l.w.rows() + l.w.cols()));
        for (std::size_t i = 0; i < l.w.size(); ++i) l.w.data()[i] = rng.uniform(-limit, limit);
        std::fill(l.b.begin(), l.b.end(), 0.0);
    }
}

Matrix mlp_forward(const DenseParams& params, const Matrix& input, MlpCache* cache) {
    params.check_chain();
    if (input.cols() != params.input_dim())
        throw ShapeError("mlp_forward: input width " + std::to_string(input.cols()) +
                         " != " + std::to_string(params.input_dim()));
    if (cache) {
        cache->acts.clear();
        cache->pre.clear();
        cache->acts.push_back(input);
    }
    Matrix h = input;
    for (const auto& l : params.layers) {
        Matrix z(h.rows(), l.w.cols());
        k::ops().gemm_nn(h.data(), l.w.data(), z.data(), h.rows(), h.cols(), l.w.cols(), false);
        add_bias_rows(z, l.b);
        if (cache) cache->pre.push_back(z);
        if (l.act == Activation::Relu) {
            Matrix a(z.rows(), z.cols());
            k::ops().relu(z.data(), a.data(), z.size());
            h = std::move(a);
        } else {
            h = std::move(z);
        }
        if (cache) cache->acts.push_back(h);
    }
    return h;
}

void mlp_backward(const DenseParams& params, const MlpCache& cache, const Matrix& grad_out,
                  DenseGrads& grads, Matrix* grad_input) {
    const std::size_t L = params.layers.size();
    if (cache.acts.size() != L + 1 || cache.pre.size() != L)
        throw ShapeError("mlp_backward: cache does not match parameter stack");
    if (!grad_out.same_shape(cache.acts.back()))
        throw ShapeError("mlp_backward: grad_out shape mismatch");

    Matrix delta = grad_out; // gradient wrt layer output (post-activation)
    for (std::size_t li = L; li-- > 0;) {
        const Layer& l = params.layers[li];
        if (l.act == Activation::Relu) {
            Matrix masked(delta.rows(), delta.cols());
            k::ops().relu_backward(cache.pre[li].data(), delta.data(), masked.data(), delta.size());
            delta = std::move(masked);
        }
        const Matrix& a_in = cache.acts[li]; // m x in
        // dW (in x out) += a_in^T * delta
        k::ops().gemm_tn(a_in.data(), delta.data(), grads.dw[li].data(), a_in.cols(), a_in.rows(),
                         delta.cols(), true);
        // db += column sums of delta
        for (std::size_t i = 0; i < delta.rows(); ++i) {
            k::ops().axpy(1.0, delta.row(i).data(), grads.db[li].data(), delta.cols());
        }
        if (li > 0 || grad_input) {
            // d a_in (m x in) = delta * W^T
            Matrix dprev(delta.rows(), l.w.rows());
            k::ops().gemm_nt(delta.data(), l.w.data(), dprev.data(), delta.rows(), delta.cols(),
                             l.w.rows(), false);
            delta = std::move(dprev);
        }
    }
    if (grad_input) *grad_input = std::move(delta);
}

Matrix row_softmax(const Matrix& logits) {
    Matrix p(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        auto in = logits.row(i);
        auto out = p.row(i);
        const double mx = k::ops().reduce_max(in.data(), in.size());
        double sum = 0.0;
        for (std::size_t j = 0; j < in.size(); ++j) {
            out[j] = std::exp(in[j] - mx);
            sum += out[j];
        }
        k::ops().scale(1.0 / sum, out.data(), out.size());
    }
    return p;
}

SoftmaxXentResult softmax_cross_entropy(const Matrix& logits, const std::vector<int>& targets) {
    if (targets.size() != logits.rows())
        throw ShapeError("softmax_cross_entropy: one target per logits row required");
    const int c = static_cast<int>(logits.cols());
    for (int y : targets) {
        if (y < 0 || y >= c) throw IndexError("target class out of range: " + std::to_string(y));
    }
    const std::size_t m = logits.rows();
    SoftmaxXentResult r{0.0, row_softmax(logits)};
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        auto row = r.grad.row(i);
        const double p = row[targets[i]];
        r.loss -= std::log(std::max(p, 1e-300)) * inv_m;
        k::ops().scale(inv_m, row.data(), row.size());
        row[targets[i]] -= inv_m;
    }
    return r;
}

AdamState make_adam_state(const DenseParams& params, double beta1, double beta2, double eps) {
    AdamState s;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps = eps;
    for (const auto& l : params.layers) {
        s.mw.emplace_back(l.w.rows(), l.w.cols());
        s.vw.emplace_back(l.w.rows(), l.w.cols());
        s.mb.emplace_back(l.b.size(), 0.0);
        s.vb.emplace_back(l.b.size(), 0.0);
    }
    return s;
}

void adam_step(DenseParams& params, const DenseGrads& grads, AdamState& state, double eta) {
    const std::size_t L = params.layers.size();
    if (grads.dw.size() != L || state.mw.size() != L)
        throw ShapeError("adam_step: gradient/state layer count mismatch");
    for (std::size_t l = 0; l < L; ++l) {
        if (!grads.dw[l].same_shape(params.layers[l].w) ||
            grads.db[l].size() != params.layers[l].b.size())
            throw ShapeError("adam_step: gradient shape mismatch at layer " + std::to_string(l));
        if (!all_finite(grads.dw[l].data(), grads.dw[l].size()) ||
            !all_finite(grads.db[l].data(), grads.db[l].size()))
            throw TrainingError("non-finite gradient at layer " + std::to_string(l),
                                static_cast<int>(l));
    }
    state.t += 1;
    const double bc1 = 1.0 / (1.0 - std::pow(state.beta1, static_cast<double>(state.t)));
    const double bc2 = 1.0 / (1.0 - std::pow(state.beta2, static_cast<double>(state.t)));
    for (std::size_t l = 0; l < L; ++l) {
        auto& lay = params.layers[l];
        k::ops().adam_update(lay.w.data(), state.mw[l].data(), state.vw[l].data(),
                             grads.dw[l].data(), lay.w.size(), eta, state.beta1, state.beta2, bc1,
                             bc2, state.eps);
        k::ops().adam_update(lay.b.data(), state.mb[l].data(), state.vb[l].data(),
                             grads.db[l].data(), lay.b.size(), eta, state.beta1, state.beta2, bc1,
                             bc2, state.eps);
    }
}

} // namespace gflow
