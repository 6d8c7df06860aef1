#pragma once

#include <cstdint>
#include <vector>

#include "gflow/matrix.hpp"
#include "gflow/rng.hpp"

namespace gflow {

enum class Activation { Identity, Relu };

struct Layer {
    Matrix w;              // in x out
    std::vector<double> b; // out
    Activation act = Activation::Identity;
};

// Ordered dense layers with chained dimensions.
struct DenseParams {
    std::vector<Layer> layers;

    std::size_t input_dim() const { return layers.front().w.rows(); }
    std::size_t output_dim() const { return layers.back().w.cols(); }
    std::size_t num_params() const;

    // Throws ShapeError if consecutive dimensions do not chain.
    void check_chain() const;
};

// Gradient container congruent to DenseParams.
struct DenseGrads {
    std::vector<Matrix> dw;
    std::vector<std::vector<double>> db;

    void add(const DenseGrads& other);
    void scale(double a);
};

DenseParams make_mlp(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts);
DenseGrads make_zero_grads(const DenseParams& params);

// Glorot-uniform weights, zero biases, fully determined by the rng stream.
void glorot_init(DenseParams& params, Rng& rng);

// Forward cache: acts[0] is the input, acts[l+1] the post-activation output
// of layer l; pre[l] holds the pre-activation.
struct MlpCache {
    std::vector<Matrix> acts;
    std::vector<Matrix> pre;
};

// Row-batched forward pass: each input row flows through every layer.
Matrix mlp_forward(const DenseParams& params, const Matrix& input, MlpCache* cache = nullptr);

// Exact gradients of sum(output .* grad_out) accumulated into `grads`.
// Optionally also produces the gradient with respect to the input.
void mlp_backward(const DenseParams& params, const MlpCache& cache, const Matrix& grad_out,
                  DenseGrads& grads, Matrix* grad_input = nullptr);

// Row-wise stable softmax.
Matrix row_softmax(const Matrix& logits);

struct SoftmaxXentResult {
    double loss;   // mean over rows
    Matrix grad;   // d loss / d logits, rows sum to 0
};
SoftmaxXentResult softmax_cross_entropy(const Matrix& logits, const std::vector<int>& targets);

// Bias-corrected Adam.
struct AdamState {
    std::vector<Matrix> mw, vw;
    std::vector<std::vector<double>> mb, vb;
    long t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState make_adam_state(const DenseParams& params, double beta1 = 0.9, double beta2 = 0.999,
                          double eps = 1e-8);

// One update step. Throws TrainingError carrying the layer index if any
// gradient entry is non-finite.
void adam_step(DenseParams& params, const DenseGrads& grads, AdamState& state, double eta);

} // namespace gflow
