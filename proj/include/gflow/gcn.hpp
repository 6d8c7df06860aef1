#pragma once

#include <cstdint>
#include <vector>

#include "gflow/graph.hpp"
#include "gflow/matrix.hpp"
#include "gflow/metrics.hpp"
#include "gflow/nn.hpp"

namespace gflow {

// Shared GCN layer math: each layer computes act(S * (H W) + b) where S is
// the normalized adjacency. Used by the classifier (all layers propagated)
// and by the policy's GCN head (propagated layers followed by a dense one).

struct GcnCache {
    std::vector<Matrix> acts; // acts[0] = input features
    std::vector<Matrix> pre;  // pre-activation per layer
};

// Forward through layers [first, last) of params with propagation.
Matrix gcn_forward(const CsrMatrix& s, const DenseParams& params, const Matrix& input,
                   std::size_t first, std::size_t last, GcnCache* cache = nullptr);

// Backward mirror of gcn_forward; accumulates into grads, optionally yields
// the input gradient.
void gcn_backward(const CsrMatrix& s, const DenseParams& params, const GcnCache& cache,
                  const Matrix& grad_out, std::size_t first, std::size_t last, DenseGrads& grads,
                  Matrix* grad_input = nullptr);

struct ClassifierConfig {
    int hidden = 16;
    double lr = 1e-3;
    int max_epochs = 300;
    int patience = 20;
};

// Two-layer GCN node classifier trained full-batch on an evolving labeled
// set. Copyable: rollouts clone their own instance.
class Classifier {
public:
    static Classifier create(const Graph& graph, const ClassifierConfig& cfg, std::uint64_t seed);

    // Full forward over all nodes; row softmax of the logits.
    Matrix predict_proba() const;
    Matrix logits(GcnCache* cache = nullptr) const;

    // Post-ReLU first-layer activations (n x hidden); the node embedding
    // used by the coreset baseline.
    Matrix hidden_embeddings() const;

    // One full-batch step: cross-entropy on the labeled rows only, one Adam
    // update. Returns the pre-step loss.
    double train_epoch(const std::vector<int>& labeled);

    // Early stopping on validation accuracy; restores the best weights.
    void train_to_convergence(const std::vector<int>& labeled);
    void train_to_convergence(const std::vector<int>& labeled, int max_epochs, int patience);

    MetricReport evaluate(const std::vector<int>& nodes) const;

    // Argmax predictions over the given nodes, ties toward the lowest class.
    std::vector<int> predict(const std::vector<int>& nodes) const;

    long epochs() const { return epochs_; }
    const DenseParams& params() const { return params_; }
    DenseParams& params_mutable() { return params_; }
    const Graph& graph() const { return *graph_; }
    const ClassifierConfig& config() const { return cfg_; }

private:
    const Graph* graph_ = nullptr;
    ClassifierConfig cfg_;
    DenseParams params_;
    AdamState adam_;
    long epochs_ = 0;
};

} // namespace gflow
