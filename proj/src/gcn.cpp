#include "gflow/gcn.hpp"

#include <algorithm>
#include <cmath>

#include "gflow/errors.hpp"
#include "gflow/kernels.hpp"
#include "gflow/rng.hpp"

namespace gflow {

namespace {
namespace k = kernels;

void add_bias_rows(Matrix& z, const std::vector<double>& b) {
    for (std::size_t i = 0; i < z.rows(); ++i) {
        auto row = z.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += b[j];
    }
}

} // namespace

Matrix gcn_forward(const CsrMatrix& s, const DenseParams& params, const Matrix& input,
                   std::size_t first, std::size_t last, GcnCache* cache) {
    if (cache) {
        cache->acts.clear();
        cache->pre.clear();
        cache->acts.push_back(input);
    }
    Matrix h = input;
    for (std::size_t li = first; li < last; ++li) {
        const Layer& l = params.layers[li];
        if (h.cols() != l.w.rows())
            throw ShapeError("gcn_forward: width mismatch at layer " + std::to_string(li));
        Matrix t(h.rows(), l.w.cols());
        k::ops().gemm_nn(h.data(), l.w.data(), t.data(), h.rows(), h.cols(), l.w.cols(), false);
        Matrix z(h.rows(), l.w.cols());
        k::ops().csr_dense(s.row_ptr.data(), s.col.data(), s.val.data(), s.rows, t.data(), z.data(),
                           z.cols());
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

void gcn_backward(const CsrMatrix& s, const DenseParams& params, const GcnCache& cache,
                  const Matrix& grad_out, std::size_t first, std::size_t last, DenseGrads& grads,
                  Matrix* grad_input) {
    const std::size_t L = last - first;
    if (cache.acts.size() != L + 1 || cache.pre.size() != L)
        throw ShapeError("gcn_backward: stale cache");
    Matrix delta = grad_out;
    for (std::size_t step = L; step-- > 0;) {
        const std::size_t li = first + step;
        const Layer& l = params.layers[li];
        if (l.act == Activation::Relu) {
            Matrix masked(delta.rows(), delta.cols());
            k::ops().relu_backward(cache.pre[step].data(), delta.data(), masked.data(),
                                   delta.size());
            delta = std::move(masked);
        }
        // z = S (h W) + b, S symmetric: d(hW) = S^T delta = S delta
        Matrix dt(delta.rows(), delta.cols());
        k::ops().csr_dense(s.row_ptr.data(), s.col.data(), s.val.data(), s.rows, delta.data(),
                           dt.data(), delta.cols());
        const Matrix& a_in = cache.acts[step];
        k::ops().gemm_tn(a_in.data(), dt.data(), grads.dw[li].data(), a_in.cols(), a_in.rows(),
                         dt.cols(), true);
        for (std::size_t i = 0; i < delta.rows(); ++i) {
            k::ops().axpy(1.0, delta.row(i).data(), grads.db[li].data(), delta.cols());
        }
        if (step > 0 || grad_input) {
            Matrix dprev(dt.rows(), l.w.rows());
            k::ops().gemm_nt(dt.data(), l.w.data(), dprev.data(), dt.rows(), dt.cols(), l.w.rows(),
                             false);
            delta = std::move(dprev);
        }
    }
    if (grad_input) *grad_input = std::move(delta);
}

Classifier Classifier::create(const Graph& graph, const ClassifierConfig& cfg, std::uint64_t seed) {
    if (cfg.hidden < 1) throw ConfigError("classifier hidden width must be >= 1");
    Classifier clf;
    clf.graph_ = &graph;
    clf.cfg_ = cfg;
    clf.params_ = make_mlp({static_cast<std::size_t>(graph.feature_dim()),
                            static_cast<std::size_t>(cfg.hidden),
                            static_cast<std::size_t>(graph.num_classes())},
                           {Activation::Relu, Activation::Identity});
    Rng rng(seed);
    glorot_init(clf.params_, rng);
    clf.adam_ = make_adam_state(clf.params_);
    return clf;
}

Matrix Classifier::logits(GcnCache* cache) const {
    return gcn_forward(graph_->normalized_adjacency(), params_, graph_->features(), 0,
                       params_.layers.size(), cache);
}

Matrix Classifier::predict_proba() const { return row_softmax(logits()); }

Matrix Classifier::hidden_embeddings() const {
    return gcn_forward(graph_->normalized_adjacency(), params_, graph_->features(), 0, 1, nullptr);
}

double Classifier::train_epoch(const std::vector<int>& labeled) {
    if (labeled.empty()) throw PreconditionError("train_epoch: empty labeled set");
    GcnCache cache;
    Matrix out = logits(&cache);

    // Cross-entropy restricted to the labeled rows; all other rows carry
    // zero gradient.
    Matrix sub(labeled.size(), out.cols());
    std::vector<int> targets(labeled.size());
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        const int v = labeled[i];
        std::copy(out.row(v).begin(), out.row(v).end(), sub.row(i).begin());
        targets[i] = graph_->labels()[v];
    }
    auto xent = softmax_cross_entropy(sub, targets);

    Matrix grad_out(out.rows(), out.cols());
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        std::copy(xent.grad.row(i).begin(), xent.grad.row(i).end(),
                  grad_out.row(labeled[i]).begin());
    }
    DenseGrads grads = make_zero_grads(params_);
    gcn_backward(graph_->normalized_adjacency(), params_, cache, grad_out, 0,
                 params_.layers.size(), grads);
    adam_step(params_, grads, adam_, cfg_.lr);
    ++epochs_;
    return xent.loss;
}

void Classifier::train_to_convergence(const std::vector<int>& labeled) {
    train_to_convergence(labeled, cfg_.max_epochs, cfg_.patience);
}

void Classifier::train_to_convergence(const std::vector<int>& labeled, int max_epochs,
                                      int patience) {
    if (labeled.empty()) throw PreconditionError("train_to_convergence: empty labeled set");
    const auto& valid = graph_->splits().valid;
    double best_acc = evaluate(valid).accuracy;
    DenseParams best_params = params_;
    int since_improvement = 0;
    for (int e = 0; e < max_epochs; ++e) {
        train_epoch(labeled);
        const double acc = evaluate(valid).accuracy;
        if (acc > best_acc) {
            best_acc = acc;
            best_params = params_;
            since_improvement = 0;
        } else {
            ++since_improvement;
            if (patience > 0 && since_improvement >= patience) break;
        }
    }
    params_ = std::move(best_params);
}

std::vector<int> Classifier::predict(const std::vector<int>& nodes) const {
    Matrix out = logits();
    std::vector<int> preds(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto row = out.row(nodes[i]);
        int arg = 0;
        for (std::size_t c = 1; c < row.size(); ++c) {
            if (row[c] > row[arg]) arg = static_cast<int>(c); // ties keep the lowest class
        }
        preds[i] = arg;
    }
    return preds;
}

MetricReport Classifier::evaluate(const std::vector<int>& nodes) const {
    if (nodes.empty()) throw PreconditionError("evaluate: empty node set");
    std::vector<int> preds = predict(nodes);
    std::vector<int> truth(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) truth[i] = graph_->labels()[nodes[i]];
    return metric_report(preds, truth, graph_->num_classes());
}

} // namespace gflow
