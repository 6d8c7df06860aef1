#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "gflow/gcn.hpp"
#include "gflow/graph.hpp"
#include "gflow/matrix.hpp"

namespace gflow {

// MDP state: the binary labeled-set indicator (the flow node, which alone
// determines parents and children) plus the n x 4 flow-feature matrix.
struct State {
    std::vector<std::uint8_t> v;
    std::shared_ptr<const Matrix> phi;
    int t = 0;
};

// Flow features per node (columns):
//   0  min(degree / alpha, 1)
//   1  entropy of predicted class probabilities / log C
//   2  mean KL(yhat_i || yhat_u) over neighbors u
//   3  mean KL(yhat_u || yhat_i) over neighbors u
// Natural logs; probabilities clamped to [1e-10, 1] before any log; isolated
// nodes get 0 in the divergence columns.
Matrix compute_flow_features(const Graph& graph, const Matrix& yhat, double alpha);

struct ParentRecord {
    std::vector<std::uint8_t> v;         // child vector with one bit cleared
    int action;                          // the cleared bit
    std::shared_ptr<const Matrix> phi;   // inherited Phi(s_{t-1})
};

// The active-learning episode: owns a private classifier, advances one
// labeled node per step, keeps the per-step flow-feature history needed for
// parent-state evaluation. Single writer; clone-free reads.
class Env {
public:
    static Env reset(const Graph& graph, int budget, double alpha, std::uint64_t seed,
                     const ClassifierConfig& clf_cfg);

    const State& state() const { return state_; }
    const std::vector<int>& labeled() const { return labeled_; }
    int budget() const { return budget_; }
    int step_count() const { return state_.t; }
    bool done() const { return state_.t == budget_; }

    // Unlabeled training nodes, sorted ascending.
    std::vector<int> candidates() const;

    // Label `action`: set its bit, retrain the classifier one epoch on the
    // grown set, recompute flow features.
    void step(int action);

    // Parents of a state recorded along this episode (t >= 1 required):
    // one record per set bit, all sharing the stored Phi(s_{t-1}).
    std::vector<ParentRecord> parents() const;
    std::vector<ParentRecord> parents_of(const State& s) const;

    // Validation accuracy of a classifier clone trained to convergence on
    // the completed label set. Requires t == budget.
    double terminal_reward() const;

    const Classifier& classifier() const { return clf_; }
    const Graph& graph() const { return *graph_; }
    const std::vector<std::shared_ptr<const Matrix>>& phi_history() const { return phi_history_; }

private:
    const Graph* graph_ = nullptr;
    Classifier clf_;
    State state_;
    std::vector<int> labeled_; // sorted
    std::vector<std::uint8_t> is_labeled_;
    std::vector<std::uint8_t> is_train_;
    int budget_ = 0;
    double alpha_ = 10.0;
    std::vector<std::shared_ptr<const Matrix>> phi_history_; // Phi(s_0..s_t)
};

} // namespace gflow
