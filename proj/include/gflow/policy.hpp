#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gflow/env.hpp"
#include "gflow/gcn.hpp"
#include "gflow/graph.hpp"
#include "gflow/nn.hpp"
#include "gflow/rng.hpp"

namespace gflow {

enum class PolicyKind { Mlp, GcnHead };

const char* policy_kind_name(PolicyKind k);
PolicyKind policy_kind_from_name(const std::string& name);

// Log-flow estimator F(s, a). Two architectures:
//  - Mlp: the n x 5 state matrix is flattened to a 5n vector and passed
//    through dense layers ending in n outputs; bound to one graph size.
//  - GcnHead: propagated layers over the state matrix followed by a per-node
//    linear head; evaluates on any graph, which is what makes the policy
//    transferable.
class PolicyNet {
public:
    static PolicyNet create_mlp(int n, const std::vector<int>& hidden, std::uint64_t seed);
    static PolicyNet create_gcn_head(const std::vector<int>& hidden, std::uint64_t seed);
    static PolicyNet from_parts(PolicyKind kind, DenseParams params, int gcn_layers);

    PolicyKind kind() const { return kind_; }
    const DenseParams& params() const { return params_; }
    DenseParams& params_mutable() { return params_; }
    int gcn_layers() const { return gcn_layers_; }

    // Number of nodes the MLP variant is bound to (input width / 5).
    int bound_n() const;

private:
    PolicyKind kind_ = PolicyKind::Mlp;
    DenseParams params_;
    int gcn_layers_ = 0; // GcnHead: leading layers that use propagation
};

// n x 5 network input: column 0 is the flow-node vector, columns 1-4 the
// flow features.
Matrix state_matrix(const State& s);

struct PolicyCache {
    Matrix state_mat;
    MlpCache mlp;     // Mlp kind
    GcnCache gcn;     // GcnHead: propagated part
    Matrix head_in;   // GcnHead: input to the linear head
};

// Raw per-node log-flows (no masking). The graph provides n (and, for
// GcnHead, the normalized adjacency). Throws ShapeError when an Mlp policy
// meets a graph whose size it was not built for.
std::vector<double> log_flow(const PolicyNet& policy, const Graph& graph, const State& s,
                             PolicyCache* cache = nullptr);

struct ActionDistribution {
    std::vector<double> probs;    // length n, zero outside the support
    std::vector<int> support;     // the candidate set, ascending
};

// Softmax of log-flows restricted to the candidate set (max-subtracted).
ActionDistribution action_distribution(const PolicyNet& policy, const Graph& graph, const State& s,
                                       const std::vector<int>& candidates);

// One categorical draw; consumes exactly one uniform variate. epsilon mixes
// in a uniform component over the candidates (training-time exploration).
int sample_action(const PolicyNet& policy, const Graph& graph, const State& s,
                  const std::vector<int>& candidates, Rng& rng, double epsilon = 0.0);
int sample_from_distribution(const ActionDistribution& dist, Rng& rng, double epsilon = 0.0);

// Argmax action, ties toward the lowest node index.
int greedy_action(const ActionDistribution& dist);

// Backpropagate d(loss)/d(log-flow) through the recorded forward pass,
// accumulating parameter gradients. Linear in the upstream vector, so
// repeated calls accumulate a sum of per-term gradients.
void flow_gradients(const PolicyNet& policy, const Graph& graph, const PolicyCache& cache,
                    const std::vector<double>& upstream, DenseGrads& grads);

// Checkpoint wrappers carrying architecture metadata.
void save_policy(const std::string& path, const PolicyNet& policy);
PolicyNet load_policy(const std::string& path);

} // namespace gflow
