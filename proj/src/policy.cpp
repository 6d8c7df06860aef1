#include "gflow/policy.hpp"

#include <algorithm>
#include <cmath>

#include "gflow/checkpoint.hpp"
#include "gflow/errors.hpp"
#include "gflow/kernels.hpp"

namespace gflow {

namespace {
namespace k = kernels;
}

const char* policy_kind_name(PolicyKind kd) { return kd == PolicyKind::Mlp ? "mlp" : "gcn_head"; }

PolicyKind policy_kind_from_name(const std::string& name) {
    if (name == "mlp") return PolicyKind::Mlp;
    if (name == "gcn_head") return PolicyKind::GcnHead;
    throw ConfigError("unknown policy kind: " + name + " (expected mlp or gcn_head)");
}

PolicyNet PolicyNet::create_mlp(int n, const std::vector<int>& hidden, std::uint64_t seed) {
    if (n < 1) throw ConfigError("mlp policy needs n >= 1");
    std::vector<std::size_t> dims{static_cast<std::size_t>(n) * 5};
    std::vector<Activation> acts;
    for (int h : hidden) {
        dims.push_back(static_cast<std::size_t>(h));
        acts.push_back(Activation::Relu);
    }
    dims.push_back(static_cast<std::size_t>(n));
    acts.push_back(Activation::Identity);

    PolicyNet p;
    p.kind_ = PolicyKind::Mlp;
    p.params_ = make_mlp(dims, acts);
    Rng rng(seed);
    glorot_init(p.params_, rng);
    return p;
}

PolicyNet PolicyNet::create_gcn_head(const std::vector<int>& hidden, std::uint64_t seed) {
    if (hidden.empty()) throw ConfigError("gcn_head policy needs at least one hidden width");
    std::vector<std::size_t> dims{5};
    std::vector<Activation> acts;
    for (int h : hidden) {
        dims.push_back(static_cast<std::size_t>(h));
        acts.push_back(Activation::Relu);
    }
    dims.push_back(1); // linear head: embedding -> scalar flow per node
    acts.push_back(Activation::Identity);

    PolicyNet p;
    p.kind_ = PolicyKind::GcnHead;
    p.gcn_layers_ = static_cast<int>(hidden.size());
    p.params_ = make_mlp(dims, acts);
    Rng rng(seed);
    glorot_init(p.params_, rng);
    return p;
}

PolicyNet PolicyNet::from_parts(PolicyKind kind, DenseParams params, int gcn_layers) {
    PolicyNet p;
    p.kind_ = kind;
    p.params_ = std::move(params);
    p.gcn_layers_ = gcn_layers;
    p.params_.check_chain();
    return p;
}

int PolicyNet::bound_n() const {
    if (kind_ != PolicyKind::Mlp) return -1;
    return static_cast<int>(params_.input_dim() / 5);
}

Matrix state_matrix(const State& s) {
    const std::size_t n = s.v.size();
    if (!s.phi || s.phi->rows() != n || s.phi->cols() != 4)
        throw ShapeError("state_matrix: flow features missing or misshapen");
    Matrix m(n, 5);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, 0) = static_cast<double>(s.v[i]);
        for (std::size_t j = 0; j < 4; ++j) m(i, j + 1) = (*s.phi)(i, j);
    }
    return m;
}

std::vector<double> log_flow(const PolicyNet& policy, const Graph& graph, const State& s,
                             PolicyCache* cache) {
    if (static_cast<int>(s.v.size()) != graph.n())
        throw ShapeError("state size does not match graph node count");
    Matrix sm = state_matrix(s);
    const std::size_t n = sm.rows();
    std::vector<double> out(n);

    if (policy.kind() == PolicyKind::Mlp) {
        if (policy.params().input_dim() != n * 5)
            throw ShapeError("mlp policy built for n=" + std::to_string(policy.bound_n()) +
                             " applied to graph with n=" + std::to_string(n));
        // Flatten the state matrix row-major into a single sample.
        Matrix flat(1, n * 5);
        std::copy(sm.data(), sm.data() + sm.size(), flat.data());
        MlpCache local;
        MlpCache* mc = cache ? &cache->mlp : &local;
        Matrix y = mlp_forward(policy.params(), flat, mc);
        std::copy(y.data(), y.data() + n, out.begin());
    } else {
        const auto& params = policy.params();
        const std::size_t gl = static_cast<std::size_t>(policy.gcn_layers());
        GcnCache local;
        GcnCache* gc = cache ? &cache->gcn : &local;
        Matrix h = gcn_forward(graph.normalized_adjacency(), params, sm, 0, gl, gc);
        const Layer& head = params.layers.back();
        Matrix z(n, 1);
        k::ops().gemm_nn(h.data(), head.w.data(), z.data(), n, h.cols(), 1, false);
        for (std::size_t i = 0; i < n; ++i) out[i] = z(i, 0) + head.b[0];
        if (cache) cache->head_in = std::move(h);
    }
    for (double x : out) {
        if (!std::isfinite(x)) throw TrainingError("non-finite log-flow emitted by the policy");
    }
    if (cache) cache->state_mat = std::move(sm);
    return out;
}

ActionDistribution action_distribution(const PolicyNet& policy, const Graph& graph, const State& s,
                                       const std::vector<int>& candidates) {
    if (candidates.empty()) throw PreconditionError("action_distribution: empty candidate set");
    const std::vector<double> lf = log_flow(policy, graph, s);
    ActionDistribution dist;
    dist.support = candidates;
    dist.probs.assign(lf.size(), 0.0);
    double mx = lf[candidates[0]];
    for (int a : candidates) mx = std::max(mx, lf[a]);
    double sum = 0.0;
    for (int a : candidates) {
        const double e = std::exp(lf[a] - mx);
        dist.probs[a] = e;
        sum += e;
    }
    for (int a : candidates) dist.probs[a] /= sum;
    return dist;
}

int sample_from_distribution(const ActionDistribution& dist, Rng& rng, double epsilon) {
    const std::size_t kcount = dist.support.size();
    const double u = rng.uniform01();
    double cum = 0.0;
    for (int a : dist.support) {
        const double p = (1.0 - epsilon) * dist.probs[a] + epsilon / static_cast<double>(kcount);
        cum += p;
        if (u < cum) return a;
    }
    return dist.support.back(); // guard against rounding at the top end
}

int sample_action(const PolicyNet& policy, const Graph& graph, const State& s,
                  const std::vector<int>& candidates, Rng& rng, double epsilon) {
    return sample_from_distribution(action_distribution(policy, graph, s, candidates), rng, epsilon);
}

int greedy_action(const ActionDistribution& dist) {
    int best = dist.support.front();
    for (int a : dist.support) {
        if (dist.probs[a] > dist.probs[best]) best = a;
    }
    return best;
}

void flow_gradients(const PolicyNet& policy, const Graph& graph, const PolicyCache& cache,
                    const std::vector<double>& upstream, DenseGrads& grads) {
    const std::size_t n = cache.state_mat.rows();
    if (upstream.size() != n) throw ShapeError("flow_gradients: upstream length != n");

    if (policy.kind() == PolicyKind::Mlp) {
        Matrix gout(1, n);
        std::copy(upstream.begin(), upstream.end(), gout.data());
        mlp_backward(policy.params(), cache.mlp, gout, grads);
        return;
    }
    const auto& params = policy.params();
    const std::size_t gl = static_cast<std::size_t>(policy.gcn_layers());
    const std::size_t head_idx = params.layers.size() - 1;
    const Layer& head = params.layers[head_idx];
    // Head: z = H w + b per node.
    Matrix delta(n, 1);
    std::copy(upstream.begin(), upstream.end(), delta.data());
    k::ops().gemm_tn(cache.head_in.data(), delta.data(), grads.dw[head_idx].data(),
                     cache.head_in.cols(), n, 1, true);
    grads.db[head_idx][0] += k::ops().reduce_sum(delta.data(), n);
    Matrix dh(n, head.w.rows());
    k::ops().gemm_nt(delta.data(), head.w.data(), dh.data(), n, 1, head.w.rows(), false);
    gcn_backward(graph.normalized_adjacency(), params, cache.gcn, dh, 0, gl, grads);
}

void save_policy(const std::string& path, const PolicyNet& policy) {
    nlohmann::json meta;
    meta["kind"] = policy_kind_name(policy.kind());
    meta["gcn_layers"] = policy.gcn_layers();
    if (policy.kind() == PolicyKind::Mlp) meta["n"] = policy.bound_n();
    save_checkpoint(path, policy.params(), meta);
}

PolicyNet load_policy(const std::string& path) {
    LoadedCheckpoint ck = load_checkpoint(path);
    if (!ck.metadata.contains("kind"))
        throw ParseError(path, 0, "checkpoint carries no policy kind");
    const PolicyKind kind = policy_kind_from_name(ck.metadata["kind"].get<std::string>());
    const int gcn_layers = ck.metadata.value("gcn_layers", 0);
    return PolicyNet::from_parts(kind, std::move(ck.params), gcn_layers);
}

} // namespace gflow
