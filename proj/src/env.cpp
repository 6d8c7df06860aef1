#include "gflow/env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gflow/errors.hpp"

namespace gflow {

namespace {

constexpr double kProbFloor = 1e-10;

inline double clamped(double p) { return std::min(1.0, std::max(p, kProbFloor)); }

// KL(p || q) over one probability row pair with clamping.
double kl_row(std::span<const double> p, std::span<const double> q) {
    double s = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        const double pc = clamped(p[c]);
        const double qc = clamped(q[c]);
        s += pc * std::log(pc / qc);
    }
    return s;
}

} // namespace

Matrix compute_flow_features(const Graph& graph, const Matrix& yhat, double alpha) {
    if (alpha <= 0.0) throw ConfigError("flow-feature alpha must be positive");
    const int n = graph.n();
    if (static_cast<int>(yhat.rows()) != n)
        throw ShapeError("compute_flow_features: yhat row count != n");
    const int c = static_cast<int>(yhat.cols());
    const double log_c = c > 1 ? std::log(static_cast<double>(c)) : 1.0;

    Matrix phi(n, 4);
    for (int i = 0; i < n; ++i) {
        const auto nbrs = graph.neighbors(i);
        phi(i, 0) = std::min(static_cast<double>(nbrs.size()) / alpha, 1.0);

        double h = 0.0;
        for (int cc = 0; cc < c; ++cc) {
            const double p = clamped(yhat(i, cc));
            h -= p * std::log(p);
        }
        phi(i, 1) = c > 1 ? h / log_c : 0.0;

        if (nbrs.empty()) {
            phi(i, 2) = 0.0;
            phi(i, 3) = 0.0;
            continue;
        }
        double fwd = 0.0, rev = 0.0;
        for (int u : nbrs) {
            fwd += kl_row(yhat.row(i), yhat.row(u));
            rev += kl_row(yhat.row(u), yhat.row(i));
        }
        const double inv = 1.0 / static_cast<double>(nbrs.size());
        phi(i, 2) = fwd * inv;
        phi(i, 3) = rev * inv;
    }
    return phi;
}

Env Env::reset(const Graph& graph, int budget, double alpha, std::uint64_t seed,
               const ClassifierConfig& clf_cfg) {
    const int train_size = static_cast<int>(graph.splits().train.size());
    if (budget < 1 || budget > train_size)
        throw ConfigError("budget " + std::to_string(budget) + " infeasible for " +
                          std::to_string(train_size) + " training nodes");
    Env env;
    env.graph_ = &graph;
    env.budget_ = budget;
    env.alpha_ = alpha;
    env.clf_ = Classifier::create(graph, clf_cfg, seed);
    env.is_labeled_.assign(graph.n(), 0);
    env.is_train_.assign(graph.n(), 0);
    for (int v : graph.splits().train) env.is_train_[v] = 1;

    env.state_.v.assign(graph.n(), 0);
    env.state_.t = 0;
    auto phi = std::make_shared<Matrix>(compute_flow_features(graph, env.clf_.predict_proba(), alpha));
    env.state_.phi = phi;
    env.phi_history_.push_back(phi);
    return env;
}

std::vector<int> Env::candidates() const {
    std::vector<int> out;
    out.reserve(graph_->splits().train.size() - labeled_.size());
    for (int v : graph_->splits().train) {
        if (!is_labeled_[v]) out.push_back(v);
    }
    return out;
}

void Env::step(int action) {
    if (state_.t >= budget_)
        throw BudgetExhaustedError("budget " + std::to_string(budget_) + " already spent");
    if (action < 0 || action >= graph_->n() || !is_train_[action])
        throw InvalidActionError("action " + std::to_string(action) + " is not a training node");
    if (is_labeled_[action])
        throw InvalidActionError("node " + std::to_string(action) + " is already labeled");

    is_labeled_[action] = 1;
    labeled_.insert(std::upper_bound(labeled_.begin(), labeled_.end(), action), action);
    state_.v[action] = 1;
    state_.t += 1;

    clf_.train_epoch(labeled_);
    auto phi = std::make_shared<Matrix>(compute_flow_features(*graph_, clf_.predict_proba(), alpha_));
    state_.phi = phi;
    phi_history_.push_back(phi);
}

std::vector<ParentRecord> Env::parents() const { return parents_of(state_); }

std::vector<ParentRecord> Env::parents_of(const State& s) const {
    if (s.t < 1) throw PreconditionError("the initial state has no parents");
    if (static_cast<std::size_t>(s.t) >= phi_history_.size())
        throw PreconditionError("state is not part of this episode's history");
    const auto& inherited = phi_history_[s.t - 1];
    std::vector<ParentRecord> out;
    for (std::size_t i = 0; i < s.v.size(); ++i) {
        if (!s.v[i]) continue;
        ParentRecord rec;
        rec.v = s.v;
        rec.v[i] = 0;
        rec.action = static_cast<int>(i);
        rec.phi = inherited;
        out.push_back(std::move(rec));
    }
    return out;
}

double Env::terminal_reward() const {
    if (state_.t != budget_)
        throw PreconditionError("terminal_reward requires the budget to be spent (t=" +
                                std::to_string(state_.t) + ", b=" + std::to_string(budget_) + ")");
    Classifier converged = clf_; // continue from the rollout classifier
    converged.train_to_convergence(labeled_);
    return converged.evaluate(graph_->splits().valid).accuracy;
}

} // namespace gflow
