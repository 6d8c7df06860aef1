#include "gflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gflow/errors.hpp"

namespace gflow {

namespace {

void check_lengths(const std::vector<int>& preds, const std::vector<int>& labels) {
    if (preds.empty() || preds.size() != labels.size())
        throw ShapeError("prediction/label vectors must be nonempty and equal length");
}

} // namespace

double accuracy(const std::vector<int>& preds, const std::vector<int>& labels) {
    check_lengths(preds, labels);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) correct += preds[i] == labels[i];
    return static_cast<double>(correct) / static_cast<double>(preds.size());
}

double micro_f1(const std::vector<int>& preds, const std::vector<int>& labels) {
    check_lengths(preds, labels);
    // Pooled over classes: every prediction is one positive for its class,
    // so pooled FP == pooled FN and micro-F1 reduces to accuracy; computed
    // from the pooled counts regardless.
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] == labels[i]) {
            ++tp;
        } else {
            ++fp;
            ++fn;
        }
    }
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double macro_f1(const std::vector<int>& preds, const std::vector<int>& labels, int num_classes) {
    check_lengths(preds, labels);
    if (num_classes < 1) throw IndexError("num_classes must be >= 1");
    std::vector<long> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] < 0 || preds[i] >= num_classes)
            throw IndexError("prediction class out of range: " + std::to_string(preds[i]));
        if (labels[i] < 0 || labels[i] >= num_classes)
            throw IndexError("label class out of range: " + std::to_string(labels[i]));
        if (preds[i] == labels[i]) {
            ++tp[preds[i]];
        } else {
            ++fp[preds[i]];
            ++fn[labels[i]];
        }
    }
    double sum = 0.0;
    for (int c = 0; c < num_classes; ++c) {
        const long denom = 2 * tp[c] + fp[c] + fn[c];
        if (denom > 0) sum += 2.0 * static_cast<double>(tp[c]) / static_cast<double>(denom);
        // denom == 0: class absent from preds and labels, contributes 0
    }
    return sum / static_cast<double>(num_classes);
}

MetricReport metric_report(const std::vector<int>& preds, const std::vector<int>& labels,
                           int num_classes) {
    MetricReport r;
    r.accuracy = accuracy(preds, labels);
    r.micro_f1 = micro_f1(preds, labels);
    r.macro_f1 = macro_f1(preds, labels, num_classes);
    r.n_eval = static_cast<int>(preds.size());
    return r;
}

int high_quality_count(const std::vector<double>& rewards, double threshold) {
    return static_cast<int>(
        std::count_if(rewards.begin(), rewards.end(), [&](double r) { return r > threshold; }));
}

EvalSummary summarize(const std::vector<double>& rewards,
                      const std::vector<std::vector<int>>& label_sets,
                      const std::vector<double>& thresholds, bool greedy) {
    EvalSummary s;
    s.rewards = rewards;
    s.greedy = greedy;
    s.runs = static_cast<int>(rewards.size());
    if (rewards.empty()) return s;
    double sum = 0.0;
    for (double r : rewards) sum += r;
    s.mean = sum / static_cast<double>(rewards.size());
    double ss = 0.0;
    for (double r : rewards) ss += (r - s.mean) * (r - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(rewards.size()));
    for (double t : thresholds) s.high_quality[t] = high_quality_count(rewards, t);
    std::size_t best = 0;
    for (std::size_t i = 1; i < rewards.size(); ++i) {
        if (rewards[i] > rewards[best]) best = i;
    }
    s.best_reward = rewards[best];
    if (best < label_sets.size()) s.best_label_set = label_sets[best];
    return s;
}

} // namespace gflow
