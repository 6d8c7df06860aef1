#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace gflow {

struct MetricReport {
    double accuracy = 0.0;
    double micro_f1 = 0.0;
    double macro_f1 = 0.0;
    int n_eval = 0;
};

double accuracy(const std::vector<int>& preds, const std::vector<int>& labels);

// Globally pooled F1. For single-label multiclass prediction this equals
// accuracy; it is still computed from pooled TP/FP/FN.
double micro_f1(const std::vector<int>& preds, const std::vector<int>& labels);

// Unweighted mean of per-class F1 over all C classes. A class absent from
// both predictions and labels contributes F1 = 0.
double macro_f1(const std::vector<int>& preds, const std::vector<int>& labels, int num_classes);

MetricReport metric_report(const std::vector<int>& preds, const std::vector<int>& labels,
                           int num_classes);

// Number of rewards strictly greater than the threshold.
int high_quality_count(const std::vector<double>& rewards, double threshold);

struct EvalSummary {
    std::vector<double> rewards;
    double mean = 0.0;
    double stddev = 0.0;
    std::map<double, int> high_quality; // threshold -> count
    std::vector<int> best_label_set;
    double best_reward = 0.0;
    bool greedy = false;
    int runs = 0;
};

EvalSummary summarize(const std::vector<double>& rewards,
                      const std::vector<std::vector<int>>& label_sets,
                      const std::vector<double>& thresholds, bool greedy);

} // namespace gflow
