#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gflow/matrix.hpp"

namespace gflow {

// Train/valid/test node index sets, each sorted ascending.
struct Splits {
    std::vector<int> train;
    std::vector<int> valid;
    std::vector<int> test;
};

// Immutable node-classification instance: symmetric binary adjacency (CSR,
// no stored self-loops), dense features, labels, splits, and the cached
// symmetric-normalized adjacency D^{-1/2} (A+I) D^{-1/2}. Safe for shared
// concurrent reads after construction.
class Graph {
public:
    // Edges as undirected (u, v) pairs; duplicates and self-loops are
    // dropped. Validates labels and split structure.
    static Graph create(Matrix features, std::vector<int> labels,
                        const std::vector<std::pair<int, int>>& edges, Splits splits);

    int n() const { return n_; }
    int feature_dim() const { return d_; }
    int num_classes() const { return c_; }

    // Sorted adjacent node indices, excluding v itself.
    std::span<const int> neighbors(int v) const;
    int degree(int v) const;
    bool has_edge(int u, int v) const;
    long num_edges() const { return static_cast<long>(adj_.col.size()) / 2; }

    const Matrix& features() const { return features_; }
    const std::vector<int>& labels() const { return labels_; }
    const Splits& splits() const { return splits_; }
    const CsrMatrix& adjacency() const { return adj_; }

    // Cached D^{-1/2} (A+I) D^{-1/2} with D_ii = deg_i + 1.
    const CsrMatrix& normalized_adjacency() const { return norm_adj_; }

private:
    Graph() = default;

    int n_ = 0, d_ = 0, c_ = 0;
    CsrMatrix adj_;      // binary, values omitted (val empty)
    CsrMatrix norm_adj_; // weighted, includes self-loops
    Matrix features_;
    std::vector<int> labels_;
    Splits splits_;
};

// File loaders per the on-disk formats (see README): whitespace-separated
// edge list with '#' comments, headerless CSV features, single-column
// integer labels, JSON splits. When splits_path is absent, splits are
// generated with split_nodes using the given sizes and seed.
struct SplitSpec {
    int valid_size = 0;
    int test_size = 0;
    std::uint64_t seed = 0; // default split seed, recorded in logs
};

Graph load_graph(const std::string& edges_path, const std::string& features_path,
                 const std::string& labels_path,
                 const std::optional<std::string>& splits_path = std::nullopt,
                 const SplitSpec& fallback_split = {});

// Writes the four files back out; load(save(g)) reproduces g exactly.
void save_graph(const Graph& g, const std::string& edges_path, const std::string& features_path,
                const std::string& labels_path, const std::string& splits_path);

// Deterministic split draw: shuffle by seed, take valid then test, rest is
// train. Redraws with derived seeds until every class appears in train
// (bounded retries), else throws ValidationError.
Splits split_nodes(const std::vector<int>& labels, int n, int valid_size, int test_size,
                   std::uint64_t seed);
Splits split_nodes(const Graph& g, int valid_size, int test_size, std::uint64_t seed);

Splits load_splits(const std::string& path, int n);
void save_splits(const Splits& s, const std::string& path);

} // namespace gflow
