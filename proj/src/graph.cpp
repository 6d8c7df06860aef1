#include "gflow/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gflow/errors.hpp"
#include "gflow/rng.hpp"

namespace gflow {

namespace {

constexpr int kSplitRetries = 100;

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    return in;
}

bool blank_or_comment(const std::string& line) {
    for (char ch : line) {
        if (ch == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(ch))) return false;
    }
    return true;
}

void validate_split_set(const std::vector<int>& nodes, int n, const char* name,
                        std::vector<char>& seen) {
    if (nodes.empty()) throw ValidationError(std::string("empty ") + name + " split");
    for (int v : nodes) {
        if (v < 0 || v >= n)
            throw ValidationError(std::string(name) + " split index out of range: " + std::to_string(v));
        if (seen[v])
            throw ValidationError("node " + std::to_string(v) + " appears in multiple splits");
        seen[v] = 1;
    }
}

} // namespace

Graph Graph::create(Matrix features, std::vector<int> labels,
                    const std::vector<std::pair<int, int>>& edges, Splits splits) {
    Graph g;
    g.n_ = static_cast<int>(features.rows());
    g.d_ = static_cast<int>(features.cols());
    if (g.n_ == 0) throw ValidationError("graph has no nodes");
    if (static_cast<int>(labels.size()) != g.n_)
        throw ValidationError("label count does not match node count");

    int maxlab = -1;
    for (int y : labels) {
        if (y < 0) throw ValidationError("negative label: " + std::to_string(y));
        maxlab = std::max(maxlab, y);
    }
    g.c_ = maxlab + 1;

    // Deduplicated symmetric adjacency; input self-loops dropped (self-loops
    // enter only analytically via A+I during normalization).
    std::vector<std::set<int>> nbr(g.n_);
    for (auto [u, v] : edges) {
        if (u < 0 || u >= g.n_ || v < 0 || v >= g.n_)
            throw ValidationError("edge endpoint out of range: (" + std::to_string(u) + ", " +
                                  std::to_string(v) + ")");
        if (u == v) continue;
        nbr[u].insert(v);
        nbr[v].insert(u);
    }
    g.adj_.rows = g.n_;
    g.adj_.row_ptr.assign(g.n_ + 1, 0);
    for (int i = 0; i < g.n_; ++i) g.adj_.row_ptr[i + 1] = g.adj_.row_ptr[i] + static_cast<int>(nbr[i].size());
    g.adj_.col.reserve(g.adj_.row_ptr[g.n_]);
    for (int i = 0; i < g.n_; ++i) g.adj_.col.insert(g.adj_.col.end(), nbr[i].begin(), nbr[i].end());

    // Splits: pairwise disjoint, in range, each nonempty, classes covered in train.
    std::vector<char> seen(g.n_, 0);
    validate_split_set(splits.train, g.n_, "train", seen);
    validate_split_set(splits.valid, g.n_, "valid", seen);
    validate_split_set(splits.test, g.n_, "test", seen);
    std::sort(splits.train.begin(), splits.train.end());
    std::sort(splits.valid.begin(), splits.valid.end());
    std::sort(splits.test.begin(), splits.test.end());
    std::vector<char> covered(g.c_, 0);
    for (int v : splits.train) covered[labels[v]] = 1;
    for (int c = 0; c < g.c_; ++c) {
        if (!covered[c])
            throw ValidationError("class " + std::to_string(c) + " missing from the training split");
    }

    g.features_ = std::move(features);
    g.labels_ = std::move(labels);
    g.splits_ = std::move(splits);

    // Cache the normalized adjacency now; the graph is immutable afterwards.
    auto& na = g.norm_adj_;
    na.rows = g.n_;
    na.row_ptr.assign(g.n_ + 1, 0);
    for (int i = 0; i < g.n_; ++i) {
        na.row_ptr[i + 1] = na.row_ptr[i] + g.degree(i) + 1; // +1 self-loop
    }
    na.col.resize(na.row_ptr[g.n_]);
    na.val.resize(na.row_ptr[g.n_]);
    for (int i = 0; i < g.n_; ++i) {
        const double di = 1.0 / std::sqrt(static_cast<double>(g.degree(i) + 1));
        int p = na.row_ptr[i];
        bool self_done = false;
        for (int j : g.neighbors(i)) {
            if (!self_done && i < j) {
                na.col[p] = i;
                na.val[p] = di * di;
                ++p;
                self_done = true;
            }
            na.col[p] = j;
            na.val[p] = di / std::sqrt(static_cast<double>(g.degree(j) + 1));
            ++p;
        }
        if (!self_done) {
            na.col[p] = i;
            na.val[p] = di * di;
            ++p;
        }
    }
    return g;
}

std::span<const int> Graph::neighbors(int v) const {
    if (v < 0 || v >= n_) throw IndexError("node index out of range: " + std::to_string(v));
    return adj_.row_cols(v);
}

int Graph::degree(int v) const { return static_cast<int>(neighbors(v).size()); }

bool Graph::has_edge(int u, int v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

Splits split_nodes(const std::vector<int>& labels, int n, int valid_size, int test_size,
                   std::uint64_t seed) {
    if (valid_size < 1 || test_size < 1 || valid_size + test_size >= n)
        throw ConfigError("infeasible split sizes: valid=" + std::to_string(valid_size) +
                          " test=" + std::to_string(test_size) + " n=" + std::to_string(n));
    const int c = 1 + *std::max_element(labels.begin(), labels.end());
    for (int attempt = 0; attempt < kSplitRetries; ++attempt) {
        Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(attempt)}));
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        rng.shuffle(idx);
        Splits s;
        s.valid.assign(idx.begin(), idx.begin() + valid_size);
        s.test.assign(idx.begin() + valid_size, idx.begin() + valid_size + test_size);
        s.train.assign(idx.begin() + valid_size + test_size, idx.end());
        std::vector<char> covered(c, 0);
        for (int v : s.train) covered[labels[v]] = 1;
        if (std::all_of(covered.begin(), covered.end(), [](char x) { return x != 0; })) {
            std::sort(s.train.begin(), s.train.end());
            std::sort(s.valid.begin(), s.valid.end());
            std::sort(s.test.begin(), s.test.end());
            return s;
        }
    }
    throw ValidationError("could not draw a training split covering every class after " +
                          std::to_string(kSplitRetries) + " attempts");
}

Splits split_nodes(const Graph& g, int valid_size, int test_size, std::uint64_t seed) {
    return split_nodes(g.labels(), g.n(), valid_size, test_size, seed);
}

Splits load_splits(const std::string& path, int n) {
    auto in = open_or_throw(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path, 0, std::string("invalid JSON: ") + e.what());
    }
    Splits s;
    for (auto [key, dst] : {std::pair{"train", &s.train}, {"valid", &s.valid}, {"test", &s.test}}) {
        if (!j.contains(key) || !j[key].is_array())
            throw ValidationError(path + ": missing integer array \"" + key + "\"");
        for (const auto& e : j[key]) {
            if (!e.is_number_integer()) throw ValidationError(path + ": non-integer entry in " + key);
            dst->push_back(e.get<int>());
        }
    }
    (void)n;
    return s;
}

void save_splits(const Splits& s, const std::string& path) {
    nlohmann::json j{{"train", s.train}, {"valid", s.valid}, {"test", s.test}};
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

namespace {

std::vector<std::pair<int, int>> parse_edges(const std::string& path) {
    auto in = open_or_throw(path);
    std::vector<std::pair<int, int>> edges;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank_or_comment(line)) continue;
        std::istringstream ss(line);
        long u, v;
        if (!(ss >> u >> v)) throw ParseError(path, lineno, "expected \"u v\" pair");
        std::string rest;
        if (ss >> rest) throw ParseError(path, lineno, "trailing content: " + rest);
        if (u < 0 || v < 0) throw ParseError(path, lineno, "negative node index");
        edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
    return edges;
}

Matrix parse_features(const std::string& path) {
    auto in = open_or_throw(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    long lineno = 0;
    std::size_t d = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank_or_comment(line)) continue;
        std::vector<double> row;
        const char* p = line.c_str();
        const char* end = p + line.size();
        while (p < end) {
            while (p < end && (*p == ',' || std::isspace(static_cast<unsigned char>(*p)))) ++p;
            if (p >= end) break;
            double x;
            auto [next, ec] = std::from_chars(p, end, x);
            if (ec != std::errc())
                throw ParseError(path, lineno, "invalid real number near: " + std::string(p, std::min<std::size_t>(8, end - p)));
            row.push_back(x);
            p = next;
        }
        if (row.empty()) throw ParseError(path, lineno, "empty feature row");
        if (d == 0) {
            d = row.size();
        } else if (row.size() != d) {
            throw ParseError(path, lineno, "inconsistent column count");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError(path + ": no feature rows");
    Matrix m(rows.size(), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

std::vector<int> parse_labels(const std::string& path) {
    auto in = open_or_throw(path);
    std::vector<int> labels;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank_or_comment(line)) continue;
        std::istringstream ss(line);
        long y;
        if (!(ss >> y)) throw ParseError(path, lineno, "expected integer label");
        std::string rest;
        if (ss >> rest) throw ParseError(path, lineno, "trailing content: " + rest);
        labels.push_back(static_cast<int>(y));
    }
    return labels;
}

} // namespace

Graph load_graph(const std::string& edges_path, const std::string& features_path,
                 const std::string& labels_path, const std::optional<std::string>& splits_path,
                 const SplitSpec& fallback_split) {
    Matrix features = parse_features(features_path);
    std::vector<int> labels = parse_labels(labels_path);
    const int n = static_cast<int>(features.rows());
    if (static_cast<int>(labels.size()) != n)
        throw ValidationError(labels_path + ": " + std::to_string(labels.size()) +
                              " labels for " + std::to_string(n) + " nodes");
    auto edges = parse_edges(edges_path);
    Splits splits = splits_path
                        ? load_splits(*splits_path, n)
                        : split_nodes(labels, n, fallback_split.valid_size, fallback_split.test_size,
                                      fallback_split.seed);
    return Graph::create(std::move(features), std::move(labels), edges, std::move(splits));
}

void save_graph(const Graph& g, const std::string& edges_path, const std::string& features_path,
                const std::string& labels_path, const std::string& splits_path) {
    {
        std::ofstream out(edges_path);
        if (!out) throw ConfigError("cannot write file: " + edges_path);
        for (int u = 0; u < g.n(); ++u) {
            for (int v : g.neighbors(u)) {
                if (u < v) out << u << ' ' << v << '\n';
            }
        }
    }
    {
        std::ofstream out(features_path);
        if (!out) throw ConfigError("cannot write file: " + features_path);
        char buf[64];
        for (int i = 0; i < g.n(); ++i) {
            auto row = g.features().row(i);
            for (std::size_t j = 0; j < row.size(); ++j) {
                std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
                out << (j ? "," : "") << buf;
            }
            out << '\n';
        }
    }
    {
        std::ofstream out(labels_path);
        if (!out) throw ConfigError("cannot write file: " + labels_path);
        for (int y : g.labels()) out << y << '\n';
    }
    save_splits(g.splits(), splits_path);
}

} // namespace gflow
