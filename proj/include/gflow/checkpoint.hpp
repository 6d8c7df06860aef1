#pragma once

#include <string>

#include <json.hpp>

#include "gflow/nn.hpp"

namespace gflow {

// Parameter checkpoint container:
//   magic "GFLOWCK1" | u64 manifest length | manifest JSON (UTF-8) |
//   per tensor: u64 rows, u64 cols, rows*cols little-endian f64.
// Tensor order: layer 0 weights, layer 0 bias (1 x out), layer 1 weights, ...
// The manifest records layer shapes and activations plus caller metadata
// (policy kind, graph width, ...), and is returned verbatim on load.

void save_checkpoint(const std::string& path, const DenseParams& params,
                     const nlohmann::json& metadata);

struct LoadedCheckpoint {
    DenseParams params;
    nlohmann::json metadata;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

} // namespace gflow
