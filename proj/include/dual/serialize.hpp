#pragma once

#include <filesystem>

#include <json.hpp>

#include "dual/nn.hpp"

namespace dual {

// Flat document: one entry per parameter tensor, values as hex-float strings
// so the 64-bit round trip is bit-exact.
nlohmann::ordered_json params_to_json(const DualNetwork& net);

// Rebuilds the network from the flat document; layer widths come from the
// stored shapes, activations from the architecture rule (ReLU everywhere,
// identity on the final decoder layer).
DualNetwork params_from_json(const nlohmann::ordered_json& doc);

void save_params(const DualNetwork& net, const std::filesystem::path& path);
DualNetwork load_params(const std::filesystem::path& path);

}  // namespace dual
