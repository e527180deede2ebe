#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dual/matrix.hpp"

namespace dual {

enum class Strategy { dual, dual_wo, random, kmeans };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

// m distinct uniform indices from [0, n), deterministic per seed.
std::vector<std::size_t> random_select(std::size_t n, std::size_t m, std::uint64_t seed);

// Cluster the features, then take the points nearest to the centroids.
std::vector<std::size_t> kmeans_select(const Matrix& features, std::size_t k, std::size_t m,
                                       std::uint64_t seed);

}  // namespace dual
