#include "dual/baselines.hpp"

#include "dual/errors.hpp"
#include "dual/kmeans.hpp"
#include "dual/rng.hpp"

namespace dual {

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::dual: return "dual";
        case Strategy::dual_wo: return "dual_wo";
        case Strategy::random: return "random";
        case Strategy::kmeans: return "kmeans";
    }
    throw ContractViolation("unknown strategy value");
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "dual") return Strategy::dual;
    if (name == "dual_wo") return Strategy::dual_wo;
    if (name == "random") return Strategy::random;
    if (name == "kmeans") return Strategy::kmeans;
    throw ContractViolation("unknown strategy '" + name +
                            "' (expected dual, dual_wo, random or kmeans)");
}

std::vector<std::size_t> random_select(std::size_t n, std::size_t m, std::uint64_t seed) {
    if (m > n) throw ContractViolation("random_select: m exceeds n");
    std::vector<std::size_t> indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = i;
    RandomEngine rng(seed);
    // partial Fisher-Yates: the first m entries are a uniform m-subset
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + rng.next_index(n - i);
        std::swap(indices[i], indices[j]);
    }
    indices.resize(m);
    return indices;
}

std::vector<std::size_t> kmeans_select(const Matrix& features, std::size_t k, std::size_t m,
                                       std::uint64_t seed) {
    const KMeansResult result = kmeans(features, k, seed);
    return nearest_to_centroids(features, result, m);
}

}  // namespace dual
