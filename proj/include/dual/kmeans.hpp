#pragma once

#include <cstdint>
#include <vector>

#include "dual/matrix.hpp"

namespace dual {

struct KMeansResult {
    Matrix centroids;                     // d' x K, one centroid per column
    std::vector<std::size_t> assignment;  // length n, cluster id per point
    double inertia = 0.0;                 // sum of squared distances to assigned centroid
    std::size_t iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding over column points. Stops once the
// largest centroid movement drops below tol or max_iter is reached. Empty
// clusters are repaired by moving their centroid onto the point currently
// farthest from its own centroid.
KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter = 100, double tol = 1e-6);

// m distinct point indices, nearest-to-centroid first, drawn round-robin over
// clusters ordered by per-cluster inertia (largest first). Every cluster
// contributes once before any contributes twice.
std::vector<std::size_t> nearest_to_centroids(const Matrix& points, const KMeansResult& result,
                                              std::size_t m);

}  // namespace dual
