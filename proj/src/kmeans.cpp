#include "dual/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dual/errors.hpp"
#include "dual/rng.hpp"

namespace dual {

namespace {

double sq_dist_col(const Matrix& points, std::size_t j, const Matrix& centroids, std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const double diff = points(i, j) - centroids(i, k);
        s += diff * diff;
    }
    return s;
}

Matrix seed_centroids(const Matrix& points, std::size_t k, RandomEngine& rng) {
    const std::size_t n = points.cols(), d = points.rows();
    Matrix centroids(d, k);
    std::vector<char> chosen(n, 0);

    std::size_t first = rng.next_index(n);
    centroids.set_column(0, points.column(first));
    chosen[first] = 1;

    std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            min_sq[j] = std::min(min_sq[j], sq_dist_col(points, j, centroids, c - 1));
            total += min_sq[j];
        }
        std::size_t pick = n;
        if (total > 0.0) {
            // D^2 sampling via the cumulative mass
            const double target = rng.next_double() * total;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                acc += min_sq[j];
                if (acc > target) {
                    pick = j;
                    break;
                }
            }
            if (pick == n) pick = n - 1;  // numeric edge of the cumulative scan
        }
        if (pick == n || chosen[pick]) {
            // duplicates exhausted the mass; take the first unchosen point
            for (std::size_t j = 0; j < n; ++j) {
                if (!chosen[j]) {
                    pick = j;
                    break;
                }
            }
        }
        centroids.set_column(c, points.column(pick));
        chosen[pick] = 1;
    }
    return centroids;
}

// nearest centroid, ties to the lowest cluster id
std::size_t nearest(const Matrix& points, std::size_t j, const Matrix& centroids) {
    std::size_t best = 0;
    double best_d = sq_dist_col(points, j, centroids, 0);
    for (std::size_t c = 1; c < centroids.cols(); ++c) {
        const double d = sq_dist_col(points, j, centroids, c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

// Assign all points; any empty cluster steals the point farthest from its own
// centroid, then assignment restarts. Bounded by k rounds.
void assign_with_repair(const Matrix& points, Matrix& centroids,
                        std::vector<std::size_t>& assignment) {
    const std::size_t n = points.cols(), k = centroids.cols();
    for (std::size_t round = 0; round <= k; ++round) {
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t j = 0; j < n; ++j) {
            assignment[j] = nearest(points, j, centroids);
            ++counts[assignment[j]];
        }
        std::size_t empty = k;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                empty = c;
                break;
            }
        }
        if (empty == k) return;
        std::size_t farthest = 0;
        double far_d = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = sq_dist_col(points, j, centroids, assignment[j]);
            if (d > far_d && counts[assignment[j]] > 1) {
                far_d = d;
                farthest = j;
            }
        }
        centroids.set_column(empty, points.column(farthest));
    }
}

}  // namespace

KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter, double tol) {
    const std::size_t n = points.cols();
    if (k == 0) throw ContractViolation("kmeans: k must be positive");
    if (k > n) throw ContractViolation("kmeans: k=" + std::to_string(k) + " exceeds n=" +
                                       std::to_string(n));
    if (!is_finite(points)) throw ContractViolation("kmeans: points must be finite");

    RandomEngine rng(seed);
    KMeansResult result;
    result.centroids = seed_centroids(points, k, rng);
    result.assignment.assign(n, 0);
    assign_with_repair(points, result.centroids, result.assignment);

    for (std::size_t it = 1; it <= max_iter; ++it) {
        // means of the assigned members
        Matrix new_centroids(points.rows(), k);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t c = result.assignment[j];
            ++counts[c];
            for (std::size_t i = 0; i < points.rows(); ++i)
                new_centroids(i, c) += points(i, j);
        }
        double movement_sq = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            double d = 0.0;
            for (std::size_t i = 0; i < points.rows(); ++i) {
                new_centroids(i, c) /= static_cast<double>(counts[c]);
                const double diff = new_centroids(i, c) - result.centroids(i, c);
                d += diff * diff;
            }
            movement_sq = std::max(movement_sq, d);
        }
        result.centroids = std::move(new_centroids);
        assign_with_repair(points, result.centroids, result.assignment);
        result.iterations = it;
        if (std::sqrt(movement_sq) < tol) break;
    }

    result.inertia = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        result.inertia += sq_dist_col(points, j, result.centroids, result.assignment[j]);
    return result;
}

std::vector<std::size_t> nearest_to_centroids(const Matrix& points, const KMeansResult& result,
                                              std::size_t m) {
    const std::size_t n = points.cols(), k = result.centroids.cols();
    if (m > n) throw ContractViolation("nearest_to_centroids: m exceeds point count");

    // members per cluster, nearest first (ties by index)
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t j = 0; j < n; ++j) members[result.assignment[j]].push_back(j);
    std::vector<double> cluster_inertia(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j : members[c])
            cluster_inertia[c] += sq_dist_col(points, j, result.centroids, c);
        std::stable_sort(members[c].begin(), members[c].end(),
                         [&](std::size_t a, std::size_t b) {
                             return sq_dist_col(points, a, result.centroids, c) <
                                    sq_dist_col(points, b, result.centroids, c);
                         });
    }

    // clusters with the largest inertia contribute first in each round
    std::vector<std::size_t> order(k);
    for (std::size_t c = 0; c < k; ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cluster_inertia[a] > cluster_inertia[b];
    });

    std::vector<std::size_t> selected;
    selected.reserve(m);
    for (std::size_t depth = 0; selected.size() < m; ++depth) {
        for (std::size_t c : order) {
            if (depth < members[c].size()) {
                selected.push_back(members[c][depth]);
                if (selected.size() == m) break;
            }
        }
    }
    return selected;
}

}  // namespace dual
