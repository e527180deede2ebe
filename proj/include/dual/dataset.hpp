#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dual/matrix.hpp"

namespace dual {

// Features in column-sample layout; labels remapped to contiguous ids in
// first-appearance order (class_names keeps the original tokens).
struct Dataset {
    Matrix features;  // d x n
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    std::string source_id;

    std::size_t n_samples() const { return features.cols(); }
    std::size_t n_features() const { return features.rows(); }
    std::size_t n_classes() const { return class_names.size(); }
};

struct Split {
    std::vector<std::size_t> candidate_indices;  // floor(n/2), ascending
    std::vector<std::size_t> test_indices;       // the rest, ascending
    std::uint64_t seed = 0;
};

// Per-feature standardization parameters fitted on one matrix (population
// variance); constant features get scale 1 so they map to zero.
struct Scaler {
    std::vector<double> mean;
    std::vector<double> scale;
};

// label_column is a header name or a 0-based column index; an index is
// required when has_header is false. Any blank or non-numeric feature field
// fails the load with the offending row and column named.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 bool has_header);

Scaler zscore_fit(const Matrix& features);
Matrix zscore_apply(const Scaler& scaler, const Matrix& features);

Split split_candidates(std::size_t n, std::uint64_t seed);

// columns of the original matrix picked out in the given order
Matrix take_columns(const Matrix& features, const std::vector<std::size_t>& indices);
std::vector<int> take_labels(const std::vector<int>& labels,
                             const std::vector<std::size_t>& indices);

struct BlobSpec {
    std::size_t count = 0;
    std::vector<double> center;
    double sigma = 1.0;
};

// Isotropic Gaussian blobs, one class per blob, deterministic per seed.
Dataset make_blobs(const std::vector<BlobSpec>& blobs, std::uint64_t seed);

// Blob i centered at separation * (1 + i/dim) along axis (i mod dim).
Dataset make_axis_blobs(const std::vector<std::size_t>& counts, std::size_t dim,
                        double separation, double sigma, std::uint64_t seed);

void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace dual
