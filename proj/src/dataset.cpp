#include "dual/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "dual/errors.hpp"
#include "dual/io.hpp"
#include "dual/rng.hpp"

namespace dual {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_double(const std::string& field, double& out) {
    const std::string t = trim(field);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

bool parse_index(const std::string& s, std::size_t& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size()) return false;
    out = static_cast<std::size_t>(v);
    return true;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 bool has_header) {
    std::ifstream in(path);
    if (!in) throw ContractViolation("load_csv: cannot open " + path.string());

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw ContractViolation("load_csv: " + path.string() + " is empty");

    std::vector<std::string> header;
    std::size_t first_data_line = 0;
    if (has_header) {
        header = split_fields(lines[0]);
        first_data_line = 1;
        if (lines.size() == 1)
            throw ContractViolation("load_csv: " + path.string() + " has no data rows");
    }

    const std::size_t n_cols =
        has_header ? header.size() : split_fields(lines[0]).size();
    if (n_cols < 2)
        throw ContractViolation("load_csv: need at least one feature column plus the label");

    // resolve the label column: header name first, then a numeric index
    std::size_t label_index = n_cols;
    if (has_header) {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (trim(header[c]) == trim(label_column)) label_index = c;
    }
    if (label_index == n_cols && !parse_index(label_column, label_index))
        throw ContractViolation("load_csv: label column '" + label_column +
                                "' is neither a header name nor an index");
    if (label_index >= n_cols)
        throw ContractViolation("load_csv: label column index " +
                                std::to_string(label_index) + " out of range");

    const std::size_t d = n_cols - 1;
    const std::size_t n = lines.size() - first_data_line;
    Dataset dataset;
    dataset.source_id = path.filename().string();
    dataset.features = Matrix(d, n);
    dataset.labels.resize(n);

    std::map<std::string, int> label_ids;
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t line_no = first_data_line + r + 1;  // 1-based file line
        const auto fields = split_fields(lines[first_data_line + r]);
        if (fields.size() != n_cols)
            throw ContractViolation("load_csv: row " + std::to_string(line_no) + " has " +
                                    std::to_string(fields.size()) + " fields, expected " +
                                    std::to_string(n_cols));
        std::size_t fi = 0;
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (c == label_index) continue;
            double value = 0.0;
            if (!parse_double(fields[c], value)) {
                const std::string col_name =
                    has_header ? trim(header[c]) : "column " + std::to_string(c);
                throw ContractViolation("load_csv: row " + std::to_string(line_no) + ", " +
                                        col_name + ": missing or non-numeric value '" +
                                        trim(fields[c]) + "'");
            }
            dataset.features(fi++, r) = value;
        }
        const std::string token = trim(fields[label_index]);
        if (token.empty())
            throw ContractViolation("load_csv: row " + std::to_string(line_no) +
                                    ": empty label");
        const auto [it, inserted] =
            label_ids.emplace(token, static_cast<int>(dataset.class_names.size()));
        if (inserted) dataset.class_names.push_back(token);
        dataset.labels[r] = it->second;
    }

    for (std::size_t c = 0; c < n_cols; ++c) {
        if (c == label_index) continue;
        dataset.feature_names.push_back(has_header ? trim(header[c])
                                                   : "f" + std::to_string(c));
    }
    return dataset;
}

Scaler zscore_fit(const Matrix& features) {
    const std::size_t d = features.rows(), n = features.cols();
    Scaler scaler;
    scaler.mean.resize(d);
    scaler.scale.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        bool constant = true;
        for (std::size_t j = 1; j < n && constant; ++j)
            constant = features(i, j) == features(i, 0);
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += features(i, j);
        mean /= static_cast<double>(n);
        if (constant) {
            scaler.mean[i] = features(i, 0);  // exact, so the output is exactly zero
            scaler.scale[i] = 1.0;
            continue;
        }
        double var = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double c = features(i, j) - mean;
            var += c * c;
        }
        var /= static_cast<double>(n);
        scaler.mean[i] = mean;
        scaler.scale[i] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return scaler;
}

Matrix zscore_apply(const Scaler& scaler, const Matrix& features) {
    if (features.rows() != scaler.mean.size())
        throw ContractViolation("zscore_apply: feature count mismatch");
    Matrix out(features.rows(), features.cols());
    for (std::size_t i = 0; i < features.rows(); ++i)
        for (std::size_t j = 0; j < features.cols(); ++j)
            out(i, j) = (features(i, j) - scaler.mean[i]) / scaler.scale[i];
    return out;
}

Split split_candidates(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw ContractViolation("split_candidates: need at least two samples");
    std::vector<std::size_t> indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = i;
    RandomEngine rng(seed);
    rng.shuffle(indices);

    Split split;
    split.seed = seed;
    const std::size_t n_cand = n / 2;
    split.candidate_indices.assign(indices.begin(), indices.begin() + n_cand);
    split.test_indices.assign(indices.begin() + n_cand, indices.end());
    std::sort(split.candidate_indices.begin(), split.candidate_indices.end());
    std::sort(split.test_indices.begin(), split.test_indices.end());
    return split;
}

Matrix take_columns(const Matrix& features, const std::vector<std::size_t>& indices) {
    Matrix out(features.rows(), indices.size());
    for (std::size_t j = 0; j < indices.size(); ++j) {
        if (indices[j] >= features.cols())
            throw ContractViolation("take_columns: index out of range");
        for (std::size_t i = 0; i < features.rows(); ++i)
            out(i, j) = features(i, indices[j]);
    }
    return out;
}

std::vector<int> take_labels(const std::vector<int>& labels,
                             const std::vector<std::size_t>& indices) {
    std::vector<int> out(indices.size());
    for (std::size_t j = 0; j < indices.size(); ++j) {
        if (indices[j] >= labels.size())
            throw ContractViolation("take_labels: index out of range");
        out[j] = labels[indices[j]];
    }
    return out;
}

Dataset make_blobs(const std::vector<BlobSpec>& blobs, std::uint64_t seed) {
    if (blobs.empty()) throw ContractViolation("make_blobs: no blobs given");
    const std::size_t d = blobs.front().center.size();
    std::size_t n = 0;
    for (const auto& blob : blobs) {
        if (blob.center.size() != d)
            throw ContractViolation("make_blobs: centers have mixed dimensions");
        if (blob.count == 0) throw ContractViolation("make_blobs: empty blob");
        n += blob.count;
    }

    RandomEngine rng(seed);
    Dataset dataset;
    dataset.source_id = "synthetic";
    dataset.features = Matrix(d, n);
    dataset.labels.resize(n);
    std::size_t col = 0;
    for (std::size_t b = 0; b < blobs.size(); ++b) {
        for (std::size_t s = 0; s < blobs[b].count; ++s, ++col) {
            for (std::size_t i = 0; i < d; ++i)
                dataset.features(i, col) = blobs[b].center[i] + blobs[b].sigma * rng.next_normal();
            dataset.labels[col] = static_cast<int>(b);
        }
    }
    for (std::size_t i = 0; i < d; ++i) dataset.feature_names.push_back("f" + std::to_string(i));
    for (std::size_t b = 0; b < blobs.size(); ++b)
        dataset.class_names.push_back(std::to_string(b));
    return dataset;
}

Dataset make_axis_blobs(const std::vector<std::size_t>& counts, std::size_t dim,
                        double separation, double sigma, std::uint64_t seed) {
    if (dim == 0) throw ContractViolation("make_axis_blobs: dim must be positive");
    std::vector<BlobSpec> blobs;
    for (std::size_t b = 0; b < counts.size(); ++b) {
        BlobSpec blob;
        blob.count = counts[b];
        blob.sigma = sigma;
        blob.center.assign(dim, 0.0);
        blob.center[b % dim] = separation * (1.0 + static_cast<double>(b / dim));
        blobs.push_back(std::move(blob));
    }
    return make_blobs(blobs, seed);
}

void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path) {
    std::string csv;
    for (const auto& name : dataset.feature_names) csv += name + ',';
    csv += "label\n";
    for (std::size_t j = 0; j < dataset.n_samples(); ++j) {
        for (std::size_t i = 0; i < dataset.n_features(); ++i)
            csv += format_double(dataset.features(i, j)) + ',';
        csv += dataset.class_names[dataset.labels[j]] + '\n';
    }
    write_text_atomic(path, csv);
}

}  // namespace dual
