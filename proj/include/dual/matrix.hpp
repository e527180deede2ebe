#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "dual/rng.hpp"

namespace dual {

// Dense row-major matrix of doubles. The one numeric carrier used throughout:
// data, latent codes, layer weights, coefficient matrices and centroids.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix random_uniform(std::size_t rows, std::size_t cols, double lo, double hi,
                                 RandomEngine& rng);
    static Matrix random_normal(std::size_t rows, std::size_t cols, RandomEngine& rng);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    const std::vector<double>& values() const { return data_; }

    // column j as a vector (one sample in the column-sample layout)
    std::vector<double> column(std::size_t j) const;
    void set_column(std::size_t j, const std::vector<double>& v);

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Standard product; summation over the inner index runs left to right, so the
// result is identical across runs of the same build.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);

// sum of squared entries
double frobenius_sq(const Matrix& a);

// sum of row-wise l2 norms
double l21_norm(const Matrix& a);

// entry i = l2 norm of row i
std::vector<double> row_l2_norms(const Matrix& a);

double max_abs(const Matrix& a);
bool is_finite(const Matrix& a);

}  // namespace dual
