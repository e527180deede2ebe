#include "dual/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dual/errors.hpp"

namespace dual {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows_ * cols_) {
        throw ContractViolation("Matrix: value count " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(rows_) + "x" +
                                std::to_string(cols_));
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw ContractViolation("Matrix::from_rows: ragged rows");
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix Matrix::random_uniform(std::size_t rows, std::size_t cols, double lo, double hi,
                              RandomEngine& rng) {
    Matrix m(rows, cols);
    for (auto& v : m.data_) v = rng.next_uniform(lo, hi);
    return m;
}

Matrix Matrix::random_normal(std::size_t rows, std::size_t cols, RandomEngine& rng) {
    Matrix m(rows, cols);
    for (auto& v : m.data_) v = rng.next_normal();
    return m;
}

std::vector<double> Matrix::column(std::size_t j) const {
    std::vector<double> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void Matrix::set_column(std::size_t j, const std::vector<double>& v) {
    if (v.size() != rows_) throw ContractViolation("Matrix::set_column: wrong length");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ContractViolation("matmul: inner dimensions " + std::to_string(a.cols()) +
                                " and " + std::to_string(b.rows()) + " differ");
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Matrix c(m, n);
    // i-k-j order: for each output entry the k-sum accumulates in ascending
    // order, and the inner j loop stays contiguous for both b and c.
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c.data() + i * n;
        const double* arow = a.data() + i * k;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double aik = arow[kk];
            const double* brow = b.data() + kk * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ContractViolation(std::string(op) + ": shape mismatch " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
    }
}

}  // namespace

Matrix add(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] + b.data()[i];
    return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "sub");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] - b.data()[i];
    return c;
}

Matrix scale(const Matrix& a, double s) {
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] * s;
    return c;
}

double frobenius_sq(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a.data()[i] * a.data()[i];
    return sum;
}

double l21_norm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
        sum += std::sqrt(s);
    }
    return sum;
}

std::vector<double> row_l2_norms(const Matrix& a) {
    std::vector<double> norms(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
        norms[i] = std::sqrt(s);
    }
    return norms;
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i]));
    return m;
}

bool is_finite(const Matrix& a) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!std::isfinite(a.data()[i])) return false;
    return true;
}

}  // namespace dual
