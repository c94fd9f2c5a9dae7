#include "igmdsr/matrix.hpp"

#include <cmath>
#include <utility>

namespace igmdsr {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw shape_error(std::string(op) + ": shape mismatch " + shape_of(a) +
                          " vs " + shape_of(b));
    }
}

}  // namespace

Matrix::Matrix(index_t rows, index_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) {
        throw shape_error("Matrix: dimensions must be at least 1x1, got " + shape_of(*this));
    }
}

Matrix::Matrix(index_t rows, index_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) {
        throw shape_error("Matrix: dimensions must be at least 1x1, got " + shape_of(*this));
    }
    if (data_.size() != rows * cols) {
        throw shape_error("Matrix: " + shape_of(*this) + " needs " +
                          std::to_string(rows * cols) + " values, got " +
                          std::to_string(data_.size()));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    if (rows_ == 0 || cols_ == 0) {
        throw shape_error("Matrix: dimensions must be at least 1x1");
    }
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) {
            throw shape_error("Matrix: ragged initializer, expected " +
                              std::to_string(cols_) + " columns");
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(index_t n) {
    Matrix m(n, n);
    for (index_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::string shape_of(const Matrix& a) {
    return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw shape_error("matmul: inner dimensions disagree, " + shape_of(a) +
                          " * " + shape_of(b));
    }
    Matrix out(a.rows(), b.cols());
    // i-k-j order: each out(i,j) accumulates over k ascending, which keeps the
    // result bit-reproducible while staying cache-friendly.
    for (index_t i = 0; i < a.rows(); ++i) {
        for (index_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (index_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (index_t i = 0; i < a.rows(); ++i)
        for (index_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix out = a;
    auto od = out.data();
    auto bd = b.data();
    for (index_t i = 0; i < od.size(); ++i) od[i] *= bd[i];
    return out;
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "frobenius_distance");
    double sum = 0.0;
    auto ad = a.data();
    auto bd = b.data();
    for (index_t i = 0; i < ad.size(); ++i) {
        const double d = ad[i] - bd[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double frobenius_norm(const Matrix& a) {
    double sum = 0.0;
    for (double v : a.data()) sum += v * v;
    return std::sqrt(sum);
}

Matrix add(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix out = a;
    auto od = out.data();
    auto bd = b.data();
    for (index_t i = 0; i < od.size(); ++i) od[i] += bd[i];
    return out;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "subtract");
    Matrix out = a;
    auto od = out.data();
    auto bd = b.data();
    for (index_t i = 0; i < od.size(); ++i) od[i] -= bd[i];
    return out;
}

Matrix scale(const Matrix& a, double factor) {
    Matrix out = a;
    for (double& v : out.data()) v *= factor;
    return out;
}

bool all_finite(const Matrix& a) {
    for (double v : a.data())
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace igmdsr
