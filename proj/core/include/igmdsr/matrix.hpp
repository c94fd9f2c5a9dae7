#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "igmdsr/errors.hpp"

namespace igmdsr {

using index_t = std::size_t;

/// Dense row-major matrix of doubles. Rows are samples throughout the
/// library. Once filled in, matrices are treated as immutable values; the
/// free operations below are pure and use a fixed accumulation order, so
/// identical inputs always produce bit-identical outputs.
class Matrix {
public:
    Matrix() = default;  // empty placeholder, 0x0

    Matrix(index_t rows, index_t cols);  // zero-filled
    Matrix(index_t rows, index_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(index_t n);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    index_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(index_t i, index_t j) { return data_[i * cols_ + j]; }
    double operator()(index_t i, index_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    friend bool operator==(const Matrix& a, const Matrix& b) = default;

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<double> data_;
};

/// "RxC" rendering for error messages.
std::string shape_of(const Matrix& a);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix hadamard(const Matrix& a, const Matrix& b);
double frobenius_distance(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& a);

// Elementwise helpers used by the model and training modules.
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);
bool all_finite(const Matrix& a);

}  // namespace igmdsr
