#pragma once

#include <cstdint>
#include <vector>

#include "igmdsr/matrix.hpp"

namespace igmdsr {

struct NmfResult {
    Matrix b;  // m x r, non-negative
    Matrix w;  // r x n, non-negative
    std::vector<double> objective_per_iter;  // 0.5 ||X - BW||_F^2, non-increasing
};

/// Classic multiplicative-update factorization of a non-negative matrix,
/// minimizing 0.5 ||X - BW||_F^2. Factors start uniform in (0, 1] from the
/// seed; denominators are floored at 1e-12; runs a fixed iteration count.
NmfResult nmf_multiplicative(const Matrix& x, index_t r, index_t iters,
                             std::uint64_t seed);

}  // namespace igmdsr
