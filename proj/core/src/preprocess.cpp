#include "igmdsr/preprocess.hpp"

#include <cmath>

namespace igmdsr {

ZscoreResult zscore_normalize(const Matrix& u) {
    const index_t m = u.rows();
    const index_t n = u.cols();
    if (m < 2) {
        throw parameter_error("zscore_normalize: need at least 2 rows, got " +
                              std::to_string(m));
    }
    ZscoreStats stats;
    stats.means.resize(n);
    stats.stds.resize(n);
    for (index_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (index_t i = 0; i < m; ++i) sum += u(i, j);
        const double mean = sum / static_cast<double>(m);
        double sq = 0.0;
        for (index_t i = 0; i < m; ++i) {
            const double d = u(i, j) - mean;
            sq += d * d;
        }
        const double std = std::sqrt(sq / static_cast<double>(m));
        stats.means[j] = mean;
        stats.stds[j] = std;
    }
    return {zscore_apply(u, stats), std::move(stats)};
}

Matrix zscore_apply(const Matrix& u, const ZscoreStats& stats) {
    if (u.cols() != stats.means.size() || u.cols() != stats.stds.size()) {
        throw shape_error("zscore_apply: data has " + std::to_string(u.cols()) +
                          " columns, statistics cover " +
                          std::to_string(stats.means.size()));
    }
    Matrix out(u.rows(), u.cols());
    for (index_t j = 0; j < u.cols(); ++j) {
        const double mean = stats.means[j];
        const double std = stats.stds[j];
        if (std > 0.0) {
            for (index_t i = 0; i < u.rows(); ++i) out(i, j) = (u(i, j) - mean) / std;
        }
        // constant column: stays all-zero, keeping the column index alive for
        // unfolding
    }
    return out;
}

FoldedDataset fold(const Matrix& u) {
    const index_t m = u.rows();
    const index_t np = u.cols();
    Matrix x(m, 2 * np);
    for (index_t i = 0; i < m; ++i) {
        for (index_t j = 0; j < np; ++j) {
            const double v = u(i, j);
            if (v > 0.0) {
                x(i, j) = v;
            } else if (v < 0.0) {
                x(i, np + j) = -v;
            }
            // exact zeros leave both cells zero
        }
    }
    return {std::move(x), np};
}

Matrix unfold(const FoldedDataset& folded) {
    const Matrix& x = folded.x;
    if (x.cols() != 2 * folded.origin_cols) {
        throw shape_error("unfold: folded matrix has " + std::to_string(x.cols()) +
                          " columns, expected " +
                          std::to_string(2 * folded.origin_cols));
    }
    const index_t np = folded.origin_cols;
    Matrix u(x.rows(), np);
    for (index_t i = 0; i < x.rows(); ++i)
        for (index_t j = 0; j < np; ++j) u(i, j) = x(i, j) - x(i, np + j);
    return u;
}

index_t reduced_dim(index_t n_prime, double f) {
    if (!(f > 0.0 && f < 1.0)) {
        throw parameter_error("reduced_dim: fraction must lie in (0, 1), got " +
                              std::to_string(f));
    }
    const auto r = static_cast<long long>(
        std::floor(static_cast<double>(n_prime) * f));
    if (r < 1) {
        throw parameter_error("reduced_dim: floor(" + std::to_string(n_prime) +
                              " * " + std::to_string(f) + ") is below 1");
    }
    return static_cast<index_t>(r);
}

}  // namespace igmdsr
