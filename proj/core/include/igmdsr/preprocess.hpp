#pragma once

#include <vector>

#include "igmdsr/matrix.hpp"

namespace igmdsr {

/// Raw data as read from disk: m samples by n' features, plus optional
/// per-row class labels used only by the downstream kNN check.
struct RawDataset {
    Matrix u;
    std::vector<double> labels;  // empty when absent

    bool has_labels() const { return !labels.empty(); }
};

/// Non-negative encoding of a signed matrix. Column i of the source lands in
/// column i (positive part) and column origin_cols + i (magnitude of the
/// negative part); at most one of the pair is nonzero per row.
struct FoldedDataset {
    Matrix x;
    index_t origin_cols = 0;
};

struct ZscoreStats {
    std::vector<double> means;
    std::vector<double> stds;  // 0 marks a constant column
};

struct ZscoreResult {
    Matrix normalized;
    ZscoreStats stats;
};

/// Per-column z-scoring with the population (divide-by-m) standard
/// deviation. Constant columns map to all-zeros and record std 0.
ZscoreResult zscore_normalize(const Matrix& u);

/// Re-applies previously fitted statistics, matching zscore_normalize
/// bit-for-bit on the data it was fitted on.
Matrix zscore_apply(const Matrix& u, const ZscoreStats& stats);

FoldedDataset fold(const Matrix& u);
Matrix unfold(const FoldedDataset& folded);

/// Reduced dimension r = floor(n' * f) for a fraction f in (0, 1).
index_t reduced_dim(index_t n_prime, double f);

}  // namespace igmdsr
