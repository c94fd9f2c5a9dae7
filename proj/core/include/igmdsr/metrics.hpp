#pragma once

#include <vector>

#include "igmdsr/matrix.hpp"

namespace igmdsr {

/// Neighbor ranks per sample: (i, j) holds the rank of j among the neighbors
/// of i, 1 = nearest, self excluded. Ties break by ascending sample index.
/// The diagonal is unused and stays 0.
class RankTable {
public:
    explicit RankTable(index_t n) : n_(n), ranks_(n * n, 0) {}

    index_t size() const { return n_; }
    index_t& operator()(index_t i, index_t j) { return ranks_[i * n_ + j]; }
    index_t operator()(index_t i, index_t j) const { return ranks_[i * n_ + j]; }

private:
    index_t n_;
    std::vector<index_t> ranks_;
};

/// Symmetric Euclidean distance matrix with a zero diagonal.
Matrix pairwise_distances(const Matrix& x);

/// Ranks every off-diagonal entry of a distance matrix per row, ascending
/// distance, index tie-break.
RankTable rank_matrix(const Matrix& d);

/// Trustworthiness T(k) of an embedding against the original space:
/// 1 - 2/(m k (2m - 3k - 1)) * sum over embedding-neighbors of the original
/// ranks that exceed k. Requires 1 <= k < m/2, result lies in [0, 1].
double trustworthiness(const Matrix& x_orig, const Matrix& x_emb, index_t k);

/// ||X - Xhat||_F / ||X||_F.
double relative_reconstruction_error(const Matrix& x, const Matrix& xhat);

/// Fraction of test rows whose majority label among the k nearest train rows
/// (Euclidean, index tie-break, majority ties to the smallest label) matches
/// the truth.
double knn_accuracy(const Matrix& train_emb, const std::vector<double>& train_labels,
                    const Matrix& test_emb, const std::vector<double>& test_labels,
                    index_t k);

}  // namespace igmdsr
