#include "igmdsr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace igmdsr {

Matrix pairwise_distances(const Matrix& x) {
    const index_t m = x.rows();
    if (m < 2) {
        throw parameter_error("pairwise_distances: need at least 2 rows");
    }
    Matrix d(m, m);
    for (index_t i = 0; i < m; ++i) {
        for (index_t j = i + 1; j < m; ++j) {
            double sum = 0.0;
            for (index_t c = 0; c < x.cols(); ++c) {
                const double diff = x(i, c) - x(j, c);
                sum += diff * diff;
            }
            const double dist = std::sqrt(sum);
            d(i, j) = dist;
            d(j, i) = dist;  // mirrored, so symmetry is exact
        }
    }
    return d;
}

namespace {

// Off-diagonal column indices of row i, ordered by (distance, index).
std::vector<index_t> neighbor_order(const Matrix& d, index_t i) {
    std::vector<index_t> order;
    order.reserve(d.rows() - 1);
    for (index_t j = 0; j < d.rows(); ++j)
        if (j != i) order.push_back(j);
    std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
        if (d(i, a) != d(i, b)) return d(i, a) < d(i, b);
        return a < b;
    });
    return order;
}

}  // namespace

RankTable rank_matrix(const Matrix& d) {
    if (d.rows() != d.cols()) {
        throw shape_error("rank_matrix: distance matrix must be square, got " +
                          shape_of(d));
    }
    for (index_t i = 0; i < d.rows(); ++i) {
        if (d(i, i) != 0.0) {
            throw parameter_error("rank_matrix: diagonal must be zero");
        }
    }
    RankTable table(d.rows());
    for (index_t i = 0; i < d.rows(); ++i) {
        const auto order = neighbor_order(d, i);
        for (index_t pos = 0; pos < order.size(); ++pos) {
            table(i, order[pos]) = pos + 1;
        }
    }
    return table;
}

double trustworthiness(const Matrix& x_orig, const Matrix& x_emb, index_t k) {
    if (x_orig.rows() != x_emb.rows()) {
        throw shape_error("trustworthiness: row counts differ, " + shape_of(x_orig) +
                          " vs " + shape_of(x_emb));
    }
    const index_t m = x_orig.rows();
    if (k < 1 || 2 * k >= m) {
        throw parameter_error("trustworthiness: k must satisfy 1 <= k < m/2, got k=" +
                              std::to_string(k) + " m=" + std::to_string(m));
    }

    const RankTable orig_ranks = rank_matrix(pairwise_distances(x_orig));
    const Matrix d_emb = pairwise_distances(x_emb);

    double penalty = 0.0;
    for (index_t i = 0; i < m; ++i) {
        const auto order = neighbor_order(d_emb, i);
        for (index_t pos = 0; pos < k; ++pos) {
            const index_t rank = orig_ranks(i, order[pos]);
            if (rank > k) penalty += static_cast<double>(rank - k);
        }
    }
    const double mm = static_cast<double>(m);
    const double kk = static_cast<double>(k);
    return 1.0 - 2.0 * penalty / (mm * kk * (2.0 * mm - 3.0 * kk - 1.0));
}

double relative_reconstruction_error(const Matrix& x, const Matrix& xhat) {
    const double norm = frobenius_norm(x);
    if (norm == 0.0) {
        throw domain_error("relative_reconstruction_error: reference has zero norm");
    }
    return frobenius_distance(x, xhat) / norm;
}

double knn_accuracy(const Matrix& train_emb, const std::vector<double>& train_labels,
                    const Matrix& test_emb, const std::vector<double>& test_labels,
                    index_t k) {
    if (train_labels.size() != train_emb.rows() ||
        test_labels.size() != test_emb.rows()) {
        throw parameter_error("knn_accuracy: label count does not match row count");
    }
    if (test_emb.rows() == 0 || test_emb.empty()) {
        throw parameter_error("knn_accuracy: empty test set");
    }
    if (k < 1 || k > train_emb.rows()) {
        throw parameter_error("knn_accuracy: k must lie in [1, train rows]");
    }
    if (train_emb.cols() != test_emb.cols()) {
        throw shape_error("knn_accuracy: feature widths differ, " +
                          shape_of(train_emb) + " vs " + shape_of(test_emb));
    }

    index_t correct = 0;
    std::vector<std::pair<double, index_t>> dist(train_emb.rows());
    for (index_t t = 0; t < test_emb.rows(); ++t) {
        for (index_t i = 0; i < train_emb.rows(); ++i) {
            double sum = 0.0;
            for (index_t c = 0; c < train_emb.cols(); ++c) {
                const double diff = test_emb(t, c) - train_emb(i, c);
                sum += diff * diff;
            }
            dist[i] = {sum, i};
        }
        std::sort(dist.begin(), dist.end());  // pair ordering = distance, then index

        std::map<double, index_t> votes;  // key order = ascending label
        for (index_t pos = 0; pos < k; ++pos) {
            votes[train_labels[dist[pos].second]]++;
        }
        double winner = votes.begin()->first;
        index_t best = votes.begin()->second;
        for (const auto& [label, count] : votes) {
            if (count > best) {  // strict, so ties keep the smallest label
                best = count;
                winner = label;
            }
        }
        if (winner == test_labels[t]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test_emb.rows());
}

}  // namespace igmdsr
