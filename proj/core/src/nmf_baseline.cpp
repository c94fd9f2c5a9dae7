#include "igmdsr/nmf_baseline.hpp"

#include <algorithm>
#include <random>

namespace igmdsr {

namespace {

constexpr double kDenomFloor = 1e-12;

double half_squared_distance(const Matrix& x, const Matrix& bw) {
    const double d = frobenius_distance(x, bw);
    return 0.5 * d * d;
}

}  // namespace

NmfResult nmf_multiplicative(const Matrix& x, index_t r, index_t iters,
                             std::uint64_t seed) {
    for (double v : x.data()) {
        if (v < 0.0) {
            throw domain_error("nmf_multiplicative: input must be non-negative");
        }
    }
    if (r < 1 || r > std::min(x.rows(), x.cols())) {
        throw parameter_error("nmf_multiplicative: rank must lie in [1, min(m, n)]");
    }
    if (iters < 1) {
        throw parameter_error("nmf_multiplicative: need at least one iteration");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto positive_uniform = [&] { return 1.0 - unit(rng); };  // (0, 1]

    NmfResult result{Matrix(x.rows(), r), Matrix(r, x.cols()), {}};
    for (double& v : result.b.data()) v = positive_uniform();
    for (double& v : result.w.data()) v = positive_uniform();
    result.objective_per_iter.reserve(iters);

    for (index_t it = 0; it < iters; ++it) {
        // W <- W . (B'X) / (B'B W)
        {
            const Matrix bt = transpose(result.b);
            const Matrix numer = matmul(bt, x);
            const Matrix denom = matmul(matmul(bt, result.b), result.w);
            auto wd = result.w.data();
            auto nd = numer.data();
            auto dd = denom.data();
            for (index_t i = 0; i < wd.size(); ++i) {
                wd[i] *= nd[i] / std::max(dd[i], kDenomFloor);
            }
        }
        // B <- B . (X W') / (B W W')
        {
            const Matrix wt = transpose(result.w);
            const Matrix numer = matmul(x, wt);
            const Matrix denom = matmul(result.b, matmul(result.w, wt));
            auto bd = result.b.data();
            auto nd = numer.data();
            auto dd = denom.data();
            for (index_t i = 0; i < bd.size(); ++i) {
                bd[i] *= nd[i] / std::max(dd[i], kDenomFloor);
            }
        }
        result.objective_per_iter.push_back(
            half_squared_distance(x, matmul(result.b, result.w)));
    }
    return result;
}

}  // namespace igmdsr
