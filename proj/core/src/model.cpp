#include "igmdsr/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace igmdsr {

const char* variant_name(Variant v) {
    return v == Variant::nmf ? "nmf" : "rnmf";
}

Variant variant_from_name(const std::string& name) {
    if (name == "nmf") return Variant::nmf;
    if (name == "rnmf") return Variant::rnmf;
    throw parameter_error("unknown variant '" + name + "', expected nmf or rnmf");
}

ArchitectureSpec::ArchitectureSpec(std::vector<index_t> w, Variant var)
    : widths(std::move(w)), variant(var) {
    if (widths.size() < 3) {
        throw parameter_error("architecture needs at least 2 hidden layers, got " +
                              std::to_string(widths.empty() ? 0 : widths.size() - 1));
    }
    for (index_t l = 1; l < widths.size(); ++l) {
        if (widths[l] >= widths[l - 1]) {
            throw parameter_error("layer widths must be strictly decreasing, width[" +
                                  std::to_string(l) + "]=" + std::to_string(widths[l]) +
                                  " does not drop below " + std::to_string(widths[l - 1]));
        }
    }
    if (widths.back() < 1) {
        throw parameter_error("reduced dimension must be at least 1");
    }
}

std::vector<index_t> default_layer_schedule(index_t n, index_t r, index_t s) {
    if (r < 1 || n <= r) {
        throw parameter_error("layer schedule needs n > r >= 1, got n=" +
                              std::to_string(n) + " r=" + std::to_string(r));
    }
    if (s < 2) {
        throw parameter_error("layer schedule needs at least 2 hidden layers");
    }
    if (n - r < s) {
        throw parameter_error("cannot fit " + std::to_string(s) +
                              " strictly decreasing layers between n=" +
                              std::to_string(n) + " and r=" + std::to_string(r));
    }
    const auto nn = static_cast<double>(n);
    const auto rr = static_cast<double>(r);
    std::vector<long long> w(s + 1);
    w[0] = static_cast<long long>(n);
    w[s] = static_cast<long long>(r);
    for (index_t l = 1; l < s; ++l) {
        const double exact =
            nn * std::pow(rr / nn, static_cast<double>(l) / static_cast<double>(s));
        w[l] = std::llround(exact);
    }
    // Coerce rounding collisions into a strict decrease while keeping both
    // endpoints exact. Each interior width is kept inside the band that still
    // leaves room for one unit per remaining layer on either side.
    for (index_t l = 1; l < s; ++l) {
        const long long lo = w[s] + static_cast<long long>(s - l);
        const long long hi = w[0] - static_cast<long long>(l);
        w[l] = std::clamp(w[l], lo, hi);
        w[l] = std::min(w[l], w[l - 1] - 1);
    }
    return {w.begin(), w.end()};
}

std::vector<index_t> ModelParams::widths() const {
    std::vector<index_t> out;
    out.reserve(v.size() + 1);
    if (v.empty()) return out;
    out.push_back(v.front().rows());
    for (const Matrix& m : v) out.push_back(m.cols());
    return out;
}

ModelParams xavier_init(const ArchitectureSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto draw = [&rng](index_t rows, index_t cols) {
        const double std =
            std::sqrt(2.0 / static_cast<double>(rows + cols));
        std::normal_distribution<double> dist(0.0, std);
        Matrix m(rows, cols);
        for (double& v : m.data()) v = dist(rng);
        return m;
    };

    const auto& widths = spec.widths;
    const index_t s = spec.hidden_layers();

    ModelParams params;
    params.v.reserve(s);
    for (index_t l = 1; l <= s; ++l) {
        params.v.push_back(draw(widths[l - 1], widths[l]));
    }
    params.vtilde.reserve(s - 1);
    for (index_t l = 2; l <= s; ++l) {
        params.vtilde.push_back(draw(widths[0], widths[l]));
    }
    params.w = draw(widths[s], widths[0]);
    if (spec.variant == Variant::nmf) {
        for (double& v : params.w.data()) v = std::fabs(v);
    }
    return params;
}

double sigmoid(double y) {
    // branch on sign so exp never overflows
    if (y >= 0.0) {
        return 1.0 / (1.0 + std::exp(-y));
    }
    const double e = std::exp(y);
    return e / (1.0 + e);
}

double relu(double z) { return z > 0.0 ? z : 0.0; }

namespace {

Matrix sigmoid_elementwise(const Matrix& y) {
    Matrix out = y;
    for (double& v : out.data()) v = sigmoid(v);
    return out;
}

Matrix relu_elementwise(const Matrix& z) {
    Matrix out = z;
    for (double& v : out.data()) v = relu(v);
    return out;
}

}  // namespace

ForwardTrace forward(const ModelParams& params, const Matrix& x0) {
    const index_t s = params.hidden_layers();
    if (s < 1) {
        throw shape_error("forward: model has no hidden layers");
    }
    if (params.vtilde.size() + 1 != s) {
        throw shape_error("forward: expected " + std::to_string(s - 1) +
                          " guidance matrices, got " +
                          std::to_string(params.vtilde.size()));
    }
    if (x0.cols() != params.v.front().rows()) {
        throw shape_error("forward: layer 1: input has " + std::to_string(x0.cols()) +
                          " columns, V(1) expects " +
                          std::to_string(params.v.front().rows()));
    }

    ForwardTrace trace;
    trace.x_layers.reserve(s + 1);
    trace.y_layers.reserve(s);
    trace.x_layers.push_back(x0);

    for (index_t l = 1; l <= s; ++l) {
        const Matrix& v = params.v[l - 1];
        const Matrix& below = trace.x_layers[l - 1];
        if (below.cols() != v.rows()) {
            throw shape_error("forward: layer " + std::to_string(l) + ": activation " +
                              shape_of(below) + " does not feed V(" +
                              std::to_string(l) + ") " + shape_of(v));
        }
        Matrix y = matmul(below, v);
        if (l >= 2) {
            const Matrix& vt = params.vtilde[l - 2];
            if (x0.cols() != vt.rows() || vt.cols() != v.cols()) {
                throw shape_error("forward: layer " + std::to_string(l) +
                                  ": guidance matrix " + shape_of(vt) +
                                  " does not match input " + shape_of(x0) +
                                  " and width " + std::to_string(v.cols()));
            }
            y = add(y, matmul(x0, vt));
        }
        trace.x_layers.push_back(sigmoid_elementwise(y));
        trace.y_layers.push_back(std::move(y));
    }

    const Matrix& xs = trace.x_layers.back();
    if (xs.cols() != params.w.rows() || params.w.cols() != x0.cols()) {
        throw shape_error("forward: reconstruction layer: W " + shape_of(params.w) +
                          " does not map " + shape_of(xs) + " back to width " +
                          std::to_string(x0.cols()));
    }
    trace.z = matmul(xs, params.w);
    trace.xhat = relu_elementwise(trace.z);
    return trace;
}

Factors extract_factors(const ForwardTrace& trace, const ModelParams& params) {
    return {trace.basis(), params.w};
}

}  // namespace igmdsr
