#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "igmdsr/model.hpp"
#include "igmdsr/preprocess.hpp"
#include "test_helpers.hpp"

using igmdsr::ArchitectureSpec;
using igmdsr::index_t;
using igmdsr::Matrix;
using igmdsr::ModelParams;
using igmdsr::Variant;
using test_helpers::approx_equal;
using test_helpers::matmul_reference;
using test_helpers::random_matrix;

namespace {

// Straight-line reimplementation of the skip-connected pass used as a
// dual-path oracle: reference matmul, textbook logistic, no shared code
// with the library's forward.
Matrix forward_reference(const ModelParams& params, const Matrix& x0) {
    const index_t s = params.hidden_layers();
    Matrix below = x0;
    for (index_t l = 1; l <= s; ++l) {
        Matrix y = matmul_reference(below, params.v[l - 1]);
        if (l >= 2) {
            const Matrix guided = matmul_reference(x0, params.vtilde[l - 2]);
            for (index_t i = 0; i < y.rows(); ++i) {
                for (index_t j = 0; j < y.cols(); ++j) y(i, j) += guided(i, j);
            }
        }
        for (double& v : y.data()) v = 1.0 / (1.0 + std::exp(-v));
        below = y;
    }
    Matrix z = matmul_reference(below, params.w);
    for (double& v : z.data()) v = v > 0.0 ? v : 0.0;
    return z;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("variant names round-trip") {
    CHECK(igmdsr::variant_name(Variant::nmf) == std::string("nmf"));
    CHECK(igmdsr::variant_name(Variant::rnmf) == std::string("rnmf"));
    CHECK(igmdsr::variant_from_name("nmf") == Variant::nmf);
    CHECK(igmdsr::variant_from_name("rnmf") == Variant::rnmf);
    CHECK_THROWS_AS(igmdsr::variant_from_name("pca"), igmdsr::parameter_error);
}

TEST_CASE("architecture invariants") {
    CHECK_NOTHROW(ArchitectureSpec({8, 5, 2}, Variant::nmf));
    // fewer than two hidden layers
    CHECK_THROWS_AS(ArchitectureSpec({8, 2}, Variant::nmf), igmdsr::parameter_error);
    // not strictly decreasing
    CHECK_THROWS_AS(ArchitectureSpec({8, 5, 5}, Variant::nmf),
                    igmdsr::parameter_error);
    CHECK_THROWS_AS(ArchitectureSpec({8, 5, 6}, Variant::nmf),
                    igmdsr::parameter_error);
    // reduced width must stay at least one
    CHECK_THROWS_AS(ArchitectureSpec({8, 4, 0}, Variant::nmf),
                    igmdsr::parameter_error);

    const ArchitectureSpec spec({10, 6, 3}, Variant::rnmf);
    CHECK(spec.hidden_layers() == 2);
    CHECK(spec.input_width() == 10);
    CHECK(spec.reduced_width() == 3);
}

TEST_CASE("layer schedule interpolates geometrically with exact endpoints") {
    CHECK(igmdsr::default_layer_schedule(16, 2, 3) ==
          std::vector<index_t>{16, 8, 4, 2});
    CHECK(igmdsr::default_layer_schedule(1398, 83, 3) ==
          std::vector<index_t>{1398, 545, 213, 83});
    CHECK(igmdsr::default_layer_schedule(4, 1, 3) ==
          std::vector<index_t>{4, 3, 2, 1});
    CHECK(igmdsr::default_layer_schedule(12, 3, 2) ==
          std::vector<index_t>{12, 6, 3});
}

TEST_CASE("layer schedule is strictly decreasing for any feasible request") {
    for (index_t n = 4; n <= 64; n += 3) {
        for (index_t r = 1; r < n; ++r) {
            for (index_t s = 2; s <= 4; ++s) {
                if (n - r < s) continue;
                const auto widths = igmdsr::default_layer_schedule(n, r, s);
                REQUIRE(widths.size() == s + 1);
                CHECK(widths.front() == n);
                CHECK(widths.back() == r);
                for (index_t l = 1; l < widths.size(); ++l) {
                    CHECK(widths[l] < widths[l - 1]);
                }
            }
        }
    }
}

TEST_CASE("layer schedule rejects infeasible requests") {
    // cannot fit 3 strictly decreasing layers between 5 and 3
    CHECK_THROWS_AS(igmdsr::default_layer_schedule(5, 3, 3),
                    igmdsr::parameter_error);
    CHECK_THROWS_AS(igmdsr::default_layer_schedule(8, 8, 2),
                    igmdsr::parameter_error);
    CHECK_THROWS_AS(igmdsr::default_layer_schedule(8, 4, 1),
                    igmdsr::parameter_error);
}

TEST_CASE("xavier init shapes and determinism") {
    const ArchitectureSpec spec({10, 6, 4, 2}, Variant::rnmf);
    const ModelParams params = igmdsr::xavier_init(spec, 42);

    REQUIRE(params.hidden_layers() == 3);
    CHECK(params.v[0].rows() == 10);
    CHECK(params.v[0].cols() == 6);
    CHECK(params.v[1].rows() == 6);
    CHECK(params.v[1].cols() == 4);
    CHECK(params.v[2].rows() == 4);
    CHECK(params.v[2].cols() == 2);
    REQUIRE(params.vtilde.size() == 2);
    CHECK(params.vtilde[0].rows() == 10);
    CHECK(params.vtilde[0].cols() == 4);
    CHECK(params.vtilde[1].rows() == 10);
    CHECK(params.vtilde[1].cols() == 2);
    CHECK(params.w.rows() == 2);
    CHECK(params.w.cols() == 10);
    CHECK(params.widths() == std::vector<index_t>{10, 6, 4, 2});

    const ModelParams again = igmdsr::xavier_init(spec, 42);
    CHECK(params.v[0] == again.v[0]);
    CHECK(params.w == again.w);
    const ModelParams other = igmdsr::xavier_init(spec, 43);
    CHECK_FALSE(params.v[0] == other.v[0]);
}

TEST_CASE("xavier init spread matches the fan-in fan-out rule") {
    const ArchitectureSpec spec({80, 40, 20, 10}, Variant::rnmf);
    const ModelParams params = igmdsr::xavier_init(spec, 9);
    const Matrix& v1 = params.v[0];
    double mean = 0.0;
    for (double v : v1.data()) mean += v;
    mean /= static_cast<double>(v1.size());
    double var = 0.0;
    for (double v : v1.data()) var += (v - mean) * (v - mean);
    var /= static_cast<double>(v1.size());
    const double expected_std = std::sqrt(2.0 / (80.0 + 40.0));
    CHECK(std::abs(mean) < 0.1 * expected_std);
    CHECK(std::sqrt(var) == doctest::Approx(expected_std).epsilon(0.15));
}

TEST_CASE("nmf init takes magnitudes for the coefficient matrix only") {
    const ArchitectureSpec spec({12, 6, 3}, Variant::nmf);
    const ModelParams params = igmdsr::xavier_init(spec, 5);
    for (double v : params.w.data()) CHECK(v >= 0.0);

    bool v_has_negative = false;
    for (double v : params.v[0].data()) v_has_negative |= (v < 0.0);
    CHECK(v_has_negative);

    const ArchitectureSpec relaxed({12, 6, 3}, Variant::rnmf);
    const ModelParams relaxed_params = igmdsr::xavier_init(relaxed, 5);
    bool w_has_negative = false;
    for (double v : relaxed_params.w.data()) w_has_negative |= (v < 0.0);
    CHECK(w_has_negative);
}

TEST_CASE("activation scalar values") {
    CHECK(igmdsr::sigmoid(0.0) == 0.5);
    CHECK(igmdsr::sigmoid(2.0) ==
          doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-15));
    CHECK(igmdsr::sigmoid(-2.0) ==
          doctest::Approx(1.0 - igmdsr::sigmoid(2.0)).epsilon(1e-12));
    // saturates cleanly instead of overflowing
    CHECK(igmdsr::sigmoid(800.0) == 1.0);
    CHECK(igmdsr::sigmoid(-800.0) == 0.0);

    CHECK(igmdsr::relu(3.5) == 3.5);
    CHECK(igmdsr::relu(-3.5) == 0.0);
    CHECK(igmdsr::relu(0.0) == 0.0);
}

TEST_CASE("forward pass matches a scalar hand computation") {
    // one unit per hidden layer over a two-column input row
    ModelParams params;
    params.v = {Matrix{{0.3}, {-0.2}}, Matrix{{0.5}}};
    params.vtilde = {Matrix{{0.7}, {-0.4}}};
    params.w = Matrix{{1.1, -0.6}};
    const Matrix x0{{0.8, 0.1}};

    const auto trace = igmdsr::forward(params, x0);

    const double y1 = 0.8 * 0.3 + 0.1 * -0.2;
    const double x1 = 1.0 / (1.0 + std::exp(-y1));
    const double y2 = x1 * 0.5 + (0.8 * 0.7 + 0.1 * -0.4);
    const double x2 = 1.0 / (1.0 + std::exp(-y2));

    REQUIRE(trace.x_layers.size() == 3);
    CHECK(trace.x_layers[0] == x0);
    CHECK(trace.y_layers[0](0, 0) == doctest::Approx(y1).epsilon(1e-15));
    CHECK(trace.x_layers[1](0, 0) == doctest::Approx(x1).epsilon(1e-15));
    CHECK(trace.y_layers[1](0, 0) == doctest::Approx(y2).epsilon(1e-15));
    CHECK(trace.x_layers[2](0, 0) == doctest::Approx(x2).epsilon(1e-15));
    CHECK(trace.basis()(0, 0) == trace.x_layers[2](0, 0));

    CHECK(trace.z(0, 0) == doctest::Approx(x2 * 1.1).epsilon(1e-15));
    CHECK(trace.z(0, 1) == doctest::Approx(x2 * -0.6).epsilon(1e-15));
    CHECK(trace.xhat(0, 0) == trace.z(0, 0));
    CHECK(trace.xhat(0, 1) == 0.0);  // negative pre-activation clips to zero
}

TEST_CASE("forward pass agrees with an independent reimplementation") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Matrix x0 = igmdsr::fold(random_matrix(9, 4, seed)).x;
        const ArchitectureSpec spec({8, 6, 4, 2}, Variant::rnmf);
        const ModelParams params = igmdsr::xavier_init(spec, seed + 100);
        const auto trace = igmdsr::forward(params, x0);
        CHECK(approx_equal(trace.xhat, forward_reference(params, x0), 1e-12));
    }
}

TEST_CASE("forward pass range guarantees") {
    const Matrix x0 = igmdsr::fold(random_matrix(20, 6, 3)).x;
    const ArchitectureSpec spec({12, 7, 4}, Variant::rnmf);
    const ModelParams params = igmdsr::xavier_init(spec, 17);
    const auto trace = igmdsr::forward(params, x0);

    for (index_t l = 1; l < trace.x_layers.size(); ++l) {
        for (double v : trace.x_layers[l].data()) {
            CHECK(v > 0.0);
            CHECK(v < 1.0);
        }
    }
    for (double v : trace.xhat.data()) CHECK(v >= 0.0);
    CHECK(trace.basis().cols() == 4);
    CHECK(trace.xhat.cols() == 12);
}

TEST_CASE("forward rejects mismatched input width") {
    const ArchitectureSpec spec({8, 5, 2}, Variant::nmf);
    const ModelParams params = igmdsr::xavier_init(spec, 1);
    CHECK_THROWS_AS(igmdsr::forward(params, Matrix(3, 7)), igmdsr::shape_error);
}

TEST_CASE("extract_factors hands back the embedding and coefficients") {
    const Matrix x0 = igmdsr::fold(random_matrix(6, 3, 2)).x;
    const ArchitectureSpec spec({6, 4, 2}, Variant::nmf);
    const ModelParams params = igmdsr::xavier_init(spec, 8);
    const auto trace = igmdsr::forward(params, x0);
    const auto factors = igmdsr::extract_factors(trace, params);
    CHECK(factors.b == trace.basis());
    CHECK(factors.w == params.w);
    CHECK(factors.b.rows() == 6);
    CHECK(factors.b.cols() == 2);
    CHECK(factors.w.rows() == 2);
    CHECK(factors.w.cols() == 6);
}

}  // TEST_SUITE
