#include <doctest.h>

#include <cmath>
#include <vector>

#include "igmdsr/preprocess.hpp"
#include "igmdsr/training.hpp"
#include "test_helpers.hpp"

using igmdsr::ArchitectureSpec;
using igmdsr::index_t;
using igmdsr::Matrix;
using igmdsr::ModelParams;
using igmdsr::TrainConfig;
using igmdsr::Variant;
using igmdsr::WeightCoord;
using igmdsr::WeightKind;
using test_helpers::random_matrix;

TEST_SUITE("training") {

TEST_CASE("config validation") {
    TrainConfig cfg;
    CHECK_NOTHROW(igmdsr::validate(cfg));

    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(igmdsr::validate(cfg), igmdsr::parameter_error);
    cfg = TrainConfig{};
    cfg.beta1 = 1.0;
    CHECK_THROWS_AS(igmdsr::validate(cfg), igmdsr::parameter_error);
    cfg = TrainConfig{};
    cfg.beta2 = -0.1;
    CHECK_THROWS_AS(igmdsr::validate(cfg), igmdsr::parameter_error);
    cfg = TrainConfig{};
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(igmdsr::validate(cfg), igmdsr::parameter_error);
    cfg = TrainConfig{};
    cfg.stop_threshold = -1.0;
    CHECK_THROWS_AS(igmdsr::validate(cfg), igmdsr::parameter_error);
    cfg = TrainConfig{};
    cfg.max_epochs = 0;
    CHECK_THROWS_AS(igmdsr::validate(cfg), igmdsr::parameter_error);
}

TEST_CASE("cost against a scalar loop") {
    const Matrix x = random_matrix(5, 4, 1, 0.0, 2.0);
    const Matrix xhat = random_matrix(5, 4, 2, 0.0, 2.0);
    double acc = 0.0;
    for (index_t i = 0; i < 5; ++i) {
        for (index_t j = 0; j < 4; ++j) {
            const double d = x(i, j) - xhat(i, j);
            acc += d * d;
        }
    }
    CHECK(igmdsr::cost(x, xhat) == doctest::Approx(acc / 40.0).epsilon(1e-14));
    CHECK(igmdsr::cost(x, x) == 0.0);
    CHECK_THROWS_AS(igmdsr::cost(x, Matrix(5, 3)), igmdsr::shape_error);
}

TEST_CASE("cost hand value") {
    const Matrix x{{1.0, 2.0}};
    const Matrix xhat{{0.0, 4.0}};
    // (1 + 4) / (2 * 1 * 2)
    CHECK(igmdsr::cost(x, xhat) == 1.25);
}

TEST_CASE("analytic gradients match central differences everywhere") {
    const Matrix x0 = igmdsr::fold(random_matrix(5, 3, 31)).x;  // 5 x 6
    for (const Variant variant : {Variant::nmf, Variant::rnmf}) {
        const ArchitectureSpec spec({6, 4, 2}, variant);
        const ModelParams params = igmdsr::xavier_init(spec, 77);
        const auto trace = igmdsr::forward(params, x0);
        const auto grads = igmdsr::backward(trace, params, x0);

        auto check_block = [&](const Matrix& analytic, WeightKind kind,
                               index_t layer) {
            for (index_t i = 0; i < analytic.rows(); ++i) {
                for (index_t j = 0; j < analytic.cols(); ++j) {
                    const double numeric = igmdsr::finite_difference_grad(
                        params, x0, WeightCoord{kind, layer, i, j}, 1e-6);
                    CHECK(analytic(i, j) ==
                          doctest::Approx(numeric).epsilon(1e-6));
                }
            }
        };
        check_block(grads.v[0], WeightKind::v, 1);
        check_block(grads.v[1], WeightKind::v, 2);
        check_block(grads.vtilde[0], WeightKind::vtilde, 2);
        check_block(grads.w, WeightKind::w, 0);
    }
}

TEST_CASE("guidance gradient equals the input transposed times its delta") {
    // dPhi/dVtilde(s) must coincide with dPhi/dV(s) premultiplied by X0
    // instead of X(s-1): both see the same delta, only the source differs.
    const Matrix x0 = igmdsr::fold(random_matrix(6, 2, 9)).x;  // 6 x 4
    const ArchitectureSpec spec({4, 3, 2}, Variant::rnmf);
    const ModelParams params = igmdsr::xavier_init(spec, 15);
    const auto trace = igmdsr::forward(params, x0);
    const auto grads = igmdsr::backward(trace, params, x0);

    // recover delta(2) from the V gradient, then rebuild the Vtilde gradient
    // delta = (X1^T)^+ dV2 would need a pseudo-inverse; instead rebuild delta
    // directly from the trace the same way a reader of Eq. 11 would.
    const Matrix dz = igmdsr::hadamard(
        igmdsr::scale(igmdsr::subtract(trace.xhat, x0),
                      1.0 / static_cast<double>(x0.rows() * x0.cols())),
        [&] {
            Matrix mask(trace.z.rows(), trace.z.cols());
            for (index_t i = 0; i < mask.rows(); ++i)
                for (index_t j = 0; j < mask.cols(); ++j)
                    mask(i, j) = trace.z(i, j) > 0.0 ? 1.0 : 0.0;
            return mask;
        }());
    const Matrix sig_prime = [&] {
        const Matrix& x2 = trace.x_layers[2];
        Matrix out(x2.rows(), x2.cols());
        for (index_t i = 0; i < out.rows(); ++i)
            for (index_t j = 0; j < out.cols(); ++j)
                out(i, j) = x2(i, j) * (1.0 - x2(i, j));
        return out;
    }();
    const Matrix delta2 = igmdsr::hadamard(
        igmdsr::matmul(dz, igmdsr::transpose(params.w)), sig_prime);

    const Matrix expected_vt2 = igmdsr::matmul(igmdsr::transpose(x0), delta2);
    const Matrix expected_v2 =
        igmdsr::matmul(igmdsr::transpose(trace.x_layers[1]), delta2);
    CHECK(test_helpers::approx_equal(grads.vtilde[0], expected_vt2, 1e-14));
    CHECK(test_helpers::approx_equal(grads.v[1], expected_v2, 1e-14));
    CHECK(test_helpers::approx_equal(grads.w,
                                     igmdsr::matmul(igmdsr::transpose(trace.x_layers[2]), dz),
                                     1e-14));
}

TEST_CASE("finite difference guard rails") {
    const Matrix x0 = igmdsr::fold(random_matrix(4, 2, 3)).x;
    const ArchitectureSpec spec({4, 3, 2}, Variant::nmf);
    const ModelParams params = igmdsr::xavier_init(spec, 2);
    CHECK_THROWS_AS(igmdsr::finite_difference_grad(
                        params, x0, WeightCoord{WeightKind::w, 0, 0, 0}, 0.0),
                    igmdsr::parameter_error);
    CHECK_THROWS_AS(igmdsr::finite_difference_grad(
                        params, x0, WeightCoord{WeightKind::v, 9, 0, 0}, 1e-6),
                    igmdsr::parameter_error);
    CHECK_THROWS_AS(igmdsr::finite_difference_grad(
                        params, x0, WeightCoord{WeightKind::w, 0, 99, 0}, 1e-6),
                    igmdsr::parameter_error);
}

TEST_CASE("first adam step with unit gradient moves by almost exactly lr") {
    // with g = 1 the bias-corrected moments are both 1, so the step is
    // lr / (1 + eps) regardless of beta choices
    ModelParams params;
    params.v = {Matrix{{0.5}}, Matrix{{0.5}}};
    params.vtilde = {Matrix{{0.5}}};
    params.w = Matrix{{0.5}};

    igmdsr::Gradients grads;
    grads.v = {Matrix{{1.0}}, Matrix{{1.0}}};
    grads.vtilde = {Matrix{{1.0}}};
    grads.w = Matrix{{1.0}};

    auto state = igmdsr::AdamState::zeros_like(params);
    TrainConfig cfg;
    igmdsr::adam_step(params, grads, state, cfg);

    CHECK(state.t == 1);
    const double expected = 0.5 - 0.001 / (1.0 + 1e-8);
    CHECK(params.w(0, 0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(params.v[0](0, 0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(params.vtilde[0](0, 0) == doctest::Approx(expected).epsilon(1e-12));

    // second identical step: m-hat and v-hat stay exactly 1
    igmdsr::adam_step(params, grads, state, cfg);
    CHECK(state.t == 2);
    CHECK(params.w(0, 0) ==
          doctest::Approx(expected - 0.001 / (1.0 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("adam step validates gradient layout") {
    ModelParams params;
    params.v = {Matrix{{0.5}}, Matrix{{0.5}}};
    params.vtilde = {Matrix{{0.5}}};
    params.w = Matrix{{0.5}};
    auto state = igmdsr::AdamState::zeros_like(params);

    igmdsr::Gradients wrong_shape;
    wrong_shape.v = {Matrix{{1.0}}, Matrix{{1.0}}};
    wrong_shape.vtilde = {Matrix{{1.0}}};
    wrong_shape.w = Matrix{{1.0, 2.0}};
    TrainConfig cfg;
    CHECK_THROWS_AS(igmdsr::adam_step(params, wrong_shape, state, cfg),
                    igmdsr::shape_error);

    igmdsr::Gradients missing_layer;
    missing_layer.v = {Matrix{{1.0}}};
    missing_layer.vtilde = {Matrix{{1.0}}};
    missing_layer.w = Matrix{{1.0}};
    CHECK_THROWS_AS(igmdsr::adam_step(params, missing_layer, state, cfg),
                    igmdsr::shape_error);
}

TEST_CASE("projection clips negatives only") {
    const Matrix w{{-0.5, 0.0, 1.5}, {2.0, -0.1, 0.25}};
    CHECK(igmdsr::project_nonnegative(w) ==
          Matrix{{0.0, 0.0, 1.5}, {2.0, 0.0, 0.25}});
}

TEST_CASE("fit stops after two epochs under a huge threshold") {
    const Matrix x0 = igmdsr::fold(random_matrix(10, 3, 5)).x;
    const ArchitectureSpec spec({6, 4, 2}, Variant::nmf);
    TrainConfig cfg;
    cfg.stop_threshold = 1e9;
    cfg.max_epochs = 100;
    const auto result = igmdsr::fit(x0, spec, cfg);
    CHECK(result.log.epochs_run == 2);
    CHECK(result.log.cost_per_epoch.size() == 2);
    CHECK(result.log.stop_reason == igmdsr::StopReason::threshold);
}

TEST_CASE("fit honors the epoch budget") {
    const Matrix x0 = igmdsr::fold(random_matrix(10, 3, 5)).x;
    const ArchitectureSpec spec({6, 4, 2}, Variant::nmf);
    TrainConfig cfg;
    cfg.stop_threshold = 0.0;
    cfg.max_epochs = 1;
    const auto result = igmdsr::fit(x0, spec, cfg);
    CHECK(result.log.epochs_run == 1);
    CHECK(result.log.stop_reason == igmdsr::StopReason::max_epochs);
}

TEST_CASE("fit reduces the cost on easy data") {
    const Matrix x0 = igmdsr::fold(random_matrix(15, 4, 23)).x;
    const ArchitectureSpec spec({8, 5, 3}, Variant::rnmf);
    TrainConfig cfg;
    cfg.stop_threshold = 0.0;
    cfg.max_epochs = 400;
    cfg.learning_rate = 0.01;
    const auto result = igmdsr::fit(x0, spec, cfg);
    CHECK(result.log.cost_per_epoch.back() < 0.5 * result.log.cost_per_epoch.front());
}

TEST_CASE("fit is deterministic in the seed") {
    const Matrix x0 = igmdsr::fold(random_matrix(8, 3, 2)).x;
    const ArchitectureSpec spec({6, 4, 2}, Variant::nmf);
    TrainConfig cfg;
    cfg.max_epochs = 25;
    cfg.stop_threshold = 0.0;
    cfg.seed = 99;
    const auto a = igmdsr::fit(x0, spec, cfg);
    const auto b = igmdsr::fit(x0, spec, cfg);
    CHECK(a.params.w == b.params.w);
    CHECK(a.params.v[0] == b.params.v[0]);
    CHECK(a.params.vtilde[0] == b.params.vtilde[0]);
    CHECK(a.log.cost_per_epoch == b.log.cost_per_epoch);

    cfg.seed = 100;
    const auto c = igmdsr::fit(x0, spec, cfg);
    CHECK_FALSE(a.params.w == c.params.w);
}

TEST_CASE("nmf keeps the coefficient matrix non-negative every epoch") {
    const Matrix x0 = igmdsr::fold(random_matrix(12, 4, 8)).x;
    const ArchitectureSpec spec({8, 5, 3}, Variant::nmf);
    TrainConfig cfg;
    cfg.max_epochs = 60;
    cfg.stop_threshold = 0.0;

    index_t observed = 0;
    const auto result = igmdsr::fit(
        x0, spec, cfg,
        [&](index_t, double, const ModelParams& p, const igmdsr::ForwardTrace&) {
            ++observed;
            for (double v : p.w.data()) CHECK(v >= 0.0);
        });
    CHECK(observed == 60);
    for (double v : result.params.w.data()) CHECK(v >= 0.0);
}

TEST_CASE("rnmf leaves the coefficient matrix free") {
    const Matrix x0 = igmdsr::fold(random_matrix(12, 4, 8)).x;
    const ArchitectureSpec spec({8, 5, 3}, Variant::rnmf);
    TrainConfig cfg;
    cfg.max_epochs = 60;
    cfg.stop_threshold = 0.0;
    const auto result = igmdsr::fit(x0, spec, cfg);
    bool has_negative = false;
    for (double v : result.params.w.data()) has_negative |= (v < 0.0);
    CHECK(has_negative);
}

TEST_CASE("minibatch training runs deterministically") {
    const Matrix x0 = igmdsr::fold(random_matrix(10, 3, 4)).x;
    const ArchitectureSpec spec({6, 4, 2}, Variant::nmf);
    TrainConfig cfg;
    cfg.max_epochs = 20;
    cfg.stop_threshold = 0.0;
    cfg.batch_size = 4;
    const auto a = igmdsr::fit(x0, spec, cfg);
    const auto b = igmdsr::fit(x0, spec, cfg);
    CHECK(a.params.w == b.params.w);
    CHECK(a.log.cost_per_epoch == b.log.cost_per_epoch);

    // a different batch size changes the trajectory
    cfg.batch_size = 5;
    const auto c = igmdsr::fit(x0, spec, cfg);
    CHECK_FALSE(a.params.w == c.params.w);
}

TEST_CASE("fit rejects data that does not match the architecture") {
    const ArchitectureSpec spec({6, 4, 2}, Variant::nmf);
    CHECK_THROWS_AS(igmdsr::fit(Matrix(5, 7), spec, TrainConfig{}),
                    igmdsr::shape_error);
}

TEST_CASE("exploding runs abort with the partial log attached") {
    // this seed combination drives a reconstruction entry past the double
    // range on the second epoch; a huge step does not always do that, since
    // saturated sigmoids can silently zero every gradient instead
    const Matrix x0 = igmdsr::fold(random_matrix(6, 3, 13)).x;
    const ArchitectureSpec spec({6, 4, 2}, Variant::rnmf);
    TrainConfig cfg;
    cfg.learning_rate = 1e200;
    cfg.stop_threshold = 0.0;
    cfg.max_epochs = 50;
    try {
        igmdsr::fit(x0, spec, cfg);
        FAIL("expected a numeric error");
    } catch (const igmdsr::training_numeric_error& e) {
        CHECK(e.partial_log.epochs_run >= 1);
        CHECK(e.partial_log.epochs_run < 50);
    }
}

}  // TEST_SUITE
