#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "igmdsr/model.hpp"
#include "igmdsr/preprocess.hpp"

namespace igmdsr {

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double stop_threshold = 1e-6;  // on the absolute cost delta between epochs
    index_t max_epochs = 5000;
    std::uint64_t seed = 0;
    index_t batch_size = 0;  // 0 = full batch
};

void validate(const TrainConfig& cfg);

/// First/second moment accumulators mirroring ModelParams, plus the shared
/// timestep used for bias correction.
struct AdamState {
    std::vector<Matrix> m_v, v_v;
    std::vector<Matrix> m_vtilde, v_vtilde;
    Matrix m_w, v_w;
    long long t = 0;

    static AdamState zeros_like(const ModelParams& params);
};

struct Gradients {
    std::vector<Matrix> v;       // dPhi/dV(l), l = 1..s
    std::vector<Matrix> vtilde;  // dPhi/dVtilde(l), l = 2..s
    Matrix w;                    // dPhi/dW
};

/// Mean square reconstruction cost Phi = sum((x - xhat)^2) / (2 m n).
double cost(const Matrix& x, const Matrix& xhat);

/// Exact analytic gradients of the cost through the forward pass. The ReLU
/// subgradient at exactly zero is taken as 0; guidance matrices receive
/// gradient from their layer's delta but do not route anything upstream,
/// since the input they read is a constant.
Gradients backward(const ForwardTrace& trace, const ModelParams& params, const Matrix& x);

enum class WeightKind { v, vtilde, w };

/// Addresses one scalar weight: layer is 1..s for v, 2..s for vtilde and
/// ignored for w.
struct WeightCoord {
    WeightKind kind = WeightKind::w;
    index_t layer = 0;
    index_t row = 0;
    index_t col = 0;
};

/// Central difference (Phi(w+h) - Phi(w-h)) / 2h through two forward passes.
double finite_difference_grad(const ModelParams& params, const Matrix& x,
                              const WeightCoord& coord, double h);

/// One Adam update, in place. The timestep increments before bias correction.
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& cfg);

/// Entrywise max(0, w). Applied to W only, under the nmf variant, right
/// after every adam_step.
Matrix project_nonnegative(const Matrix& w);

enum class StopReason { threshold, max_epochs };

const char* stop_reason_name(StopReason r);

struct TrainLog {
    std::vector<double> cost_per_epoch;
    index_t epochs_run = 0;
    StopReason stop_reason = StopReason::max_epochs;
};

/// Thrown when training hits a non-finite value; carries whatever part of
/// the log was recorded before the abort.
struct training_numeric_error : numeric_error {
    TrainLog partial_log;
    training_numeric_error(const std::string& msg, TrainLog log)
        : numeric_error(msg), partial_log(std::move(log)) {}
};

struct FitResult {
    ModelParams params;
    TrainLog log;
};

/// Called at the end of every epoch with the epoch number (1-based), the
/// epoch's cost, the freshly updated parameters and the forward trace the
/// epoch was computed from.
using EpochObserver =
    std::function<void(index_t, double, const ModelParams&, const ForwardTrace&)>;

/// Full training loop: Xavier init from cfg.seed, then per epoch
/// forward -> cost -> backward -> adam_step (-> projection under nmf).
/// Stops when the cost delta between consecutive epochs falls below
/// cfg.stop_threshold, or at cfg.max_epochs.
FitResult fit(const Matrix& x0, const ArchitectureSpec& spec, const TrainConfig& cfg,
              const EpochObserver& observer = {});
FitResult fit(const FoldedDataset& folded, const ArchitectureSpec& spec,
              const TrainConfig& cfg, const EpochObserver& observer = {});

}  // namespace igmdsr
