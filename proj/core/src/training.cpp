#include "igmdsr/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace igmdsr {

void validate(const TrainConfig& cfg) {
    if (!(cfg.learning_rate > 0.0))
        throw parameter_error("learning rate must be positive");
    if (!(cfg.beta1 > 0.0 && cfg.beta1 < 1.0))
        throw parameter_error("beta1 must lie in (0, 1)");
    if (!(cfg.beta2 > 0.0 && cfg.beta2 < 1.0))
        throw parameter_error("beta2 must lie in (0, 1)");
    if (!(cfg.epsilon > 0.0)) throw parameter_error("epsilon must be positive");
    if (!(cfg.stop_threshold >= 0.0))
        throw parameter_error("stop threshold must be non-negative");
    if (cfg.max_epochs < 1) throw parameter_error("max_epochs must be at least 1");
}

AdamState AdamState::zeros_like(const ModelParams& params) {
    AdamState s;
    auto zeros = [](const Matrix& m) { return Matrix(m.rows(), m.cols()); };
    for (const Matrix& m : params.v) {
        s.m_v.push_back(zeros(m));
        s.v_v.push_back(zeros(m));
    }
    for (const Matrix& m : params.vtilde) {
        s.m_vtilde.push_back(zeros(m));
        s.v_vtilde.push_back(zeros(m));
    }
    s.m_w = zeros(params.w);
    s.v_w = zeros(params.w);
    return s;
}

double cost(const Matrix& x, const Matrix& xhat) {
    if (x.rows() != xhat.rows() || x.cols() != xhat.cols()) {
        throw shape_error("cost: shape mismatch " + shape_of(x) + " vs " +
                          shape_of(xhat));
    }
    double sum = 0.0;
    auto xd = x.data();
    auto hd = xhat.data();
    for (index_t i = 0; i < xd.size(); ++i) {
        const double d = xd[i] - hd[i];
        sum += d * d;
    }
    return sum / (2.0 * static_cast<double>(x.rows()) * static_cast<double>(x.cols()));
}

namespace {

// sigmoid'(y) expressed through the activation: x (1 - x)
Matrix sigmoid_derivative_mask(const Matrix& activation) {
    Matrix out = activation;
    for (double& v : out.data()) v = v * (1.0 - v);
    return out;
}

void require_finite(const Matrix& m, const std::string& label) {
    if (!all_finite(m)) {
        throw numeric_error("backward: non-finite gradient for " + label);
    }
}

}  // namespace

Gradients backward(const ForwardTrace& trace, const ModelParams& params,
                   const Matrix& x) {
    const index_t s = params.hidden_layers();
    const double m = static_cast<double>(x.rows());
    const double n = static_cast<double>(x.cols());

    // dPhi/dZ: mean-square slope masked by ReLU', with ReLU'(0) = 0.
    Matrix delta = subtract(trace.xhat, x);
    {
        auto dd = delta.data();
        auto zd = trace.z.data();
        const double inv = 1.0 / (m * n);
        for (index_t i = 0; i < dd.size(); ++i) {
            dd[i] = zd[i] > 0.0 ? dd[i] * inv : 0.0;
        }
    }

    Gradients grads;
    grads.v.resize(s);
    grads.vtilde.resize(s >= 1 ? s - 1 : 0);

    grads.w = matmul(transpose(trace.x_layers[s]), delta);
    require_finite(grads.w, "W");

    // Into the slenderest layer: only W carries the reconstruction delta.
    delta = hadamard(matmul(delta, transpose(params.w)),
                     sigmoid_derivative_mask(trace.x_layers[s]));

    for (index_t l = s; l >= 2; --l) {
        grads.v[l - 1] = matmul(transpose(trace.x_layers[l - 1]), delta);
        grads.vtilde[l - 2] = matmul(transpose(trace.x_layers[0]), delta);
        require_finite(grads.v[l - 1], "V(" + std::to_string(l) + ")");
        require_finite(grads.vtilde[l - 2], "Vtilde(" + std::to_string(l) + ")");
        // Only the V-chain propagates: the guidance path reads the constant
        // input, so it ends at its own gradient.
        delta = hadamard(matmul(delta, transpose(params.v[l - 1])),
                         sigmoid_derivative_mask(trace.x_layers[l - 1]));
    }
    grads.v[0] = matmul(transpose(trace.x_layers[0]), delta);
    require_finite(grads.v[0], "V(1)");
    return grads;
}

namespace {

double& coord_ref(ModelParams& params, const WeightCoord& coord) {
    const index_t s = params.hidden_layers();
    Matrix* target = nullptr;
    switch (coord.kind) {
        case WeightKind::v:
            if (coord.layer < 1 || coord.layer > s)
                throw parameter_error("weight coordinate: V layer out of range");
            target = &params.v[coord.layer - 1];
            break;
        case WeightKind::vtilde:
            if (coord.layer < 2 || coord.layer > s)
                throw parameter_error("weight coordinate: Vtilde layer out of range");
            target = &params.vtilde[coord.layer - 2];
            break;
        case WeightKind::w:
            target = &params.w;
            break;
    }
    if (coord.row >= target->rows() || coord.col >= target->cols())
        throw parameter_error("weight coordinate: index out of range");
    return (*target)(coord.row, coord.col);
}

}  // namespace

double finite_difference_grad(const ModelParams& params, const Matrix& x,
                              const WeightCoord& coord, double h) {
    if (!(h > 0.0)) {
        throw parameter_error("finite_difference_grad: step must be positive");
    }
    ModelParams probe = params;
    double& w = coord_ref(probe, coord);
    const double original = w;
    w = original + h;
    const double plus = cost(x, forward(probe, x).xhat);
    w = original - h;
    const double minus = cost(x, forward(probe, x).xhat);
    return (plus - minus) / (2.0 * h);
}

namespace {

void adam_update_matrix(Matrix& w, const Matrix& g, Matrix& m, Matrix& v,
                        const TrainConfig& cfg, double bc1, double bc2,
                        const char* label) {
    if (w.rows() != g.rows() || w.cols() != g.cols()) {
        throw shape_error(std::string("adam_step: gradient shape ") + shape_of(g) +
                          " does not match " + label + " " + shape_of(w));
    }
    auto wd = w.data();
    auto gd = g.data();
    auto md = m.data();
    auto vd = v.data();
    for (index_t i = 0; i < wd.size(); ++i) {
        md[i] = cfg.beta1 * md[i] + (1.0 - cfg.beta1) * gd[i];
        vd[i] = cfg.beta2 * vd[i] + (1.0 - cfg.beta2) * gd[i] * gd[i];
        const double mhat = md[i] / bc1;
        const double vhat = vd[i] / bc2;
        wd[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
        if (!std::isfinite(wd[i])) {
            throw numeric_error(std::string("adam_step: non-finite update in ") + label);
        }
    }
}

}  // namespace

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& cfg) {
    validate(cfg);
    if (grads.v.size() != params.v.size() ||
        grads.vtilde.size() != params.vtilde.size()) {
        throw shape_error("adam_step: gradient layout does not mirror the parameters");
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (index_t l = 0; l < params.v.size(); ++l) {
        adam_update_matrix(params.v[l], grads.v[l], state.m_v[l], state.v_v[l], cfg,
                           bc1, bc2, "V");
    }
    for (index_t l = 0; l < params.vtilde.size(); ++l) {
        adam_update_matrix(params.vtilde[l], grads.vtilde[l], state.m_vtilde[l],
                           state.v_vtilde[l], cfg, bc1, bc2, "Vtilde");
    }
    adam_update_matrix(params.w, grads.w, state.m_w, state.v_w, cfg, bc1, bc2, "W");
}

Matrix project_nonnegative(const Matrix& w) {
    Matrix out = w;
    for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
    return out;
}

const char* stop_reason_name(StopReason r) {
    return r == StopReason::threshold ? "threshold" : "max_epochs";
}

namespace {

Matrix select_rows(const Matrix& x, const std::vector<index_t>& rows, index_t begin,
                   index_t end) {
    Matrix out(end - begin, x.cols());
    for (index_t i = begin; i < end; ++i)
        for (index_t j = 0; j < x.cols(); ++j) out(i - begin, j) = x(rows[i], j);
    return out;
}

}  // namespace

FitResult fit(const Matrix& x0, const ArchitectureSpec& spec, const TrainConfig& cfg,
              const EpochObserver& observer) {
    validate(cfg);
    if (x0.cols() != spec.input_width()) {
        throw shape_error("fit: data has " + std::to_string(x0.cols()) +
                          " columns, architecture expects " +
                          std::to_string(spec.input_width()));
    }

    ModelParams params = xavier_init(spec, cfg.seed);
    AdamState state = AdamState::zeros_like(params);
    TrainLog log;

    const index_t m = x0.rows();
    const bool minibatch = cfg.batch_size > 0 && cfg.batch_size < m;
    std::mt19937_64 shuffle_rng(cfg.seed ^ 0x517cc1b727220a95ULL);
    std::vector<index_t> order(m);
    std::iota(order.begin(), order.end(), index_t{0});

    try {
        double previous = 0.0;
        for (index_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
            ForwardTrace trace = forward(params, x0);
            const double phi = cost(x0, trace.xhat);
            if (!std::isfinite(phi)) {
                throw numeric_error("fit: cost became non-finite at epoch " +
                                    std::to_string(epoch));
            }

            if (minibatch) {
                std::shuffle(order.begin(), order.end(), shuffle_rng);
                for (index_t begin = 0; begin < m; begin += cfg.batch_size) {
                    const index_t end = std::min(begin + cfg.batch_size, m);
                    const Matrix xb = select_rows(x0, order, begin, end);
                    const ForwardTrace tb = forward(params, xb);
                    adam_step(params, backward(tb, params, xb), state, cfg);
                    if (spec.variant == Variant::nmf)
                        params.w = project_nonnegative(params.w);
                }
            } else {
                adam_step(params, backward(trace, params, x0), state, cfg);
                if (spec.variant == Variant::nmf)
                    params.w = project_nonnegative(params.w);
            }

            log.cost_per_epoch.push_back(phi);
            log.epochs_run = log.cost_per_epoch.size();
            if (observer) observer(epoch, phi, params, trace);

            if (epoch >= 2 && std::fabs(phi - previous) < cfg.stop_threshold) {
                log.stop_reason = StopReason::threshold;
                return {std::move(params), std::move(log)};
            }
            previous = phi;
        }
    } catch (const numeric_error& e) {
        throw training_numeric_error(e.what(), std::move(log));
    }

    log.stop_reason = StopReason::max_epochs;
    return {std::move(params), std::move(log)};
}

FitResult fit(const FoldedDataset& folded, const ArchitectureSpec& spec,
              const TrainConfig& cfg, const EpochObserver& observer) {
    return fit(folded.x, spec, cfg, observer);
}

}  // namespace igmdsr
