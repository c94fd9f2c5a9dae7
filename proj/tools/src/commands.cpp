#include "commands.hpp"

#include <cmath>
#include <random>
#include <string>

#include "igmdsr/csv_io.hpp"
#include "igmdsr/errors.hpp"
#include "igmdsr/metrics.hpp"
#include "igmdsr/model_io.hpp"
#include "igmdsr/nmf_baseline.hpp"
#include "igmdsr/preprocess.hpp"

namespace igmdsr::cli {

namespace {

constexpr index_t kDefaultHiddenLayers = 3;

index_t resolve_reduced_dim(const ReducedDim& dim, index_t n_prime) {
    const bool has_f = dim.f != 0.0;
    const bool has_r = dim.r != 0;
    if (has_f == has_r) {
        throw parameter_error("exactly one of --f and --r must be given");
    }
    if (has_f) return reduced_dim(n_prime, dim.f);
    if (dim.r > n_prime) {
        throw parameter_error("--r " + std::to_string(dim.r) +
                              " exceeds the feature count " + std::to_string(n_prime));
    }
    return dim.r;
}

std::vector<index_t> resolve_widths(const std::vector<index_t>& requested,
                                    index_t folded_width, index_t r) {
    if (requested.empty()) {
        return default_layer_schedule(folded_width, r, kDefaultHiddenLayers);
    }
    if (requested.front() != folded_width) {
        throw parameter_error("--widths must start at the folded input width " +
                              std::to_string(folded_width) + ", got " +
                              std::to_string(requested.front()));
    }
    if (requested.back() != r) {
        throw parameter_error("--widths must end at the reduced dimension " +
                              std::to_string(r) + ", got " +
                              std::to_string(requested.back()));
    }
    return requested;
}

struct LoadedRun {
    ModelFile model;
    RawDataset data;
    Matrix folded;       // normalized + folded input
    ForwardTrace trace;  // forward pass of the stored parameters
};

LoadedRun run_model_on(const std::filesystem::path& model_path,
                       const DataOptions& data_opt) {
    LoadedRun run;
    run.model = load_model(model_path);
    CsvOptions csv{data_opt.header, data_opt.labels_col};
    run.data = read_csv(data_opt.input, csv).data;
    if (run.data.u.cols() != run.model.origin_cols) {
        throw input_error("data has " + std::to_string(run.data.u.cols()) +
                          " feature columns but the model expects " +
                          std::to_string(run.model.origin_cols));
    }
    const Matrix normalized = zscore_apply(run.data.u, run.model.stats);
    run.folded = fold(normalized).x;
    run.trace = forward(run.model.params, run.folded);
    return run;
}

}  // namespace

int cmd_fit(const FitOptions& opt, std::ostream& out) {
    CsvOptions csv{opt.data.header, opt.data.labels_col};
    const RawDataset data = read_csv(opt.data.input, csv).data;

    const ZscoreResult z = zscore_normalize(data.u);
    const FoldedDataset folded = fold(z.normalized);
    const index_t r = resolve_reduced_dim(opt.dim, folded.origin_cols);
    const std::vector<index_t> widths =
        resolve_widths(opt.widths, folded.x.cols(), r);
    const ArchitectureSpec spec(widths, opt.variant);

    const FitResult result = fit(folded, spec, opt.train);
    const ForwardTrace trace = forward(result.params, folded.x);

    ModelFile model;
    model.variant = opt.variant;
    model.widths = widths;
    model.seed = opt.train.seed;
    model.origin_cols = folded.origin_cols;
    model.stats = z.stats;
    model.params = result.params;
    save_model(opt.model_path, model);
    write_matrix_csv(opt.embedding_path, trace.basis());
    write_convergence_csv(opt.log_path, result.log.cost_per_epoch);

    out << "final_cost=" << format_double(cost(folded.x, trace.xhat)) << "\n";
    out << "stop_reason=" << stop_reason_name(result.log.stop_reason) << "\n";
    return 0;
}

int cmd_transform(const TransformOptions& opt, std::ostream&) {
    const LoadedRun run = run_model_on(opt.model_path, opt.data);
    write_matrix_csv(opt.embedding_path, run.trace.basis());
    return 0;
}

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out) {
    const LoadedRun run = run_model_on(opt.model_path, opt.data);
    const Matrix normalized = zscore_apply(run.data.u, run.model.stats);
    const Matrix& b = run.trace.basis();

    const double trust = trustworthiness(normalized, b, opt.k);
    const double recon = relative_reconstruction_error(run.folded, run.trace.xhat);
    out << "trustworthiness=" << format_double(trust) << "\n";
    out << "reconstruction_error=" << format_double(recon) << "\n";

    if (run.data.has_labels()) {
        // alternating row split: even rows train the classifier, odd rows score it
        Matrix train_emb, test_emb;
        std::vector<double> train_labels, test_labels;
        {
            std::vector<index_t> train_rows, test_rows;
            for (index_t i = 0; i < b.rows(); ++i) {
                (i % 2 == 0 ? train_rows : test_rows).push_back(i);
            }
            auto take = [&](const std::vector<index_t>& rows, Matrix& emb,
                            std::vector<double>& labels) {
                emb = Matrix(rows.size(), b.cols());
                for (index_t i = 0; i < rows.size(); ++i) {
                    labels.push_back(run.data.labels[rows[i]]);
                    for (index_t j = 0; j < b.cols(); ++j) {
                        emb(i, j) = b(rows[i], j);
                    }
                }
            };
            take(train_rows, train_emb, train_labels);
            take(test_rows, test_emb, test_labels);
        }
        const double acc =
            knn_accuracy(train_emb, train_labels, test_emb, test_labels, opt.k);
        out << "knn_accuracy=" << format_double(acc) << "\n";
    }
    return 0;
}

int cmd_compare(const CompareOptions& opt, std::ostream& out) {
    if (opt.baseline_iters < 1) {
        throw parameter_error("--iters must be at least 1");
    }
    CsvOptions csv{opt.data.header, opt.data.labels_col};
    const RawDataset data = read_csv(opt.data.input, csv).data;

    const ZscoreResult z = zscore_normalize(data.u);
    const FoldedDataset folded = fold(z.normalized);
    const index_t r = resolve_reduced_dim(opt.dim, folded.origin_cols);
    const std::vector<index_t> widths =
        default_layer_schedule(folded.x.cols(), r, kDefaultHiddenLayers);

    out << "method trustworthiness reconstruction_error\n";
    for (const Variant variant : {Variant::nmf, Variant::rnmf}) {
        const ArchitectureSpec spec(widths, variant);
        const FitResult result = fit(folded, spec, opt.train);
        const ForwardTrace trace = forward(result.params, folded.x);
        const double trust = trustworthiness(z.normalized, trace.basis(), opt.k);
        const double recon = relative_reconstruction_error(folded.x, trace.xhat);
        out << "ig-mdsr-" << variant_name(variant) << " " << format_double(trust)
            << " " << format_double(recon) << "\n";
    }

    const NmfResult baseline =
        nmf_multiplicative(folded.x, r, opt.baseline_iters, opt.train.seed);
    const double trust = trustworthiness(z.normalized, baseline.b, opt.k);
    const double recon =
        relative_reconstruction_error(folded.x, matmul(baseline.b, baseline.w));
    out << "nmf-baseline " << format_double(trust) << " " << format_double(recon)
        << "\n";
    return 0;
}

int cmd_gradcheck(const GradcheckOptions& opt, std::ostream& out) {
    constexpr double kStep = 1e-5;
    constexpr double kTolerance = 1e-5;
    // floor keeps the ratio meaningful where both gradients are near zero
    constexpr double kScaleFloor = 1e-4;

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> signed_unit(-1.0, 1.0);
    Matrix raw(8, 3);
    for (double& v : raw.data()) v = signed_unit(rng);
    const Matrix x0 = fold(raw).x;  // 8 x 6

    double max_rel_err = 0.0;
    for (const Variant variant : {Variant::nmf, Variant::rnmf}) {
        const ArchitectureSpec spec({6, 5, 4, 3}, variant);
        const ModelParams params = xavier_init(spec, opt.seed);
        const ForwardTrace trace = forward(params, x0);
        const Gradients grads = backward(trace, params, x0);

        auto check = [&](const Matrix& analytic, WeightKind kind, index_t layer) {
            for (index_t i = 0; i < analytic.rows(); ++i) {
                for (index_t j = 0; j < analytic.cols(); ++j) {
                    const WeightCoord coord{kind, layer, i, j};
                    const double numeric =
                        finite_difference_grad(params, x0, coord, kStep);
                    const double a = analytic(i, j);
                    const double scale =
                        std::max({std::abs(a), std::abs(numeric), kScaleFloor});
                    max_rel_err = std::max(max_rel_err, std::abs(a - numeric) / scale);
                }
            }
        };
        for (index_t l = 1; l <= params.hidden_layers(); ++l) {
            check(grads.v[l - 1], WeightKind::v, l);
        }
        for (index_t l = 2; l <= params.hidden_layers(); ++l) {
            check(grads.vtilde[l - 2], WeightKind::vtilde, l);
        }
        check(grads.w, WeightKind::w, 0);
    }

    out << "max_rel_err=" << format_double(max_rel_err) << "\n";
    return max_rel_err > kTolerance ? 3 : 0;
}

}  // namespace igmdsr::cli
