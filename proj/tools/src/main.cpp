#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "igmdsr/errors.hpp"

namespace {

// 0 success, 1 input error, 2 parameter error, 3 numeric error
constexpr int kInputError = 1;
constexpr int kParameterError = 2;
constexpr int kNumericError = 3;

void add_data_flags(CLI::App& cmd, igmdsr::cli::DataOptions& data) {
    cmd.add_option("--input", data.input, "input CSV path")->required();
    cmd.add_flag("--header", data.header, "skip a single leading header row");
    cmd.add_option("--labels-col", data.labels_col,
                   "0-based column holding class labels");
}

void add_dim_flags(CLI::App& cmd, igmdsr::cli::ReducedDim& dim) {
    auto* f = cmd.add_option("--f", dim.f,
                             "reduced dimension as a fraction of the feature count");
    auto* r = cmd.add_option("--r", dim.r, "reduced dimension");
    f->excludes(r);
    r->excludes(f);
}

void add_train_flags(CLI::App& cmd, igmdsr::TrainConfig& train) {
    cmd.add_option("--lr", train.learning_rate, "Adam learning rate");
    cmd.add_option("--threshold", train.stop_threshold,
                   "stop when the epoch-to-epoch cost delta falls below this");
    cmd.add_option("--max-epochs", train.max_epochs, "epoch budget");
    cmd.add_option("--seed", train.seed, "RNG seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"input-guided deep factorization for dimension reduction"};
    app.require_subcommand(1);

    igmdsr::cli::FitOptions fit_opt;
    auto* fit = app.add_subcommand("fit", "train a model and write its embedding");
    add_data_flags(*fit, fit_opt.data);
    add_dim_flags(*fit, fit_opt.dim);
    fit->add_option("--widths", fit_opt.widths,
                    "full layer widths, folded input through reduced dimension");
    std::string variant_name = "nmf";
    fit->add_option("--variant", variant_name, "nmf or rnmf")
        ->check(CLI::IsMember({"nmf", "rnmf"}));
    add_train_flags(*fit, fit_opt.train);
    fit->add_option("--model", fit_opt.model_path, "model output path");
    fit->add_option("--out-embedding", fit_opt.embedding_path, "embedding CSV path");
    fit->add_option("--out-log", fit_opt.log_path, "convergence log CSV path");

    igmdsr::cli::TransformOptions transform_opt;
    auto* transform =
        app.add_subcommand("transform", "embed data with a stored model");
    add_data_flags(*transform, transform_opt.data);
    transform->add_option("--model", transform_opt.model_path, "model path");
    transform->add_option("--out-embedding", transform_opt.embedding_path,
                          "embedding CSV path");

    igmdsr::cli::EvaluateOptions evaluate_opt;
    auto* evaluate =
        app.add_subcommand("evaluate", "score a stored model on a dataset");
    add_data_flags(*evaluate, evaluate_opt.data);
    evaluate->add_option("--model", evaluate_opt.model_path, "model path");
    evaluate->add_option("--k", evaluate_opt.k, "neighborhood size");

    igmdsr::cli::CompareOptions compare_opt;
    auto* compare = app.add_subcommand(
        "compare", "run both variants plus the multiplicative baseline");
    add_data_flags(*compare, compare_opt.data);
    add_dim_flags(*compare, compare_opt.dim);
    add_train_flags(*compare, compare_opt.train);
    compare->add_option("--k", compare_opt.k, "neighborhood size");
    compare->add_option("--iters", compare_opt.baseline_iters,
                        "baseline multiplicative-update iterations");

    igmdsr::cli::GradcheckOptions gradcheck_opt;
    auto* gradcheck = app.add_subcommand(
        "gradcheck", "compare analytic gradients against central differences");
    gradcheck->add_option("--seed", gradcheck_opt.seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kParameterError;
    }

    try {
        if (*fit) {
            fit_opt.variant = igmdsr::variant_from_name(variant_name);
            return igmdsr::cli::cmd_fit(fit_opt, std::cout);
        }
        if (*transform) return igmdsr::cli::cmd_transform(transform_opt, std::cout);
        if (*evaluate) return igmdsr::cli::cmd_evaluate(evaluate_opt, std::cout);
        if (*compare) return igmdsr::cli::cmd_compare(compare_opt, std::cout);
        if (*gradcheck) return igmdsr::cli::cmd_gradcheck(gradcheck_opt, std::cout);
    } catch (const igmdsr::parameter_error& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kParameterError;
    } catch (const igmdsr::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kNumericError;
    } catch (const igmdsr::input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const igmdsr::shape_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const igmdsr::domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    }
    return 0;
}
