#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <vector>

#include "igmdsr/model.hpp"
#include "igmdsr/training.hpp"

namespace igmdsr::cli {

struct DataOptions {
    std::filesystem::path input;
    bool header = false;
    int labels_col = -1;  // 0-based, -1 = no label column
};

/// Exactly one of f (fraction) and r (explicit width) must be set;
/// f = 0 and r = 0 mean unset.
struct ReducedDim {
    double f = 0.0;
    index_t r = 0;
};

struct FitOptions {
    DataOptions data;
    ReducedDim dim;
    std::vector<index_t> widths;  // full r0..rs override, empty = geometric default
    Variant variant = Variant::nmf;
    TrainConfig train;
    std::filesystem::path model_path = "model.igmdsr";
    std::filesystem::path embedding_path = "embedding.csv";
    std::filesystem::path log_path = "convergence.csv";
};

struct TransformOptions {
    DataOptions data;
    std::filesystem::path model_path = "model.igmdsr";
    std::filesystem::path embedding_path = "embedding.csv";
};

struct EvaluateOptions {
    DataOptions data;
    std::filesystem::path model_path = "model.igmdsr";
    index_t k = 5;
};

struct CompareOptions {
    DataOptions data;
    ReducedDim dim;
    TrainConfig train;
    index_t k = 5;
    index_t baseline_iters = 500;
};

struct GradcheckOptions {
    std::uint64_t seed = 7;
};

/// Each command prints its report to `out` and returns a process exit code;
/// recoverable failures surface as the library's error types and are mapped
/// to exit codes by the caller.
int cmd_fit(const FitOptions& opt, std::ostream& out);
int cmd_transform(const TransformOptions& opt, std::ostream& out);
int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out);
int cmd_compare(const CompareOptions& opt, std::ostream& out);
int cmd_gradcheck(const GradcheckOptions& opt, std::ostream& out);

}  // namespace igmdsr::cli
