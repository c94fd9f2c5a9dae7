#pragma once

#include <cstdint>
#include <filesystem>

#include "igmdsr/model.hpp"
#include "igmdsr/preprocess.hpp"

namespace igmdsr {

/// Everything needed to re-run the fitted pipeline on new data: the trained
/// weights plus the preprocessing statistics captured at fit time.
struct ModelFile {
    int format_version = 1;
    Variant variant = Variant::nmf;
    std::vector<index_t> widths;
    std::uint64_t seed = 0;
    index_t origin_cols = 0;  // raw feature count n' before folding
    ZscoreStats stats;        // per raw column
    ModelParams params;
};

/// Text format: a labeled header followed by one labeled block per weight
/// matrix, values rendered with shortest round-trip precision so that
/// load(save(m)) reproduces the parameters bit-exactly.
void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace igmdsr
