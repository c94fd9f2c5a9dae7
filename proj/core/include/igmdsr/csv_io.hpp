#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "igmdsr/preprocess.hpp"

namespace igmdsr {

struct CsvOptions {
    bool header = false;    // skip (and keep) a single leading header row
    int labels_col = -1;    // 0-based column holding class labels, -1 = none
};

struct CsvDataset {
    RawDataset data;
    std::vector<std::string> column_names;  // empty without a header row
};

/// Reads a comma-separated numeric matrix. Malformed cells raise input
/// errors carrying the 1-based file row and column; every value must be
/// finite.
CsvDataset read_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double value);

/// Plain rows of comma-separated values, written atomically
/// (temp file + rename).
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// Two columns "epoch,cost" with a header line, one row per epoch.
void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<double>& cost_per_epoch);

}  // namespace igmdsr
