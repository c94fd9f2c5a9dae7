#include "igmdsr/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace igmdsr {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_cell(std::string_view cell, const std::filesystem::path& path,
                  index_t line, index_t col) {
    const std::string_view trimmed = trim(cell);
    auto fail = [&] {
        throw input_error(path.string() + ":" + std::to_string(line) + ":" +
                          std::to_string(col) + ": cannot parse '" +
                          std::string(trimmed) + "' as a number");
    };
    if (trimmed.empty()) fail();
    std::string_view body = trimmed;
    if (body.front() == '+') body.remove_prefix(1);  // from_chars rejects a leading +
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc{} || ptr != body.data() + body.size()) fail();
    if (!std::isfinite(value)) {
        throw input_error(path.string() + ":" + std::to_string(line) + ":" +
                          std::to_string(col) + ": non-finite value");
    }
    return value;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t begin = 0;
    while (true) {
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(begin));
            return cells;
        }
        cells.push_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw input_error("cannot open '" + tmp.string() + "' for writing");
        }
        out << content;
        if (!out) {
            throw input_error("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw input_error("cannot move '" + tmp.string() + "' to '" + path.string() +
                          "': " + ec.message());
    }
}

}  // namespace

CsvDataset read_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw input_error("cannot open '" + path.string() + "'");
    }

    CsvDataset out;
    std::vector<double> values;
    std::vector<double> labels;
    index_t feature_cols = 0;
    index_t line_number = 0;
    bool header_pending = options.header;

    std::string line;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        const auto cells = split_commas(line);

        if (header_pending) {
            header_pending = false;
            for (index_t c = 0; c < cells.size(); ++c) {
                if (options.labels_col >= 0 &&
                    c == static_cast<index_t>(options.labels_col))
                    continue;
                out.column_names.emplace_back(trim(cells[c]));
            }
            continue;
        }

        if (options.labels_col >= 0 &&
            static_cast<index_t>(options.labels_col) >= cells.size()) {
            throw input_error(path.string() + ":" + std::to_string(line_number) +
                              ": label column " + std::to_string(options.labels_col) +
                              " is out of range for " + std::to_string(cells.size()) +
                              " columns");
        }

        index_t row_features = 0;
        for (index_t c = 0; c < cells.size(); ++c) {
            const double v = parse_cell(cells[c], path, line_number, c + 1);
            if (options.labels_col >= 0 &&
                c == static_cast<index_t>(options.labels_col)) {
                labels.push_back(v);
            } else {
                values.push_back(v);
                ++row_features;
            }
        }
        if (feature_cols == 0) {
            feature_cols = row_features;
        } else if (row_features != feature_cols) {
            throw input_error(path.string() + ":" + std::to_string(line_number) +
                              ": expected " + std::to_string(feature_cols) +
                              " feature columns, got " + std::to_string(row_features));
        }
    }

    if (values.empty() || feature_cols == 0) {
        throw input_error(path.string() + ": no numeric data rows");
    }
    const index_t rows = values.size() / feature_cols;
    out.data.u = Matrix(rows, feature_cols, std::move(values));
    out.data.labels = std::move(labels);
    return out;
}

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    std::string content;
    content.reserve(m.size() * 12);
    for (index_t i = 0; i < m.rows(); ++i) {
        for (index_t j = 0; j < m.cols(); ++j) {
            if (j) content += ',';
            content += format_double(m(i, j));
        }
        content += '\n';
    }
    write_atomic(path, content);
}

void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<double>& cost_per_epoch) {
    std::string content = "epoch,cost\n";
    for (index_t e = 0; e < cost_per_epoch.size(); ++e) {
        content += std::to_string(e + 1);
        content += ',';
        content += format_double(cost_per_epoch[e]);
        content += '\n';
    }
    write_atomic(path, content);
}

}  // namespace igmdsr
