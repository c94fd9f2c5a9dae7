#include "igmdsr/model_io.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "igmdsr/csv_io.hpp"

namespace igmdsr {

namespace {

constexpr const char* kMagic = "igmdsr-model";

void append_matrix_block(std::string& out, const std::string& name, const Matrix& m) {
    out += "matrix " + name + " " + std::to_string(m.rows()) + " " +
           std::to_string(m.cols()) + "\n";
    for (index_t i = 0; i < m.rows(); ++i) {
        for (index_t j = 0; j < m.cols(); ++j) {
            if (j) out += ' ';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
}

// Whitespace-delimited token stream with file-position-free error messages.
class TokenReader {
public:
    TokenReader(std::ifstream& in, std::filesystem::path path)
        : in_(in), path_(std::move(path)) {}

    std::string next(const char* what) {
        std::string token;
        if (!(in_ >> token)) {
            throw input_error(path_.string() + ": truncated model file, expected " +
                              std::string(what));
        }
        return token;
    }

    void expect(const char* literal) {
        const std::string token = next(literal);
        if (token != literal) {
            throw input_error(path_.string() + ": expected '" + literal + "', got '" +
                              token + "'");
        }
    }

    double next_double(const char* what) {
        const std::string token = next(what);
        double value = 0.0;
        const char* begin = token.data();
        const char* end = begin + token.size();
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end) {
            throw input_error(path_.string() + ": cannot parse '" + token + "' as " +
                              std::string(what));
        }
        return value;
    }

    std::uint64_t next_count(const char* what) {
        const std::string token = next(what);
        std::uint64_t value = 0;
        const char* begin = token.data();
        const char* end = begin + token.size();
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end) {
            throw input_error(path_.string() + ": cannot parse '" + token + "' as " +
                              std::string(what));
        }
        return value;
    }

private:
    std::ifstream& in_;
    std::filesystem::path path_;
};

Matrix read_matrix_block(TokenReader& reader, const std::string& name) {
    reader.expect("matrix");
    const std::string seen = reader.next("matrix name");
    if (seen != name) {
        throw input_error("model file: expected matrix '" + name + "', got '" + seen +
                          "'");
    }
    const auto rows = static_cast<index_t>(reader.next_count("row count"));
    const auto cols = static_cast<index_t>(reader.next_count("column count"));
    Matrix m(rows, cols);
    for (double& v : m.data()) v = reader.next_double("matrix entry");
    return m;
}

}  // namespace

void save_model(const std::filesystem::path& path, const ModelFile& model) {
    std::string out;
    out += std::string(kMagic) + " " + std::to_string(model.format_version) + "\n";
    out += std::string("variant ") + variant_name(model.variant) + "\n";
    out += "widths";
    for (index_t w : model.widths) out += " " + std::to_string(w);
    out += "\n";
    out += "seed " + std::to_string(model.seed) + "\n";
    out += "origin_cols " + std::to_string(model.origin_cols) + "\n";
    out += "means";
    for (double v : model.stats.means) out += " " + format_double(v);
    out += "\nstds";
    for (double v : model.stats.stds) out += " " + format_double(v);
    out += "\n";

    const index_t s = model.params.hidden_layers();
    for (index_t l = 1; l <= s; ++l) {
        append_matrix_block(out, "V" + std::to_string(l), model.params.v[l - 1]);
    }
    for (index_t l = 2; l <= s; ++l) {
        append_matrix_block(out, "Vt" + std::to_string(l), model.params.vtilde[l - 2]);
    }
    append_matrix_block(out, "W", model.params.w);
    out += "end\n";

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw input_error("cannot open '" + tmp.string() + "' for writing");
        }
        file << out;
        if (!file) {
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

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw input_error("cannot open '" + path.string() + "'");
    }
    TokenReader reader(in, path);

    reader.expect(kMagic);
    ModelFile model;
    model.format_version = static_cast<int>(reader.next_count("format version"));
    if (model.format_version != 1) {
        throw input_error(path.string() + ": unsupported format version " +
                          std::to_string(model.format_version));
    }
    reader.expect("variant");
    const std::string variant_token = reader.next("variant name");
    try {
        model.variant = variant_from_name(variant_token);
    } catch (const parameter_error&) {
        throw input_error(path.string() + ": unknown variant '" + variant_token + "'");
    }
    reader.expect("widths");

    // widths run until the 'seed' keyword
    std::string token = reader.next("width or 'seed'");
    while (token != "seed") {
        std::uint64_t w = 0;
        const char* begin = token.data();
        const char* end = begin + token.size();
        const auto [ptr, ec] = std::from_chars(begin, end, w);
        if (ec != std::errc{} || ptr != end) {
            throw input_error(path.string() + ": cannot parse width '" + token + "'");
        }
        model.widths.push_back(static_cast<index_t>(w));
        token = reader.next("width or 'seed'");
    }
    model.seed = reader.next_count("seed");
    reader.expect("origin_cols");
    model.origin_cols = static_cast<index_t>(reader.next_count("origin_cols"));

    if (model.widths.size() < 3) {
        throw input_error(path.string() + ": model needs at least 2 hidden layers");
    }
    if (model.widths.front() != 2 * model.origin_cols) {
        throw input_error(path.string() + ": input width " +
                          std::to_string(model.widths.front()) +
                          " does not equal twice origin_cols " +
                          std::to_string(model.origin_cols));
    }

    reader.expect("means");
    model.stats.means.resize(model.origin_cols);
    for (double& v : model.stats.means) v = reader.next_double("mean");
    reader.expect("stds");
    model.stats.stds.resize(model.origin_cols);
    for (double& v : model.stats.stds) v = reader.next_double("std");

    const index_t s = model.widths.size() - 1;
    for (index_t l = 1; l <= s; ++l) {
        model.params.v.push_back(read_matrix_block(reader, "V" + std::to_string(l)));
        if (model.params.v.back().rows() != model.widths[l - 1] ||
            model.params.v.back().cols() != model.widths[l]) {
            throw input_error(path.string() + ": V" + std::to_string(l) +
                              " shape does not match the declared widths");
        }
    }
    for (index_t l = 2; l <= s; ++l) {
        model.params.vtilde.push_back(
            read_matrix_block(reader, "Vt" + std::to_string(l)));
        if (model.params.vtilde.back().rows() != model.widths[0] ||
            model.params.vtilde.back().cols() != model.widths[l]) {
            throw input_error(path.string() + ": Vt" + std::to_string(l) +
                              " shape does not match the declared widths");
        }
    }
    model.params.w = read_matrix_block(reader, "W");
    if (model.params.w.rows() != model.widths[s] ||
        model.params.w.cols() != model.widths[0]) {
        throw input_error(path.string() + ": W shape does not match the declared widths");
    }
    reader.expect("end");
    return model;
}

}  // namespace igmdsr
