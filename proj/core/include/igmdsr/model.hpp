#pragma once

#include <cstdint>
#include <vector>

#include "igmdsr/matrix.hpp"

namespace igmdsr {

/// Which non-negativity contract the factorization honors. Under nmf both
/// factors stay non-negative; under rnmf the coefficient matrix W is left
/// unconstrained and only the basis matrix B keeps the constraint.
enum class Variant { nmf, rnmf };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// Layer widths r0 > r1 > ... > rs >= 1 plus the variant. r0 is the (folded)
/// input width, rs the reduced dimension. Validated on construction:
/// strictly decreasing widths and at least two hidden layers.
struct ArchitectureSpec {
    std::vector<index_t> widths;
    Variant variant = Variant::nmf;

    ArchitectureSpec(std::vector<index_t> widths, Variant variant);

    index_t hidden_layers() const { return widths.size() - 1; }  // s
    index_t input_width() const { return widths.front(); }       // r0
    index_t reduced_width() const { return widths.back(); }      // rs
};

/// Geometric interpolation between n and r over s hidden layers, rounded and
/// coerced to a strictly decreasing sequence with exact endpoints.
std::vector<index_t> default_layer_schedule(index_t n, index_t r, index_t s);

/// Weight container. v[l-1] connects layer l-1 to layer l (l = 1..s);
/// vtilde[l-2] connects the input to layer l (l = 2..s); w maps the
/// slenderest layer back to the input width.
struct ModelParams {
    std::vector<Matrix> v;
    std::vector<Matrix> vtilde;
    Matrix w;

    index_t hidden_layers() const { return v.size(); }
    std::vector<index_t> widths() const;
};

/// Zero-mean normal draws with std sqrt(2 / (fan_in + fan_out)) per matrix,
/// deterministic in the seed. Under the nmf variant W takes the absolute
/// value of its draws so the constraint holds before the first projection.
ModelParams xavier_init(const ArchitectureSpec& spec, std::uint64_t seed);

double sigmoid(double y);
double relu(double z);

/// All intermediates of one forward pass, kept for backpropagation.
/// x_layers[0] is the input; x_layers[l] the sigmoid activations of hidden
/// layer l; y_layers[l-1] the matching pre-activations; z the pre-activation
/// of the reconstruction and xhat = relu(z) the reconstruction itself.
struct ForwardTrace {
    std::vector<Matrix> x_layers;
    std::vector<Matrix> y_layers;
    Matrix z;
    Matrix xhat;

    const Matrix& basis() const { return x_layers.back(); }  // B
};

/// Runs the skip-connected forward pass: the first hidden layer sees only
/// the input, every later hidden layer sees the previous activation plus the
/// raw input through its guidance matrix, and a single reconstruction layer
/// maps the slenderest activation back to the input width.
ForwardTrace forward(const ModelParams& params, const Matrix& x0);

struct Factors {
    Matrix b;  // m x r basis, the embedding
    Matrix w;  // r x n coefficients
};

Factors extract_factors(const ForwardTrace& trace, const ModelParams& params);

}  // namespace igmdsr
