#pragma once

#include <span>
#include <string>
#include <vector>

#include "latalign/error.hpp"
#include "latalign/params.hpp"

namespace latalign {

enum class Activation { kTanh, kScaledShiftedSigmoid, kIdentity };

struct LayerSpec {
    std::size_t in = 0;
    std::size_t out = 0;
    Activation activation = Activation::kIdentity;
    // Elementwise scale instead of a full weight matrix (requires in == out).
    bool diagonal = false;
};

/// 0.5 * (sigmoid(x) - 0.5), with range (-0.25, 0.25).
inline double scaled_shifted_sigmoid(double x) { return 0.5 * (sigmoid(x) - 0.5); }
inline Var scaled_shifted_sigmoid(Var x) { return 0.5 * (sigmoid(x) - 0.5); }

template <class T>
T activate(Activation a, T x) {
    switch (a) {
        case Activation::kTanh: return tanh(x);
        case Activation::kScaledShiftedSigmoid: return scaled_shifted_sigmoid(x);
        case Activation::kIdentity: return x;
    }
    return x;
}

/// Parameter group names for layer `i` under `prefix`.
inline std::string weight_name(const std::string& prefix, std::size_t i) {
    return prefix + ".L" + std::to_string(i) + ".W";
}
inline std::string bias_name(const std::string& prefix, std::size_t i) {
    return prefix + ".L" + std::to_string(i) + ".b";
}

/// Add Glorot-initialized weights (or ones for diagonal layers) and zero biases.
void init_mlp(ParamStore& params, const std::string& prefix, std::span<const LayerSpec> spec,
              std::mt19937_64& rng);

void validate_mlp(std::span<const LayerSpec> spec);

/// One layer: activation(W x + b).
template <class T, class X>
std::vector<T> dense(const LayerSpec& layer, const Tensor<T>& weight, const Tensor<T>& bias,
                     std::span<const X> input, const std::string& where) {
    if (input.size() != layer.in)
        throw ConfigError(where + ": input width " + std::to_string(input.size()) +
                          " does not match layer width " + std::to_string(layer.in));
    const std::size_t wrows = layer.out;
    const std::size_t wcols = layer.diagonal ? 1 : layer.in;
    if (weight.rows != wrows || weight.cols != wcols || bias.rows != layer.out || bias.cols != 1)
        throw ConfigError(where + ": parameter shape does not match layer spec");
    std::vector<T> out;
    out.reserve(layer.out);
    for (std::size_t r = 0; r < layer.out; ++r) {
        if (layer.diagonal) {
            std::span<const X> xi(input.data() + r, 1);
            out.push_back(activate(layer.activation, affine_dot(weight.row(r), xi, bias.data[r])));
        } else {
            out.push_back(
                activate(layer.activation, affine_dot(weight.row(r), input, bias.data[r])));
        }
    }
    return out;
}

/// Composition of dense layers; parameters are looked up as prefix.L<i>.{W,b}.
template <class T, class X>
std::vector<T> forward_mlp(std::span<const LayerSpec> spec, const ParamSet<T>& params,
                           const std::string& prefix, std::span<const X> input) {
    if (spec.empty()) throw ConfigError(prefix + ": empty layer list");
    std::vector<T> h = dense(spec[0], params.at(weight_name(prefix, 0)),
                             params.at(bias_name(prefix, 0)), input, prefix + " layer 0");
    for (std::size_t i = 1; i < spec.size(); ++i) {
        h = dense(spec[i], params.at(weight_name(prefix, i)), params.at(bias_name(prefix, i)),
                  std::span<const T>(h), prefix + " layer " + std::to_string(i));
    }
    return h;
}

}  // namespace latalign
