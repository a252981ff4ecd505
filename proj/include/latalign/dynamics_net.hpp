#pragma once

// Baseline covariates -> patient-specific ODE parameters.
//
// Layers: tanh (width b), scaled-shifted sigmoid (width = number of ODE
// parameters), then an elementwise affine output. The output vector is read
// row-major into A (first d*d entries) followed by c.

#include <string>
#include <vector>

#include "latalign/latent_ode.hpp"
#include "latalign/mlp.hpp"

namespace latalign {

inline const std::string kDynamicsPrefix = "dyn";

inline std::size_t ode_parameter_count(std::size_t latent_dim, bool homogeneous) {
    return latent_dim * latent_dim + (homogeneous ? 0 : latent_dim);
}

std::vector<LayerSpec> dynamics_layers(std::size_t baseline_width, std::size_t latent_dim, bool homogeneous);

/// Glorot hidden layers; final diagonal weights 1 and bias 0.
void init_dynamics_net(ParamStore& params, std::size_t baseline_width, std::size_t latent_dim,
                       bool homogeneous, std::mt19937_64& rng);

template <class T>
OdeParams<T> infer_ode_params(const ParamSet<T>& params, std::span<const double> baseline,
                              std::size_t latent_dim, bool homogeneous) {
    const auto layers = dynamics_layers(baseline.size(), latent_dim, homogeneous);
    const auto& w0 = params.at(weight_name(kDynamicsPrefix, 0));
    if (w0.cols != baseline.size())
        throw ConfigError("dynamics net: baseline width " + std::to_string(baseline.size()) +
                          " does not match network input " + std::to_string(w0.cols));
    std::vector<T> out = forward_mlp(std::span<const LayerSpec>(layers), params, kDynamicsPrefix, baseline);
    const std::size_t d = latent_dim;
    OdeParams<T> ode;
    ode.homogeneous = homogeneous;
    ode.A.rows = d;
    ode.A.cols = d;
    ode.A.data.assign(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(d * d));
    if (!homogeneous) ode.c.assign(out.begin() + static_cast<std::ptrdiff_t>(d * d), out.end());
    return ode;
}

}  // namespace latalign
