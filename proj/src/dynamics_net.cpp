#include "latalign/dynamics_net.hpp"

namespace latalign {

std::vector<LayerSpec> dynamics_layers(std::size_t baseline_width, std::size_t latent_dim, bool homogeneous) {
    const std::size_t n = ode_parameter_count(latent_dim, homogeneous);
    return {
        {baseline_width, baseline_width, Activation::kTanh, false},
        {baseline_width, n, Activation::kScaledShiftedSigmoid, false},
        {n, n, Activation::kIdentity, true},
    };
}

void init_dynamics_net(ParamStore& params, std::size_t baseline_width, std::size_t latent_dim,
                       bool homogeneous, std::mt19937_64& rng) {
    const auto layers = dynamics_layers(baseline_width, latent_dim, homogeneous);
    init_mlp(params, kDynamicsPrefix, layers, rng);
}

}  // namespace latalign
