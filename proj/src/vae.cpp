#include "latalign/vae.hpp"

namespace latalign {

void VaeSpec::validate() const {
    if (input_width == 0) throw ConfigError("VAE input width must be >= 1");
    if (latent_dim == 0) throw ConfigError("VAE latent dimension must be >= 1");
}

namespace {

void add_layer(ParamStore& params, const std::string& group, std::size_t in, std::size_t out,
               std::mt19937_64& rng) {
    params.add(group + ".W", glorot_uniform(out, in, rng));
    params.add(group + ".b", Tensor<double>(out, 1, 0.0));
}

}  // namespace

void init_vae(ParamStore& params, const std::string& prefix, const VaeSpec& spec, std::mt19937_64& rng) {
    spec.validate();
    const std::size_t p = spec.input_width;
    const std::size_t d = spec.latent_dim;
    add_layer(params, vae_names::enc_hidden(prefix), p, p, rng);
    add_layer(params, vae_names::enc_mean(prefix), p, d, rng);
    add_layer(params, vae_names::enc_logvar(prefix), p, d, rng);
    add_layer(params, vae_names::dec_hidden(prefix), d, p, rng);
    add_layer(params, vae_names::dec_mean(prefix), p, p, rng);
    add_layer(params, vae_names::dec_logvar(prefix), p, p, rng);
}

std::vector<std::string> decoder_group_names(const std::string& prefix) {
    std::vector<std::string> out;
    for (const auto& g : {vae_names::dec_hidden(prefix), vae_names::dec_mean(prefix), vae_names::dec_logvar(prefix)}) {
        out.push_back(g + ".W");
        out.push_back(g + ".b");
    }
    return out;
}

}  // namespace latalign
