#include "latalign/mlp.hpp"

namespace latalign {

void validate_mlp(std::span<const LayerSpec> spec) {
    if (spec.empty()) throw ConfigError("layer list is empty");
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const auto& l = spec[i];
        if (l.in == 0 || l.out == 0)
            throw ConfigError("layer " + std::to_string(i) + ": widths must be positive");
        if (l.diagonal && l.in != l.out)
            throw ConfigError("layer " + std::to_string(i) + ": diagonal layer needs in == out");
        if (i > 0 && spec[i - 1].out != l.in)
            throw ConfigError("layer " + std::to_string(i) + ": input width " +
                              std::to_string(l.in) + " != previous output " +
                              std::to_string(spec[i - 1].out));
    }
}

void init_mlp(ParamStore& params, const std::string& prefix, std::span<const LayerSpec> spec,
              std::mt19937_64& rng) {
    validate_mlp(spec);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const auto& l = spec[i];
        if (l.diagonal) {
            params.add(weight_name(prefix, i), Tensor<double>(l.out, 1, 1.0));
        } else {
            params.add(weight_name(prefix, i), glorot_uniform(l.out, l.in, rng));
        }
        params.add(bias_name(prefix, i), Tensor<double>(l.out, 1, 0.0));
    }
}

}  // namespace latalign
