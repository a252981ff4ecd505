#include "latalign/adam.hpp"

#include <cmath>

#include "latalign/error.hpp"

namespace latalign {

AdamState::AdamState(const ParamStore& layout, AdamConfig cfg)
    : config(cfg), first_moment(zeros_like(layout)), second_moment(zeros_like(layout)) {
    if (!(cfg.learning_rate > 0.0)) throw ConfigError("ADAM learning rate must be > 0");
}

void adam_step(AdamState& state, ParamStore& params, const ParamStore& grads) {
    if (!same_layout(params, grads) || !same_layout(params, state.first_moment))
        throw ConfigError("adam_step: parameter, gradient and moment layouts differ");
    for (std::size_t g = 0; g < grads.group_count(); ++g) {
        for (double v : grads.group(g).data) {
            if (!std::isfinite(v))
                throw NumericError("adam_step: non-finite gradient in group '" + grads.name(g) + "'");
        }
    }

    const auto& cfg = state.config;
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);

    for (std::size_t g = 0; g < params.group_count(); ++g) {
        auto& p = params.group(g).data;
        const auto& gr = grads.group(g).data;
        auto& m = state.first_moment.group(g).data;
        auto& v = state.second_moment.group(g).data;
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gr[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gr[i] * gr[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            p[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
        }
    }
}

}  // namespace latalign
