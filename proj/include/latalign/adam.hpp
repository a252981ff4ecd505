#pragma once

#include <cstdint>

#include "latalign/params.hpp"

namespace latalign {

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Moment accumulators mirror the parameter layout and start at zero.
struct AdamState {
    AdamConfig config;
    ParamStore first_moment;
    ParamStore second_moment;
    std::uint64_t step = 0;

    AdamState() = default;
    AdamState(const ParamStore& layout, AdamConfig cfg);
};

/// Bias-corrected ADAM update in place. Throws NumericError on non-finite gradients
/// before touching any state.
void adam_step(AdamState& state, ParamStore& params, const ParamStore& grads);

}  // namespace latalign
