#pragma once

// Per-instrument variational autoencoder: tanh encoder to a diagonal Gaussian
// posterior, tanh decoder to a diagonal Gaussian over items.

#include <numbers>
#include <string>
#include <vector>

#include "latalign/mlp.hpp"

namespace latalign {

struct VaeSpec {
    std::size_t input_width = 0;  // items; the hidden layers have the same width
    std::size_t latent_dim = 2;

    std::size_t hidden_width() const { return input_width; }
    void validate() const;
};

inline constexpr double kMinDecoderVariance = 1e-4;
inline constexpr double kMaxDecoderVariance = 10.0;

template <class T>
struct Posterior {
    std::vector<T> mean;
    std::vector<T> sigma;
};

template <class T>
struct ReconstructionDistribution {
    std::vector<T> mean;
    std::vector<T> variance;
};

/// Encoder outputs for one instrument's visits of one patient.
struct PosteriorSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> means;
    std::vector<std::vector<double>> sigmas;
};

namespace vae_names {
inline std::string enc_hidden(const std::string& p) { return p + ".enc.hidden"; }
inline std::string enc_mean(const std::string& p) { return p + ".enc.mean"; }
inline std::string enc_logvar(const std::string& p) { return p + ".enc.logvar"; }
inline std::string dec_hidden(const std::string& p) { return p + ".dec.hidden"; }
inline std::string dec_mean(const std::string& p) { return p + ".dec.mean"; }
inline std::string dec_logvar(const std::string& p) { return p + ".dec.logvar"; }
}  // namespace vae_names

void init_vae(ParamStore& params, const std::string& prefix, const VaeSpec& spec, std::mt19937_64& rng);

/// Names of every decoder parameter group (weights and biases) under `prefix`.
std::vector<std::string> decoder_group_names(const std::string& prefix);

namespace vae_detail {

inline LayerSpec hidden_layer(std::size_t in, std::size_t out) { return {in, out, Activation::kTanh, false}; }
inline LayerSpec head_layer(std::size_t in, std::size_t out) { return {in, out, Activation::kIdentity, false}; }

template <class T, class X>
std::vector<T> layer(const ParamSet<T>& params, const std::string& group, const LayerSpec& spec,
                     std::span<const X> input) {
    return dense(spec, params.at(group + ".W"), params.at(group + ".b"), input, group);
}

}  // namespace vae_detail

template <class T, class X>
Posterior<T> encode(const VaeSpec& spec, const ParamSet<T>& params, const std::string& prefix,
                    std::span<const X> x) {
    using namespace vae_detail;
    const std::size_t p = spec.input_width;
    const std::size_t d = spec.latent_dim;
    std::vector<T> h = layer(params, vae_names::enc_hidden(prefix), hidden_layer(p, p), x);
    std::span<const T> hs(h);
    Posterior<T> out;
    out.mean = layer(params, vae_names::enc_mean(prefix), head_layer(p, d), hs);
    std::vector<T> logvar = layer(params, vae_names::enc_logvar(prefix), head_layer(p, d), hs);
    out.sigma.reserve(d);
    for (const T& lv : logvar) out.sigma.push_back(exp(lv * 0.5));
    return out;
}

/// z = mean + sigma * eps; eps is external noise and carries no gradient.
template <class T>
std::vector<T> reparameterize(std::span<const T> mean, std::span<const T> sigma, std::span<const double> eps) {
    if (mean.size() != sigma.size() || mean.size() != eps.size())
        throw ConfigError("reparameterize: length mismatch");
    std::vector<T> z;
    z.reserve(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) z.push_back(mean[i] + sigma[i] * eps[i]);
    return z;
}

template <class T, class X>
ReconstructionDistribution<T> decode(const VaeSpec& spec, const ParamSet<T>& params,
                                     const std::string& prefix, std::span<const X> z) {
    using namespace vae_detail;
    const std::size_t p = spec.input_width;
    const std::size_t d = spec.latent_dim;
    std::vector<T> h = layer(params, vae_names::dec_hidden(prefix), hidden_layer(d, p), z);
    std::span<const T> hs(h);
    ReconstructionDistribution<T> out;
    out.mean = layer(params, vae_names::dec_mean(prefix), head_layer(p, p), hs);
    std::vector<T> raw = layer(params, vae_names::dec_logvar(prefix), head_layer(p, p), hs);
    out.variance.reserve(p);
    for (const T& r : raw) out.variance.push_back(clamp(exp(r), kMinDecoderVariance, kMaxDecoderVariance));
    return out;
}

/// -log N(x; mean, diag(variance)).
template <class T>
T gaussian_nll(std::span<const double> x, const ReconstructionDistribution<T>& dist) {
    if (x.size() != dist.mean.size() || x.size() != dist.variance.size())
        throw ConfigError("gaussian_nll: length mismatch");
    constexpr double log_two_pi = 1.8378770664093454835606594728112;  // log(2 pi)
    T acc = log(dist.variance[0]) + square(x[0] - dist.mean[0]) / dist.variance[0];
    for (std::size_t j = 1; j < x.size(); ++j)
        acc = acc + log(dist.variance[j]) + square(x[j] - dist.mean[j]) / dist.variance[j];
    return 0.5 * (acc + log_two_pi * static_cast<double>(x.size()));
}

/// KL(N(mean, diag(sigma^2)) || N(0, I)).
template <class T>
T kl_to_standard_normal(std::span<const T> mean, std::span<const T> sigma) {
    if (mean.size() != sigma.size() || mean.empty()) throw ConfigError("kl_to_standard_normal: length mismatch");
    T acc = square(mean[0]) + square(sigma[0]) - 1.0 - 2.0 * log(sigma[0]);
    for (std::size_t j = 1; j < mean.size(); ++j)
        acc = acc + square(mean[j]) + square(sigma[j]) - 1.0 - 2.0 * log(sigma[j]);
    return 0.5 * acc;
}

/// Negative ELBO contribution of one visit: single-sample reconstruction NLL at
/// z = trajectory_mean + sigma * eps plus kl_scale * KL(trajectory_mean, sigma).
template <class T>
T elbo_term(const VaeSpec& spec, const ParamSet<T>& params, const std::string& prefix,
            std::span<const double> x, std::span<const T> trajectory_mean, std::span<const T> sigma,
            std::span<const double> eps, double kl_scale) {
    std::vector<T> z = reparameterize(trajectory_mean, sigma, eps);
    ReconstructionDistribution<T> dist = decode(spec, params, prefix, std::span<const T>(z));
    return gaussian_nll(x, dist) + kl_scale * kl_to_standard_normal(trajectory_mean, sigma);
}

}  // namespace latalign
