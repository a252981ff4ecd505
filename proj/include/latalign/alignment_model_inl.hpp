#pragma once

// Template definitions for alignment_model.hpp.

namespace latalign {
namespace loss_detail {

template <class T>
std::vector<T> column_values(const std::vector<std::vector<T>>& rows, std::size_t dim) {
    std::vector<T> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[dim]);
    return out;
}

// Unbiased sample variance of xs; 0 for fewer than two values.
template <class T>
T sample_variance(const std::vector<T>& xs, const T& zero) {
    const std::size_t n = xs.size();
    if (n < 2) return zero;
    const T mean = sum(std::span<const T>(xs)) * (1.0 / static_cast<double>(n));
    std::vector<T> dev;
    dev.reserve(n);
    for (const T& x : xs) dev.push_back(x - mean);
    return sum_of_squares(std::span<const T>(dev)) * (1.0 / static_cast<double>(n - 1));
}

template <class T>
std::vector<T> mean_residual(const InstrumentFit<T>& fit, std::size_t dim) {
    std::vector<T> out;
    const double inv = 1.0 / static_cast<double>(fit.size());
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<T> res;
        res.reserve(fit.size());
        for (std::size_t k = 0; k < fit.size(); ++k) res.push_back(fit.trajectory[k][i] - fit.encoded[k][i]);
        out.push_back(sum(std::span<const T>(res)) * inv);
    }
    return out;
}

}  // namespace loss_detail

template <class T>
T adversarial_penalty(const InstrumentFit<T>& r, const InstrumentFit<T>& s, const T& zero) {
    if (r.size() == 0 || s.size() == 0) return zero;
    const std::size_t d = r.encoded.front().size();
    const std::vector<T> rr = loss_detail::mean_residual(r, d);
    const std::vector<T> rs = loss_detail::mean_residual(s, d);
    T acc = zero;
    for (std::size_t i = 0; i < d; ++i) acc = acc + abs(rr[i] - rs[i]);
    return acc;
}

template <class T>
T ode_consistency_penalty(const InstrumentFit<T>& r, const InstrumentFit<T>& s, const T& zero) {
    std::vector<T> diffs;
    for (const InstrumentFit<T>* fit : {&r, &s})
        for (std::size_t k = 0; k < fit->size(); ++k)
            for (std::size_t i = 0; i < fit->encoded[k].size(); ++i)
                diffs.push_back(fit->encoded[k][i] - fit->trajectory[k][i]);
    if (diffs.empty()) return zero;
    return sum_of_squares(std::span<const T>(diffs));
}

template <class T>
T variance_ratio_penalty(const InstrumentFit<T>& r, const InstrumentFit<T>& s, const T& zero) {
    T acc = zero;
    for (const InstrumentFit<T>* fit : {&r, &s}) {
        const std::size_t n = fit->size();
        if (n == 0) continue;
        const std::size_t d = fit->encoded.front().size();
        if (n < 2) {
            acc = acc + static_cast<double>(n * d);
            continue;
        }
        for (std::size_t i = 0; i < d; ++i) {
            const T traj_var = loss_detail::sample_variance(loss_detail::column_values(fit->trajectory, i), zero);
            const T enc_var = loss_detail::sample_variance(loss_detail::column_values(fit->encoded, i), zero);
            acc = acc + static_cast<double>(n) * ((traj_var + 1.0) / (enc_var + 1.0));
        }
    }
    return acc;
}

namespace loss_detail {

// Indices of `times` in the sorted unique union `grid` (tolerance match).
inline std::vector<std::size_t> locate(std::span<const double> times, std::span<const double> grid) {
    std::vector<std::size_t> out;
    out.reserve(times.size());
    for (double t : times) {
        std::size_t best = 0;
        for (std::size_t g = 0; g < grid.size(); ++g)
            if (std::abs(grid[g] - t) < std::abs(grid[best] - t)) best = g;
        out.push_back(best);
    }
    return out;
}

std::vector<double> union_times(std::span<const double> a, std::span<const double> b);

}  // namespace loss_detail

template <class T>
LossBreakdown<T> patient_loss(const ParamSet<T>& params, const ModelDims& dims, const PatientData& patient,
                              const TrainConfig& config, const PatientNoise& noise, const LossOptions& options) {
    const std::size_t nr = patient.times_r.size();
    const std::size_t ns = patient.times_s.size();
    if (nr + ns == 0) throw PreconditionError("patient " + patient.id + " has no observations");
    const std::size_t d = dims.latent_dim;
    const double unit = config.time_unit_months;
    const T zero = constant_like(params.group(0).data[0], 0.0);

    struct Encoded {
        std::vector<std::vector<T>> means;
        std::vector<std::vector<T>> sigmas;
    };
    auto encode_all = [&](const VaeSpec& spec, const std::string& prefix,
                          const std::vector<std::vector<double>>& items) {
        Encoded e;
        for (const auto& x : items) {
            Posterior<T> post = encode(spec, params, prefix, std::span<const double>(x));
            e.means.push_back(std::move(post.mean));
            e.sigmas.push_back(std::move(post.sigma));
        }
        return e;
    };
    const Encoded enc_r = encode_all(dims.vae_r, kVaeR, patient.items_r);
    const Encoded enc_s = encode_all(dims.vae_s, kVaeS, patient.items_s);

    std::vector<InitialCondition<T>> inits;
    inits.reserve(nr + ns);
    for (std::size_t k = 0; k < nr; ++k) inits.push_back({patient.times_r[k] / unit, enc_r.means[k], Instrument::kR});
    for (std::size_t k = 0; k < ns; ++k) inits.push_back({patient.times_s[k] / unit, enc_s.means[k], Instrument::kS});

    const std::vector<double> grid_months = loss_detail::union_times(patient.times_r, patient.times_s);
    std::vector<double> grid;
    grid.reserve(grid_months.size());
    for (double t : grid_months) grid.push_back(t / unit);

    const OdeParams<T> ode =
        infer_ode_params(params, std::span<const double>(patient.baseline), d, dims.homogeneous);
    TrajectoryEstimate<T> traj = combined_trajectory(ode, std::span<const InitialCondition<T>>(inits),
                                                     std::span<const double>(grid), false, options.fixed_weights);
    if (options.used_weights) *options.used_weights = traj.weights;

    InstrumentFit<T> fit_r, fit_s;
    fit_r.encoded = enc_r.means;
    fit_s.encoded = enc_s.means;
    for (std::size_t idx : loss_detail::locate(patient.times_r, grid_months)) fit_r.trajectory.push_back(traj.values[idx]);
    for (std::size_t idx : loss_detail::locate(patient.times_s, grid_months)) fit_s.trajectory.push_back(traj.values[idx]);

    auto neg_elbo = [&](const VaeSpec& spec, const std::string& prefix, const std::vector<std::vector<double>>& items,
                        const InstrumentFit<T>& fit, const Encoded& enc, const std::vector<std::vector<double>>& eps) {
        T acc = zero;
        for (std::size_t k = 0; k < items.size(); ++k) {
            acc = acc + elbo_term(spec, params, prefix, std::span<const double>(items[k]),
                                  std::span<const T>(fit.trajectory[k]), std::span<const T>(enc.sigmas[k]),
                                  std::span<const double>(eps[k]), config.kl_scale);
        }
        return acc;
    };

    LossBreakdown<T> out{zero, zero, zero, zero, zero, zero, zero};
    out.neg_elbo_r = nr > 0 ? neg_elbo(dims.vae_r, kVaeR, patient.items_r, fit_r, enc_r, noise.r) : zero;
    out.neg_elbo_s = ns > 0 ? neg_elbo(dims.vae_s, kVaeS, patient.items_s, fit_s, enc_s, noise.s) : zero;
    out.adversarial = adversarial_penalty(fit_r, fit_s, zero);
    out.consistency = ode_consistency_penalty(fit_r, fit_s, zero);
    out.variance_ratio = variance_ratio_penalty(fit_r, fit_s, zero);

    std::vector<T> decoder;
    for (const auto& prefix : {kVaeR, kVaeS})
        for (const auto& name : decoder_group_names(prefix))
            for (const T& v : params.at(name).data) decoder.push_back(v);
    out.decoder_penalty = sum_of_squares(std::span<const T>(decoder));

    const auto& w = config.weights;
    out.total = out.neg_elbo_r + out.neg_elbo_s + w.alpha * out.adversarial + w.beta * out.consistency +
                w.gamma * out.variance_ratio + config.decoder_penalty * out.decoder_penalty;
    return out;
}

}  // namespace latalign
