#include "latalign/alignment_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "latalign/config_reader.hpp"

namespace latalign {

namespace {

void require_weight(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError(std::string("loss weight ") + name + " must be finite and >= 0");
}

// Shuffle and noise stream for one epoch; depends only on the run seed and the
// epoch number so a resumed run draws the same numbers as an uninterrupted one.
std::mt19937_64 epoch_rng(std::uint64_t run_seed, std::size_t epoch) {
    std::seed_seq seq{static_cast<std::uint32_t>(run_seed), static_cast<std::uint32_t>(run_seed >> 32),
                      static_cast<std::uint32_t>(epoch), 0x5eedu};
    return std::mt19937_64(seq);
}

std::vector<std::vector<double>> series_rows(const Series& s) {
    std::vector<std::vector<double>> rows;
    rows.reserve(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        auto r = s.at(k);
        rows.emplace_back(r.begin(), r.end());
    }
    return rows;
}

std::vector<std::vector<double>> gaussian_rows(std::size_t n, std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> out(n, std::vector<double>(d));
    for (auto& row : out)
        for (double& v : row) v = normal(rng);
    return out;
}

}  // namespace

namespace loss_detail {

std::vector<double> union_times(std::span<const double> a, std::span<const double> b) {
    std::vector<double> all(a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    for (double t : all)
        if (out.empty() || t - out.back() > kTimeTolerance) out.push_back(t);
    return out;
}

}  // namespace loss_detail

void LossWeights::validate() const {
    require_weight(alpha, "alpha");
    require_weight(beta, "beta");
    require_weight(gamma, "gamma");
}

void TrainConfig::validate() const {
    if (latent_dim < 1) throw ConfigError("train.latent_dim must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("train.learning_rate must be > 0");
    if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
    weights.validate();
    if (!(decoder_penalty >= 0.0) || !std::isfinite(decoder_penalty))
        throw ConfigError("train.decoder_penalty must be finite and >= 0");
    if (!(kl_scale >= 0.0) || !std::isfinite(kl_scale)) throw ConfigError("train.kl_scale must be finite and >= 0");
    if (!(time_unit_months > 0.0) || !std::isfinite(time_unit_months))
        throw ConfigError("train.time_unit_months must be > 0");
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0))
        throw ConfigError("train.adam betas must lie in [0, 1)");
    if (!(adam.epsilon > 0.0)) throw ConfigError("train.adam_epsilon must be > 0");
}

nlohmann::json TrainConfig::to_json() const {
    return {{"latent_dim", latent_dim},
            {"homogeneous", homogeneous},
            {"learning_rate", learning_rate},
            {"epochs", epochs},
            {"seed", seed},
            {"alpha", weights.alpha},
            {"beta", weights.beta},
            {"gamma", weights.gamma},
            {"decoder_penalty", decoder_penalty},
            {"kl_scale", kl_scale},
            {"time_unit_months", time_unit_months},
            {"adam_beta1", adam.beta1},
            {"adam_beta2", adam.beta2},
            {"adam_epsilon", adam.epsilon},
            {"snapshot_epochs", snapshot_epochs}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j, TrainConfig base) {
    ConfigReader r(j, "train");
    TrainConfig c = std::move(base);
    r.read("latent_dim", c.latent_dim);
    r.read("homogeneous", c.homogeneous);
    r.read("learning_rate", c.learning_rate);
    r.read("epochs", c.epochs);
    r.read("seed", c.seed);
    r.read("alpha", c.weights.alpha);
    r.read("beta", c.weights.beta);
    r.read("gamma", c.weights.gamma);
    r.read("decoder_penalty", c.decoder_penalty);
    r.read("kl_scale", c.kl_scale);
    r.read("time_unit_months", c.time_unit_months);
    r.read("adam_beta1", c.adam.beta1);
    r.read("adam_beta2", c.adam.beta2);
    r.read("adam_epsilon", c.adam.epsilon);
    r.read("snapshot_epochs", c.snapshot_epochs);
    r.finish();
    c.adam.learning_rate = c.learning_rate;
    c.validate();
    return c;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) { return from_json(j, TrainConfig{}); }

TrainConfig train_preset(const std::string& name) {
    TrainConfig c;
    if (name == "synthetic") {
        c.learning_rate = 0.001;
        c.epochs = 30;
    } else if (name == "two-instrument") {
        c.learning_rate = 0.00003;
        c.epochs = 10;
        c.homogeneous = false;
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    c.adam.learning_rate = c.learning_rate;
    return c;
}

std::vector<std::string> train_preset_names() { return {"synthetic", "two-instrument"}; }

const std::vector<AblationArm>& ablation_arms() {
    static const std::vector<AblationArm> arms{
        {"none", {0.0, 0.0, 5.0}},
        {"ode-only", {0.0, 5.0, 5.0}},
        {"adversarial-only", {5.0, 0.0, 5.0}},
        {"both", {5.0, 5.0, 5.0}},
    };
    return arms;
}

ModelState init_model(const Cohort& cohort, const TrainConfig& config) {
    config.validate();
    ModelState m;
    m.config = config;
    m.config.adam.learning_rate = config.learning_rate;
    m.baseline_stats = BaselineStats::fit(cohort);
    m.dims.vae_r = {cohort.items_r(), config.latent_dim};
    m.dims.vae_s = {cohort.items_s(), config.latent_dim};
    m.dims.vae_r.validate();
    m.dims.vae_s.validate();
    m.dims.baseline_width = m.baseline_stats.width();
    m.dims.latent_dim = config.latent_dim;
    m.dims.homogeneous = config.homogeneous;
    if (m.dims.baseline_width == 0) throw ConfigError("cohort has no baseline covariates");

    std::mt19937_64 rng(config.seed);
    init_vae(m.params, kVaeR, m.dims.vae_r, rng);
    init_vae(m.params, kVaeS, m.dims.vae_s, rng);
    init_dynamics_net(m.params, m.dims.baseline_width, config.latent_dim, config.homogeneous, rng);
    m.adam = AdamState(m.params, m.config.adam);
    m.run_seed = config.seed;
    return m;
}

std::vector<PatientData> prepare_patients(const Cohort& cohort, const BaselineStats& stats) {
    if (!cohort.transformed) throw PreconditionError("cohort must be preprocessed before modelling");
    std::vector<PatientData> out;
    out.reserve(cohort.patients.size());
    for (const auto& p : cohort.patients) {
        PatientData d;
        d.id = p.id;
        d.baseline = stats.encode(p.baseline);
        d.times_r = p.r.times;
        d.items_r = series_rows(p.r);
        d.times_s = p.s.times;
        d.items_s = series_rows(p.s);
        out.push_back(std::move(d));
    }
    return out;
}

PatientNoise draw_noise(const PatientData& patient, std::size_t latent_dim, std::mt19937_64& rng) {
    PatientNoise n;
    n.r = gaussian_rows(patient.times_r.size(), latent_dim, rng);
    n.s = gaussian_rows(patient.times_s.size(), latent_dim, rng);
    return n;
}

PatientNoise zero_noise(const PatientData& patient, std::size_t latent_dim) {
    PatientNoise n;
    n.r.assign(patient.times_r.size(), std::vector<double>(latent_dim, 0.0));
    n.s.assign(patient.times_s.size(), std::vector<double>(latent_dim, 0.0));
    return n;
}

TrajectoryEstimate<double> PatientFit::trajectory(std::span<const double> times_months) const {
    std::vector<double> t;
    t.reserve(times_months.size());
    for (double m : times_months) t.push_back(m / time_unit_months);
    TrajectoryEstimate<double> est = combined_trajectory(ode, std::span<const InitialCondition<double>>(inits),
                                                         std::span<const double>(t), true);
    est.times.assign(times_months.begin(), times_months.end());
    return est;
}

PatientFit fit_patient(const ModelState& model, const PatientData& patient) {
    if (patient.times_r.empty() && patient.times_s.empty())
        throw PreconditionError("patient " + patient.id + " has no observations");
    PatientFit fit;
    fit.time_unit_months = model.config.time_unit_months;
    auto encode_series = [&](const VaeSpec& spec, const std::string& prefix, const std::vector<double>& times,
                             const std::vector<std::vector<double>>& items, Instrument source) {
        PosteriorSeries s;
        s.times = times;
        for (std::size_t k = 0; k < items.size(); ++k) {
            Posterior<double> post = encode(spec, model.params, prefix, std::span<const double>(items[k]));
            fit.inits.push_back({times[k] / fit.time_unit_months, post.mean, source});
            s.means.push_back(std::move(post.mean));
            s.sigmas.push_back(std::move(post.sigma));
        }
        return s;
    };
    fit.r = encode_series(model.dims.vae_r, kVaeR, patient.times_r, patient.items_r, Instrument::kR);
    fit.s = encode_series(model.dims.vae_s, kVaeS, patient.times_s, patient.items_s, Instrument::kS);
    fit.ode = infer_ode_params(model.params, std::span<const double>(patient.baseline), model.dims.latent_dim,
                               model.dims.homogeneous);
    return fit;
}

TrainResult train(ModelState state, const std::vector<PatientData>& patients, const EpochCallback& on_epoch) {
    state.config.validate();
    if (patients.empty()) throw PreconditionError("training set is empty");
    state.adam.config.learning_rate = state.config.learning_rate;

    TrainResult result;
    Tape tape;
    std::vector<std::size_t> order(patients.size());
    for (std::size_t e = 0; e < state.config.epochs; ++e) {
        const std::size_t epoch = state.epoch + 1;
        std::mt19937_64 rng = epoch_rng(state.run_seed, epoch);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);

        double total = 0.0;
        for (std::size_t idx : order) {
            const PatientData& patient = patients[idx];
            const std::string where = "epoch " + std::to_string(epoch) + ", patient " + patient.id;
            const PatientNoise noise = draw_noise(patient, state.dims.latent_dim, rng);
            try {
                tape.clear();
                const VarParams leaves = on_tape(state.params, tape);
                const LossBreakdown<Var> loss =
                    patient_loss(leaves, state.dims, patient, state.config, noise, LossOptions{});
                const double value = loss.total.value();
                if (!std::isfinite(value)) throw NumericError("non-finite loss");
                const ParamStore grads = gather_gradient(state.params, leaves, tape.adjoints(loss.total));
                adam_step(state.adam, state.params, grads);
                total += value;
            } catch (const NumericError& err) {
                throw NumericError(where + ": " + err.what());
            }
        }
        state.epoch = epoch;
        EpochRecord rec{epoch, total / static_cast<double>(patients.size()), patients.size()};
        result.history.push_back(rec);
        if (on_epoch) on_epoch(state, rec);
    }
    result.state = std::move(state);
    return result;
}

TrainResult train(const Cohort& cohort, const TrainConfig& config, const EpochCallback& on_epoch) {
    ModelState state = init_model(cohort, config);
    const std::vector<PatientData> patients = prepare_patients(cohort, state.baseline_stats);
    return train(std::move(state), patients, on_epoch);
}

}  // namespace latalign
