#pragma once

// Joint per-patient loss over both instrument VAEs, the dynamics network and
// the combined latent trajectory, and the sequential training loop.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latalign/adam.hpp"
#include "latalign/dynamics_net.hpp"
#include "latalign/latent_ode.hpp"
#include "latalign/registry_data.hpp"
#include "latalign/vae.hpp"

namespace latalign {

inline const std::string kVaeR = "vae_R";
inline const std::string kVaeS = "vae_S";

struct LossWeights {
    double alpha = 5.0;  // adversarial residual penalty
    double beta = 5.0;   // encoder / trajectory consistency
    double gamma = 5.0;  // variance ratio

    void validate() const;
};

struct TrainConfig {
    std::size_t latent_dim = 2;
    bool homogeneous = true;
    double learning_rate = 0.001;
    std::size_t epochs = 30;
    std::uint64_t seed = 1;
    LossWeights weights;
    double decoder_penalty = 0.01;
    double kl_scale = 0.5;
    // Visit times are in months; the ODE runs in units of this many months.
    double time_unit_months = 12.0;
    AdamConfig adam;  // learning_rate mirrored from above
    std::vector<std::size_t> snapshot_epochs{1, 3, 5, 10, 25};

    void validate() const;
    nlohmann::json to_json() const;
    // Keys present in `j` override `base`; unknown keys are rejected.
    static TrainConfig from_json(const nlohmann::json& j, TrainConfig base);
    static TrainConfig from_json(const nlohmann::json& j);
};

/// Named configurations with the published hyperparameters.
TrainConfig train_preset(const std::string& name);
std::vector<std::string> train_preset_names();

/// The four penalty variants used for ablation; gamma is kept at 5.
struct AblationArm {
    std::string name;
    LossWeights weights;
};
const std::vector<AblationArm>& ablation_arms();

/// Network sizes shared by every part of a model.
struct ModelDims {
    VaeSpec vae_r;
    VaeSpec vae_s;
    std::size_t baseline_width = 0;
    std::size_t latent_dim = 2;
    bool homogeneous = true;
};

struct ModelState {
    ModelDims dims;
    TrainConfig config;
    BaselineStats baseline_stats;
    ParamStore params;
    AdamState adam;
    std::size_t epoch = 0;
    std::uint64_t run_seed = 1;
};

/// Fresh seeded parameters for a cohort (fits baseline statistics on it).
ModelState init_model(const Cohort& cohort, const TrainConfig& config);

/// Model-ready view of one preprocessed patient. Times stay in months.
struct PatientData {
    std::string id;
    std::vector<double> baseline;
    std::vector<double> times_r;
    std::vector<std::vector<double>> items_r;
    std::vector<double> times_s;
    std::vector<std::vector<double>> items_s;
};

std::vector<PatientData> prepare_patients(const Cohort& cohort, const BaselineStats& stats);

/// Standard-normal draws for the reparameterized sample at every visit.
struct PatientNoise {
    std::vector<std::vector<double>> r;
    std::vector<std::vector<double>> s;
};

PatientNoise draw_noise(const PatientData& patient, std::size_t latent_dim, std::mt19937_64& rng);
PatientNoise zero_noise(const PatientData& patient, std::size_t latent_dim);

/// Encoder means and the trajectory at the same visits, for one instrument.
template <class T>
struct InstrumentFit {
    std::vector<std::vector<T>> encoded;
    std::vector<std::vector<T>> trajectory;

    std::size_t size() const { return encoded.size(); }
};

/// Sum over dimensions of |r_R - r_S| where r is an instrument's mean signed
/// residual (trajectory - encoding). Zero when either instrument is absent.
template <class T>
T adversarial_penalty(const InstrumentFit<T>& r, const InstrumentFit<T>& s, const T& zero);

/// Squared distance between encodings and trajectory, summed over visits and instruments.
template <class T>
T ode_consistency_penalty(const InstrumentFit<T>& r, const InstrumentFit<T>& s, const T& zero);

/// Per instrument: number of visits times sum over dimensions of
/// (s^2(trajectory) + 1) / (s^2(encodings) + 1).
template <class T>
T variance_ratio_penalty(const InstrumentFit<T>& r, const InstrumentFit<T>& s, const T& zero);

template <class T>
struct LossBreakdown {
    T total;
    T neg_elbo_r;
    T neg_elbo_s;
    T adversarial;
    T consistency;
    T variance_ratio;
    T decoder_penalty;
};

using TrajectoryWeights = WeightTable;

struct LossOptions {
    // Use these trajectory weights instead of estimating them (finite-difference checks).
    const TrajectoryWeights* fixed_weights = nullptr;
    // Receives the weights that were used.
    TrajectoryWeights* used_weights = nullptr;
};

/// The per-patient joint loss.
template <class T>
LossBreakdown<T> patient_loss(const ParamSet<T>& params, const ModelDims& dims, const PatientData& patient,
                              const TrainConfig& config, const PatientNoise& noise, const LossOptions& options = {});

/// Forward-only fit of one patient: encoder posteriors and the trajectory.
struct PatientFit {
    PosteriorSeries r;
    PosteriorSeries s;
    OdeParams<double> ode;
    std::vector<InitialCondition<double>> inits;  // in model time units
    double time_unit_months = 12.0;

    /// Trajectory at times given in months.
    TrajectoryEstimate<double> trajectory(std::span<const double> times_months) const;
};

PatientFit fit_patient(const ModelState& model, const PatientData& patient);

struct EpochRecord {
    std::size_t epoch = 0;
    double mean_loss = 0.0;
    std::size_t steps = 0;
};

struct TrainResult {
    ModelState state;
    std::vector<EpochRecord> history;
};

using EpochCallback = std::function<void(const ModelState&, const EpochRecord&)>;

/// Continue training `state` for config.epochs epochs: seeded shuffle, one
/// gradient and one ADAM step per patient. Throws NumericError naming the
/// epoch and patient if the loss or a gradient is not finite.
TrainResult train(ModelState state, const std::vector<PatientData>& patients, const EpochCallback& on_epoch = {});

/// Fresh model on `cohort` followed by train().
TrainResult train(const Cohort& cohort, const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace latalign

#include "latalign/alignment_model_inl.hpp"
