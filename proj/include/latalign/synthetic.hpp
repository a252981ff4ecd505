#pragma once

// Seeded synthetic registry with the shape of a two-instrument motor-function
// cohort: baseline covariates, irregular visits, integer item scores driven by
// a two-dimensional latent linear system whose rates depend on the baseline.

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "latalign/registry_data.hpp"

namespace latalign {

struct GeneratorConfig {
    std::size_t n_patients = 500;
    std::uint64_t seed = 1;
    std::size_t min_followups = 2;
    std::size_t max_followups = 12;
    double followup_probability = 0.4;  // follow-ups = min + Binomial(max - min, p)
    double min_interval_months = 3.0;
    double max_interval_months = 6.0;
    double item_noise_sd = 0.25;
    // Item maxima: the first `items_max_two` items score 0..2, the rest 0..1.
    std::size_t items = 20;
    std::size_t items_max_two = 17;
    std::vector<std::size_t> subscale_items{2, 6, 10, 14, 16};

    void validate() const;
    nlohmann::json to_json() const;
    static GeneratorConfig from_json(const nlohmann::json& j);  // unknown keys rejected
};

struct PatientTruth {
    std::string id;
    Tensor<double> A;  // per month
    std::vector<double> initial_state;
    std::vector<std::vector<double>> states;  // latent state at each R visit
};

struct GroundTruth {
    Tensor<double> loadings;  // items x 2
    std::vector<double> offsets;
    std::vector<PatientTruth> patients;

    nlohmann::json to_json() const;
};

struct SyntheticCohort {
    Cohort cohort;  // raw integer items; S built by make_subscale
    GroundTruth truth;
};

SyntheticCohort generate_synthetic(const GeneratorConfig& config);

}  // namespace latalign
