#include "latalign/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "latalign/config_reader.hpp"
#include "latalign/error.hpp"
#include "latalign/latent_ode.hpp"

namespace latalign {

using nlohmann::json;

void GeneratorConfig::validate() const {
    if (n_patients < 1) throw ConfigError("generator: n_patients must be >= 1");
    if (items < 1) throw ConfigError("generator: items must be >= 1");
    if (items_max_two > items) throw ConfigError("generator: items_max_two exceeds items");
    if (min_followups > max_followups) throw ConfigError("generator: min_followups > max_followups");
    if (!(followup_probability >= 0.0 && followup_probability <= 1.0))
        throw ConfigError("generator: followup_probability must lie in [0, 1]");
    if (!(min_interval_months > 0.0 && max_interval_months >= min_interval_months))
        throw ConfigError("generator: visit intervals must satisfy 0 < min <= max");
    if (!(item_noise_sd >= 0.0)) throw ConfigError("generator: item_noise_sd must be >= 0");
    for (std::size_t idx : subscale_items)
        if (idx >= items) throw ConfigError("generator: subscale item index out of range");
}

json GeneratorConfig::to_json() const {
    return json{{"n_patients", n_patients},
                {"seed", seed},
                {"min_followups", min_followups},
                {"max_followups", max_followups},
                {"followup_probability", followup_probability},
                {"min_interval_months", min_interval_months},
                {"max_interval_months", max_interval_months},
                {"item_noise_sd", item_noise_sd},
                {"items", items},
                {"items_max_two", items_max_two},
                {"subscale_items", subscale_items}};
}

GeneratorConfig GeneratorConfig::from_json(const json& j) {
    GeneratorConfig c;
    const ConfigReader r(j, "generator");
    r.read("n_patients", c.n_patients);
    r.read("seed", c.seed);
    r.read("min_followups", c.min_followups);
    r.read("max_followups", c.max_followups);
    r.read("followup_probability", c.followup_probability);
    r.read("min_interval_months", c.min_interval_months);
    r.read("max_interval_months", c.max_interval_months);
    r.read("item_noise_sd", c.item_noise_sd);
    r.read("items", c.items);
    r.read("items_max_two", c.items_max_two);
    r.read("subscale_items", c.subscale_items);
    r.finish();
    return c;
}

json GroundTruth::to_json() const {
    json pts = json::array();
    for (const auto& p : patients) {
        pts.push_back({{"patient_id", p.id},
                       {"A_per_month", p.A.data},
                       {"initial_state", p.initial_state},
                       {"states", p.states}});
    }
    return json{{"format_version", 1},
                {"loadings", loadings.data},
                {"loadings_shape", {loadings.rows, loadings.cols}},
                {"offsets", offsets},
                {"patients", pts}};
}

namespace {

double round_to(double v, double step) { return std::round(v / step) * step; }

struct BaselineDraw {
    int subtype = 1;
    double onset = 0.0;
    double treatment = 0.0;
    double smn2 = 2.0;
};

BaselineDraw draw_baseline(std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    std::discrete_distribution<int> mix({0.30, 0.45, 0.25});
    BaselineDraw b;
    b.subtype = mix(rng) + 1;
    switch (b.subtype) {
        case 1:
            b.onset = std::max(0.5, 4.0 + 2.0 * n01(rng));
            b.smn2 = 2.0;
            break;
        case 2:
            b.onset = std::max(3.0, 12.0 + 4.0 * n01(rng));
            b.smn2 = n01(rng) > 0.8 ? 4.0 : 3.0;
            break;
        default:
            b.onset = std::max(12.0, 30.0 + 10.0 * n01(rng));
            b.smn2 = n01(rng) > 0.0 ? 4.0 : 3.0;
            break;
    }
    b.onset = round_to(b.onset, 0.1);
    b.treatment = round_to(b.onset + std::abs(24.0 + 18.0 * n01(rng)), 0.1);
    return b;
}

// Smooth map from baseline to the true per-month system matrix. Both states
// relax towards zero at baseline-dependent rates with a weak rotation.
Tensor<double> true_dynamics(const BaselineDraw& b) {
    const double o = (b.onset - 15.0) / 15.0;
    const double a = (b.treatment - 40.0) / 30.0;
    const double s = b.smn2 - 3.0;
    const double t1 = b.subtype == 1 ? 1.0 : 0.0;
    const double r1 = 0.030 + 0.040 / (1.0 + std::exp(-(1.0 - 0.9 * a + 0.6 * s - 0.8 * t1)));
    const double r2 = 0.020 + 0.030 / (1.0 + std::exp(-(0.6 + 0.7 * o - 0.5 * s)));
    const double coupling = 0.008 * std::tanh(0.5 * o + 0.5 * a);
    Tensor<double> A(2, 2);
    A(0, 0) = -r1;
    A(0, 1) = coupling;
    A(1, 0) = -coupling;
    A(1, 1) = -r2;
    return A;
}

std::vector<double> initial_state(const BaselineDraw& b, std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    const double z1 = -2.0 - 0.4 * (b.subtype == 1) + 0.4 * (b.subtype == 3) + 0.3 * n01(rng);
    const double z2 = 1.6 - 0.3 * (b.subtype == 2) + 0.3 * n01(rng);
    return {z1, z2};
}

}  // namespace

SyntheticCohort generate_synthetic(const GeneratorConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    SyntheticCohort out;
    Cohort& cohort = out.cohort;
    GroundTruth& truth = out.truth;
    cohort.baseline_columns = {"onset_age_months", "treatment_age_months", "smn2_copies", "subtype"};
    cohort.categorical_columns = {"subtype"};
    for (std::size_t j = 0; j < config.items; ++j)
        cohort.scale_r.item_max.push_back(j < config.items_max_two ? 2.0 : 1.0);

    // Item loadings spread over angles so that both latent directions are visible.
    const std::size_t p = config.items;
    truth.loadings = Tensor<double>(p, 2);
    truth.offsets.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        const double angle = -0.6 + 2.2 * static_cast<double>(j) / static_cast<double>(std::max<std::size_t>(p - 1, 1));
        const double magnitude = 2.0 + 1.0 * unif(rng);
        truth.loadings(j, 0) = magnitude * std::cos(angle);
        truth.loadings(j, 1) = magnitude * std::sin(angle);
        truth.offsets[j] = -1.0 + 2.0 * unif(rng);
    }

    std::binomial_distribution<int> followups(static_cast<int>(config.max_followups - config.min_followups),
                                              config.followup_probability);
    std::uniform_real_distribution<double> interval(config.min_interval_months, config.max_interval_months);

    const int width = std::max(4, static_cast<int>(std::to_string(config.n_patients).size()));
    for (std::size_t i = 0; i < config.n_patients; ++i) {
        char id[32];
        std::snprintf(id, sizeof(id), "P%0*zu", width, i + 1);
        const BaselineDraw b = draw_baseline(rng);

        PatientRecord rec;
        rec.id = id;
        rec.baseline = {format_double(b.onset), format_double(b.treatment), format_double(b.smn2),
                        std::to_string(b.subtype)};

        PatientTruth pt;
        pt.id = id;
        pt.A = true_dynamics(b);
        pt.initial_state = initial_state(b, rng);

        const std::size_t visits = 1 + config.min_followups + static_cast<std::size_t>(followups(rng));
        double t = 0.0;
        rec.r.items = Tensor<double>(visits, p);
        for (std::size_t k = 0; k < visits; ++k) {
            if (k > 0) t = round_to(t + interval(rng), 0.01);
            rec.r.times.push_back(t);
            Tensor<double> scaled = pt.A;
            for (double& v : scaled.data) v *= t;
            const Tensor<double> e = matrix_exp(scaled);
            std::vector<double> z{e(0, 0) * pt.initial_state[0] + e(0, 1) * pt.initial_state[1],
                                  e(1, 0) * pt.initial_state[0] + e(1, 1) * pt.initial_state[1]};
            for (std::size_t j = 0; j < p; ++j) {
                const double eta = truth.loadings(j, 0) * z[0] + truth.loadings(j, 1) * z[1] + truth.offsets[j];
                const double max = cohort.scale_r.item_max[j];
                const double mean = max / (1.0 + std::exp(-eta));
                const double noisy = mean + config.item_noise_sd * n01(rng);
                rec.r.items(k, j) = std::clamp(std::round(noisy), 0.0, max);
            }
            pt.states.push_back(std::move(z));
        }
        cohort.patients.push_back(std::move(rec));
        truth.patients.push_back(std::move(pt));
    }

    cohort = make_subscale(cohort, config.subscale_items);
    return out;
}

}  // namespace latalign
