#pragma once

// Misalignment diagnostics: per-patient distance between the two instruments'
// latent representations at shared visits against the range of the fitted
// trajectory, the scatter summary, and trajectory exports for plotting.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latalign/alignment_model.hpp"

namespace latalign {

inline constexpr double kDefaultTimeMatchTolerance = 1e-9;  // months

/// Mean absolute difference of the encoder means over visits shared by both
/// instruments; nullopt when no visit is shared.
std::optional<std::vector<double>> misalignment(const PosteriorSeries& r, const PosteriorSeries& s,
                                                double tolerance = kDefaultTimeMatchTolerance);

/// |traj(t_last) - traj(t0)|; both times must be among traj.times.
std::vector<double> ode_dynamics_range(const TrajectoryEstimate<double>& traj, double t0, double t_last,
                                       double tolerance = kDefaultTimeMatchTolerance);

struct AlignmentMetrics {
    std::string patient_id;
    std::vector<double> delta_rs;
    std::vector<double> delta_ode;
    std::vector<bool> above_diagonal;  // delta_ode > delta_rs
};

/// Metrics for one patient, or nullopt when the instruments share no visit.
std::optional<AlignmentMetrics> patient_metrics(const ModelState& model, const PatientData& patient,
                                                double tolerance = kDefaultTimeMatchTolerance);

struct ScatterSummary {
    std::size_t patients = 0;
    std::size_t included = 0;
    std::vector<std::string> excluded;  // no shared visit
    std::vector<double> above_fraction;  // per dimension
    std::vector<double> median_delta_rs;
    std::vector<double> max_delta_rs;
    std::vector<double> mean_delta_rs;
    std::vector<double> mean_delta_ode;
    double pooled_median_delta_rs = 0.0;  // over all patients and dimensions
    double pooled_mean_delta_rs = 0.0;
    double pooled_mean_delta_ode = 0.0;

    nlohmann::json to_json() const;
};

struct ScatterReport {
    std::vector<AlignmentMetrics> metrics;  // patient order of the input
    ScatterSummary summary;
};

ScatterSummary summarize(const std::vector<AlignmentMetrics>& metrics, std::vector<std::string> excluded,
                         std::size_t latent_dim);

/// Reference implementation, one patient after another.
ScatterReport scatter_report_serial(const ModelState& model, const std::vector<PatientData>& patients,
                                    double tolerance = kDefaultTimeMatchTolerance);

/// Same result with patients fitted on OpenMP threads.
ScatterReport scatter_report(const ModelState& model, const std::vector<PatientData>& patients,
                             double tolerance = kDefaultTimeMatchTolerance);

void write_metrics_csv(const std::vector<AlignmentMetrics>& metrics, const std::filesystem::path& path);
std::vector<AlignmentMetrics> read_metrics_csv(const std::filesystem::path& path);

inline constexpr std::size_t kTrajectorySamples = 100;

struct TrajectoryExport {
    std::string patient_id;
    PosteriorSeries r;
    PosteriorSeries s;
    std::vector<double> sample_times;            // months, uniform over [t0, t_last]
    std::vector<std::vector<double>> samples;    // [time][dim]

    nlohmann::json to_json() const;
};

/// Throws DataError for an unknown id.
std::vector<TrajectoryExport> trajectory_fit_export(const ModelState& model, const std::vector<PatientData>& patients,
                                                    const std::vector<std::string>& ids);

void write_trajectory_csv(const std::vector<TrajectoryExport>& exports, const std::filesystem::path& path);

}  // namespace latalign
