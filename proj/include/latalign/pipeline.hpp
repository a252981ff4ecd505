#pragma once

// Orchestration shared by the command-line tool and the acceptance suite:
// training with epoch snapshots, evaluation output, ablation and run manifests.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latalign/checkpoint.hpp"
#include "latalign/config.hpp"
#include "latalign/eval_report.hpp"

namespace latalign {

namespace files {
inline constexpr const char* kGroundTruth = "ground_truth.json";
inline constexpr const char* kScenarioLog = "scenario_log.json";
inline constexpr const char* kPreprocessLog = "preprocess_log.json";
inline constexpr const char* kMetrics = "metrics.csv";
inline constexpr const char* kSummary = "summary.json";
inline constexpr const char* kHistory = "history.csv";
inline constexpr const char* kSnapshots = "snapshots.json";
inline constexpr const char* kModel = "model.ckpt";
inline constexpr const char* kTrajectories = "trajectories.csv";
inline constexpr const char* kTrajectoryFigure = "trajectories.svg";
inline constexpr const char* kAblation = "ablation.csv";
inline constexpr const char* kManifest = "manifest.json";
}  // namespace files

std::string snapshot_checkpoint_name(std::size_t epoch);

nlohmann::json preprocess_log_json(const PreprocessLog& log);

/// Seeded choice of `n` patient ids (all when fewer), returned in cohort order.
std::vector<std::string> select_patients(const std::vector<PatientData>& patients, std::size_t n, std::uint64_t seed);

struct Evaluation {
    ScatterReport report;
    std::vector<TrajectoryExport> panels;
};

Evaluation evaluate_model(const ModelState& model, const Cohort& processed, const EvaluateConfig& config);

/// metrics.csv, summary.json, one scatter SVG per dimension, trajectory CSV and SVG.
void write_evaluation(const Evaluation& eval, const ModelState& model, const std::filesystem::path& dir);

struct EpochSnapshot {
    std::size_t epoch = 0;
    ScatterSummary summary;
};

struct TrainArtifacts {
    TrainResult result;
    std::vector<EpochSnapshot> snapshots;
};

/// Train `initial` on `processed` for its configured epochs. Scatter summaries
/// are recorded at the configured snapshot epochs; with `out_dir` the snapshot
/// and final checkpoints, history.csv and snapshots.json are written there.
TrainArtifacts train_model(const Cohort& processed, ModelState initial,
                           const std::optional<std::filesystem::path>& out_dir, std::ostream* progress,
                           const EvaluateConfig& eval = {});

struct AblationRow {
    std::string arm;
    LossWeights weights;
    std::uint64_t seed = 0;
    ScatterSummary summary;
};

/// Train one model per penalty arm with every other setting shared.
std::vector<AblationRow> run_ablation(const Cohort& processed, const TrainConfig& base, const EvaluateConfig& eval,
                                      const std::optional<std::filesystem::path>& out_dir, std::ostream* progress);

std::string ablation_csv(const std::vector<AblationRow>& rows);

/// SHA-256 of a file's bytes, lowercase hex.
std::string file_digest(const std::filesystem::path& path);

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
    std::vector<std::string> outputs;
    double wall_clock_seconds = 0.0;

    void add_input(const std::filesystem::path& path);
    /// Every regular file directly inside `dir` except an existing manifest.
    void add_input_dir(const std::filesystem::path& dir);
    nlohmann::json to_json() const;
    void write(const std::filesystem::path& dir) const;
};

inline constexpr const char* kVersion = "1.0.0";

}  // namespace latalign
