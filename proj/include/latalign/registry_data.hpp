#pragma once

// Cohort data model, CSV ingestion, preprocessing, subscale construction and
// the discrepancy scenarios applied to the synthetic second instrument.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "latalign/params.hpp"

namespace latalign {

/// One instrument's visits for one patient. `items` is time-major: row k holds
/// the item values observed at times[k].
struct Series {
    std::vector<double> times;
    Tensor<double> items;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    std::span<const double> at(std::size_t k) const { return items.row(k); }
    double sum_score(std::size_t k) const;
    void erase(std::size_t k);
};

struct PatientRecord {
    std::string id;
    std::vector<std::string> baseline;  // raw values, in Cohort::baseline_columns order
    Series r;
    Series s;
};

/// Per-item maximum integer score of an instrument.
struct ItemScale {
    std::vector<double> item_max;

    std::size_t size() const { return item_max.size(); }
    double max_sum() const;
};

struct Cohort {
    std::vector<std::string> baseline_columns;
    std::vector<std::string> categorical_columns;
    ItemScale scale_r;
    ItemScale scale_s;
    bool transformed = false;  // items already rescaled and logit-transformed
    std::vector<PatientRecord> patients;

    std::size_t items_r() const { return scale_r.size(); }
    std::size_t items_s() const { return scale_s.size(); }
    bool has_s() const;
};

// ---------------------------------------------------------------------------
// Baseline covariates

/// Standardization of baseline columns: z-scores for continuous columns and
/// one-hot encoding over observed levels for categorical ones.
struct BaselineStats {
    struct Column {
        std::string name;
        bool categorical = false;
        double mean = 0.0;
        double sd = 1.0;
        std::vector<std::string> levels;
    };
    std::vector<Column> columns;

    static BaselineStats fit(const Cohort& cohort);
    std::size_t width() const;
    std::vector<double> encode(const std::vector<std::string>& raw) const;

    nlohmann::json to_json() const;
    static BaselineStats from_json(const nlohmann::json& j);
};

// ---------------------------------------------------------------------------
// Files

namespace files {
inline constexpr const char* kInstrumentR = "instrument_R.csv";
inline constexpr const char* kInstrumentS = "instrument_S.csv";
inline constexpr const char* kBaseline = "baseline.csv";
inline constexpr const char* kMeta = "cohort.json";
}  // namespace files

struct LongRow {
    std::string patient_id;
    double time = 0.0;
    std::vector<double> items;
};

/// Parse a long-format instrument CSV (patient_id, time_months, item_1..item_p).
/// `source` names the input in error messages.
std::vector<LongRow> parse_instrument_csv(std::istream& in, const std::string& source);

/// Load instrument_R.csv, optional instrument_S.csv, baseline.csv and cohort.json.
Cohort load_cohort(const std::filesystem::path& dir);

void write_cohort(const Cohort& cohort, const std::filesystem::path& dir);

/// Write `text` to `path` through a temporary file and rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal form that round-trips.
std::string format_double(double v);

// ---------------------------------------------------------------------------
// Preprocessing

inline constexpr double kRescaleEpsilon = 0.01;
inline constexpr double kMinSumScoreVariance = 0.5;
inline constexpr double kOutlierIqrFactor = 2.0;

double logit(double p);
double inverse_logit(double x);
/// eps + (1 - 2 eps) * value / item_max.
double rescale_item(double value, double item_max);

/// Linear-interpolation quantile of unsorted data (the common "type 7" rule).
double quantile(std::vector<double> values, double q);

/// Cutoff for the sum-score outlier rule: factor * IQR of the pooled absolute
/// adjacent sum-score differences of one instrument.
double outlier_threshold(const std::vector<const Series*>& series);

/// Indices of time points whose |sum-score difference to the previous time
/// point| exceeds `threshold`.
std::vector<std::size_t> outlier_time_points(const Series& series, double threshold);

struct PreprocessEvent {
    std::string patient_id;
    char instrument = 'R';
    std::string what;  // "outlier", "too_few_time_points", "low_variance", "patient_removed"
    double time = 0.0;
};

struct PreprocessLog {
    double threshold_r = 0.0;
    double threshold_s = 0.0;
    std::vector<PreprocessEvent> events;
};

/// Outlier removal, minimum-visit filter, sum-score variance filter and the
/// rescale+logit transform, per instrument, in that order. A cohort that is
/// already transformed is returned unchanged.
Cohort preprocess(const Cohort& cohort, PreprocessLog* log = nullptr);

// ---------------------------------------------------------------------------
// Subscale and scenarios

/// S := selected rows of R at identical times.
Cohort make_subscale(const Cohort& cohort, const std::vector<std::size_t>& item_indices);

enum class ScenarioKind { kNone, kShiftAll, kShiftSubgroup, kDropoutUniform, kDropoutLate, kScoreConditional };

ScenarioKind parse_scenario_kind(const std::string& name);
std::string to_string(ScenarioKind kind);
const std::vector<ScenarioKind>& all_modification_kinds();

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::kNone;
    double shift_offset = 2.0;
    double subgroup_probability = 0.5;
    double dropout_probability = 0.5;
    double sum_score_quantile = 0.6;
    std::uint64_t seed = 1;

    void validate() const;
};

struct DropoutDraw {
    std::string patient_id;
    std::size_t index = 0;        // 1-based time-point index k
    std::size_t series_length = 0; // T + 1 of the R series
    bool removed = false;
};

struct ScenarioLog {
    ScenarioKind kind = ScenarioKind::kNone;
    std::vector<std::pair<std::string, double>> deleted;  // (patient, time) of removed S visits
    std::set<std::string> shifted_patients;
    std::set<std::string> emptied_patients;               // all S visits removed
    std::vector<DropoutDraw> draws;
    double cutoff = 0.0;

    nlohmann::json to_json() const;
};

/// Per-patient generator seed from the scenario seed and the patient id.
std::uint64_t patient_seed(std::uint64_t seed, const std::string& patient_id);

/// Apply a modification to the second instrument of a raw (untransformed) cohort.
Cohort apply_scenario(const Cohort& cohort, const ScenarioSpec& spec, ScenarioLog* log = nullptr);

}  // namespace latalign
