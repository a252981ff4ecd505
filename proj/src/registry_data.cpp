#include "latalign/registry_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "latalign/error.hpp"

namespace latalign {

namespace fs = std::filesystem;
using nlohmann::json;

double Series::sum_score(std::size_t k) const {
    double s = 0.0;
    for (double v : at(k)) s += v;
    return s;
}

void Series::erase(std::size_t k) {
    times.erase(times.begin() + static_cast<std::ptrdiff_t>(k));
    auto first = items.data.begin() + static_cast<std::ptrdiff_t>(k * items.cols);
    items.data.erase(first, first + static_cast<std::ptrdiff_t>(items.cols));
    items.rows -= 1;
}

double ItemScale::max_sum() const { return std::accumulate(item_max.begin(), item_max.end(), 0.0); }

bool Cohort::has_s() const {
    return std::any_of(patients.begin(), patients.end(), [](const PatientRecord& p) { return !p.s.empty(); });
}

// ---------------------------------------------------------------------------
// Baseline

BaselineStats BaselineStats::fit(const Cohort& cohort) {
    BaselineStats stats;
    const std::size_t n = cohort.patients.size();
    for (std::size_t c = 0; c < cohort.baseline_columns.size(); ++c) {
        Column col;
        col.name = cohort.baseline_columns[c];
        col.categorical = std::find(cohort.categorical_columns.begin(), cohort.categorical_columns.end(),
                                    col.name) != cohort.categorical_columns.end();
        if (col.categorical) {
            std::set<std::string> levels;
            for (const auto& p : cohort.patients) levels.insert(p.baseline[c]);
            col.levels.assign(levels.begin(), levels.end());
        } else if (n > 0) {
            double mean = 0.0;
            for (const auto& p : cohort.patients) mean += std::stod(p.baseline[c]);
            mean /= static_cast<double>(n);
            double ss = 0.0;
            for (const auto& p : cohort.patients) {
                const double d = std::stod(p.baseline[c]) - mean;
                ss += d * d;
            }
            const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
            col.mean = mean;
            col.sd = sd > 0.0 ? sd : 1.0;
        }
        stats.columns.push_back(std::move(col));
    }
    return stats;
}

std::size_t BaselineStats::width() const {
    std::size_t w = 0;
    for (const auto& c : columns) w += c.categorical ? c.levels.size() : 1;
    return w;
}

std::vector<double> BaselineStats::encode(const std::vector<std::string>& raw) const {
    if (raw.size() != columns.size())
        throw DataError("baseline row has " + std::to_string(raw.size()) + " values, expected " +
                        std::to_string(columns.size()));
    std::vector<double> out;
    out.reserve(width());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto& col = columns[c];
        if (col.categorical) {
            for (const auto& level : col.levels) out.push_back(raw[c] == level ? 1.0 : 0.0);
        } else {
            double v = 0.0;
            try {
                v = std::stod(raw[c]);
            } catch (const std::exception&) {
                throw DataError("baseline column '" + col.name + "': non-numeric value '" + raw[c] + "'");
            }
            out.push_back((v - col.mean) / col.sd);
        }
    }
    return out;
}

json BaselineStats::to_json() const {
    json arr = json::array();
    for (const auto& c : columns) {
        json j{{"name", c.name}, {"categorical", c.categorical}};
        if (c.categorical) j["levels"] = c.levels;
        else {
            j["mean"] = c.mean;
            j["sd"] = c.sd;
        }
        arr.push_back(j);
    }
    return arr;
}

BaselineStats BaselineStats::from_json(const json& j) {
    BaselineStats stats;
    for (const auto& e : j) {
        Column c;
        c.name = e.at("name").get<std::string>();
        c.categorical = e.at("categorical").get<bool>();
        if (c.categorical) c.levels = e.at("levels").get<std::vector<std::string>>();
        else {
            c.mean = e.at("mean").get<double>();
            c.sd = e.at("sd").get<double>();
        }
        stats.columns.push_back(std::move(c));
    }
    return stats;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

double parse_number(const std::string& text, const std::string& source, std::size_t line, const std::string& what) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw DataError(source + ":" + std::to_string(line) + ": " + what + " is not a finite number: '" + text + "'");
    return v;
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::vector<LongRow> parse_instrument_csv(std::istream& in, const std::string& source) {
    std::string line;
    if (!read_line(in, line)) throw DataError(source + ": missing header");
    const auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "patient_id" || header[1] != "time_months")
        throw DataError(source + ":1: header must be patient_id,time_months,item_1,...");
    for (std::size_t j = 2; j < header.size(); ++j)
        if (header[j] != "item_" + std::to_string(j - 1))
            throw DataError(source + ":1: expected column item_" + std::to_string(j - 1) + ", got '" + header[j] + "'");
    const std::size_t p = header.size() - 2;

    std::vector<LongRow> rows;
    std::size_t lineno = 1;
    while (read_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != p + 2)
            throw DataError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(p + 2) +
                            " fields, got " + std::to_string(fields.size()));
        LongRow row;
        row.patient_id = fields[0];
        if (row.patient_id.empty()) throw DataError(source + ":" + std::to_string(lineno) + ": empty patient_id");
        row.time = parse_number(fields[1], source, lineno, "time_months");
        row.items.reserve(p);
        for (std::size_t j = 0; j < p; ++j)
            row.items.push_back(parse_number(fields[j + 2], source, lineno, "item_" + std::to_string(j + 1)));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::size_t item_count_from_header(const fs::path& path) {
    auto in = open_input(path);
    std::string line;
    if (!read_line(in, line)) throw DataError(path.string() + ": missing header");
    const auto header = split_csv_line(line);
    return header.size() >= 2 ? header.size() - 2 : 0;
}

void attach_rows(std::vector<LongRow> rows, std::size_t width, const std::string& source, char instrument,
                 std::unordered_map<std::string, std::size_t>& index, std::vector<PatientRecord>& patients) {
    std::stable_sort(rows.begin(), rows.end(), [&](const LongRow& a, const LongRow& b) {
        if (a.patient_id != b.patient_id) return index.at(a.patient_id) < index.at(b.patient_id);
        return a.time < b.time;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        auto& rec = patients[index.at(row.patient_id)];
        Series& series = instrument == 'R' ? rec.r : rec.s;
        if (!series.empty() && std::abs(series.times.back() - row.time) < 1e-9)
            throw DataError(source + ": duplicate observation for patient " + row.patient_id + ", instrument " +
                            instrument + ", time " + format_double(row.time));
        if (series.items.cols == 0) series.items.cols = width;
        series.times.push_back(row.time);
        series.items.data.insert(series.items.data.end(), row.items.begin(), row.items.end());
        series.items.rows += 1;
    }
}

}  // namespace

Cohort load_cohort(const fs::path& dir) {
    Cohort cohort;
    {
        auto in = open_input(dir / files::kMeta);
        json meta;
        try {
            in >> meta;
        } catch (const json::exception& e) {
            throw DataError((dir / files::kMeta).string() + ": " + e.what());
        }
        cohort.categorical_columns = meta.value("categorical_columns", std::vector<std::string>{});
        cohort.scale_r.item_max = meta.at("item_max_R").get<std::vector<double>>();
        cohort.scale_s.item_max = meta.value("item_max_S", std::vector<double>{});
        cohort.transformed = meta.value("transformed", false);
    }

    std::unordered_map<std::string, std::size_t> index;
    {
        const fs::path path = dir / files::kBaseline;
        auto in = open_input(path);
        std::string line;
        if (!read_line(in, line)) throw DataError(path.string() + ": missing header");
        auto header = split_csv_line(line);
        if (header.empty() || header[0] != "patient_id")
            throw DataError(path.string() + ":1: first column must be patient_id");
        cohort.baseline_columns.assign(header.begin() + 1, header.end());
        std::size_t lineno = 1;
        while (read_line(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto fields = split_csv_line(line);
            if (fields.size() != header.size())
                throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                std::to_string(header.size()) + " fields");
            if (index.count(fields[0]))
                throw DataError(path.string() + ":" + std::to_string(lineno) + ": duplicate patient " + fields[0]);
            index.emplace(fields[0], cohort.patients.size());
            PatientRecord rec;
            rec.id = fields[0];
            rec.baseline.assign(fields.begin() + 1, fields.end());
            cohort.patients.push_back(std::move(rec));
        }
        for (const auto& c : cohort.categorical_columns)
            if (std::find(cohort.baseline_columns.begin(), cohort.baseline_columns.end(), c) == cohort.baseline_columns.end())
                throw DataError("categorical column '" + c + "' is not in " + path.string());
    }

    auto load_instrument = [&](const fs::path& path, char instrument, std::size_t expected) {
        auto in = open_input(path);
        auto rows = parse_instrument_csv(in, path.string());
        const std::size_t width = item_count_from_header(path);
        if (width != expected)
            throw DataError(path.string() + ": " + std::to_string(width) + " item columns, cohort.json declares " +
                            std::to_string(expected));
        for (const auto& row : rows)
            if (!index.count(row.patient_id))
                throw DataError(path.string() + ": patient " + row.patient_id + " has no baseline row");
        attach_rows(std::move(rows), width, path.string(), instrument, index, cohort.patients);
    };
    load_instrument(dir / files::kInstrumentR, 'R', cohort.scale_r.size());
    if (fs::exists(dir / files::kInstrumentS)) load_instrument(dir / files::kInstrumentS, 'S', cohort.scale_s.size());
    for (auto& p : cohort.patients) {
        p.r.items.cols = cohort.items_r();
        p.s.items.cols = cohort.items_s();
    }
    return cohort;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << text;
        if (!out) throw DataError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw DataError("cannot move " + tmp.string() + " into place: " + ec.message());
}

namespace {

std::string instrument_csv(const Cohort& cohort, bool instrument_r) {
    const std::size_t p = instrument_r ? cohort.items_r() : cohort.items_s();
    std::string out = "patient_id,time_months";
    for (std::size_t j = 1; j <= p; ++j) out += ",item_" + std::to_string(j);
    out += '\n';
    for (const auto& rec : cohort.patients) {
        const Series& s = instrument_r ? rec.r : rec.s;
        for (std::size_t k = 0; k < s.size(); ++k) {
            out += rec.id;
            out += ',';
            out += format_double(s.times[k]);
            for (double v : s.at(k)) {
                out += ',';
                out += format_double(v);
            }
            out += '\n';
        }
    }
    return out;
}

}  // namespace

void write_cohort(const Cohort& cohort, const fs::path& dir) {
    fs::create_directories(dir);
    json meta{{"format_version", 1},
              {"categorical_columns", cohort.categorical_columns},
              {"item_max_R", cohort.scale_r.item_max},
              {"item_max_S", cohort.scale_s.item_max},
              {"transformed", cohort.transformed}};
    write_text_atomic(dir / files::kMeta, meta.dump(2) + "\n");

    std::string base = "patient_id";
    for (const auto& c : cohort.baseline_columns) base += "," + c;
    base += '\n';
    for (const auto& rec : cohort.patients) {
        base += rec.id;
        for (const auto& v : rec.baseline) base += "," + v;
        base += '\n';
    }
    write_text_atomic(dir / files::kBaseline, base);
    write_text_atomic(dir / files::kInstrumentR, instrument_csv(cohort, true));
    if (cohort.items_s() > 0) write_text_atomic(dir / files::kInstrumentS, instrument_csv(cohort, false));
}

// ---------------------------------------------------------------------------
// Preprocessing

double logit(double p) { return std::log(p / (1.0 - p)); }
double inverse_logit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double rescale_item(double value, double item_max) {
    return kRescaleEpsilon + (1.0 - 2.0 * kRescaleEpsilon) * value / item_max;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw PreconditionError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double outlier_threshold(const std::vector<const Series*>& series) {
    std::vector<double> diffs;
    for (const Series* s : series)
        for (std::size_t k = 1; k < s->size(); ++k) diffs.push_back(std::abs(s->sum_score(k) - s->sum_score(k - 1)));
    if (diffs.empty()) return std::numeric_limits<double>::infinity();
    return kOutlierIqrFactor * (quantile(diffs, 0.75) - quantile(diffs, 0.25));
}

std::vector<std::size_t> outlier_time_points(const Series& series, double threshold) {
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k < series.size(); ++k)
        if (std::abs(series.sum_score(k) - series.sum_score(k - 1)) > threshold) out.push_back(k);
    return out;
}

namespace {

double sum_score_variance(const Series& s) {
    const std::size_t n = s.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) mean += s.sum_score(k);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t k = 0; k < n; ++k) ss += (s.sum_score(k) - mean) * (s.sum_score(k) - mean);
    return ss / static_cast<double>(n - 1);
}

void clear_series(Series& s) {
    s.times.clear();
    s.items.data.clear();
    s.items.rows = 0;
}

void preprocess_instrument(Cohort& cohort, char instrument, PreprocessLog* log) {
    auto series_of = [&](PatientRecord& p) -> Series& { return instrument == 'R' ? p.r : p.s; };
    const ItemScale& scale = instrument == 'R' ? cohort.scale_r : cohort.scale_s;

    std::vector<const Series*> all;
    for (auto& p : cohort.patients)
        if (!series_of(p).empty()) all.push_back(&series_of(p));
    const double threshold = outlier_threshold(all);
    if (log) (instrument == 'R' ? log->threshold_r : log->threshold_s) = threshold;

    for (auto& p : cohort.patients) {
        Series& s = series_of(p);
        if (s.empty()) continue;
        const auto outliers = outlier_time_points(s, threshold);
        for (auto it = outliers.rbegin(); it != outliers.rend(); ++it) {
            if (log) log->events.push_back({p.id, instrument, "outlier", s.times[*it]});
            s.erase(*it);
        }
        if (s.size() < 2) {
            if (log) log->events.push_back({p.id, instrument, "too_few_time_points", 0.0});
            clear_series(s);
            continue;
        }
        if (sum_score_variance(s) < kMinSumScoreVariance) {
            if (log) log->events.push_back({p.id, instrument, "low_variance", 0.0});
            clear_series(s);
            continue;
        }
        for (std::size_t k = 0; k < s.size(); ++k)
            for (std::size_t j = 0; j < s.items.cols; ++j) {
                double& v = s.items(k, j);
                v = logit(rescale_item(v, scale.item_max[j]));
            }
    }
}

}  // namespace

Cohort preprocess(const Cohort& cohort, PreprocessLog* log) {
    if (cohort.transformed) return cohort;
    Cohort out = cohort;
    preprocess_instrument(out, 'R', log);
    if (out.items_s() > 0) preprocess_instrument(out, 'S', log);
    std::vector<PatientRecord> kept;
    kept.reserve(out.patients.size());
    for (auto& p : out.patients) {
        if (p.r.empty() && p.s.empty()) {
            if (log) log->events.push_back({p.id, '-', "patient_removed", 0.0});
            continue;
        }
        kept.push_back(std::move(p));
    }
    out.patients = std::move(kept);
    out.transformed = true;
    return out;
}

// ---------------------------------------------------------------------------
// Subscale and scenarios

Cohort make_subscale(const Cohort& cohort, const std::vector<std::size_t>& item_indices) {
    if (item_indices.empty()) throw ConfigError("subscale needs at least one item index");
    for (std::size_t idx : item_indices)
        if (idx >= cohort.items_r())
            throw ConfigError("subscale item index " + std::to_string(idx) + " out of range (instrument R has " +
                              std::to_string(cohort.items_r()) + " items)");
    Cohort out = cohort;
    out.scale_s.item_max.clear();
    for (std::size_t idx : item_indices) out.scale_s.item_max.push_back(cohort.scale_r.item_max[idx]);
    const std::size_t q = item_indices.size();
    for (auto& p : out.patients) {
        p.s.times = p.r.times;
        p.s.items = Tensor<double>(p.r.size(), q);
        for (std::size_t k = 0; k < p.r.size(); ++k)
            for (std::size_t j = 0; j < q; ++j) p.s.items(k, j) = p.r.items(k, item_indices[j]);
    }
    return out;
}

namespace {

const std::vector<std::pair<ScenarioKind, std::string>>& kind_names() {
    static const std::vector<std::pair<ScenarioKind, std::string>> names{
        {ScenarioKind::kNone, "none"},
        {ScenarioKind::kShiftAll, "shift_all"},
        {ScenarioKind::kShiftSubgroup, "shift_subgroup"},
        {ScenarioKind::kDropoutUniform, "dropout_uniform"},
        {ScenarioKind::kDropoutLate, "dropout_late"},
        {ScenarioKind::kScoreConditional, "score_conditional"},
    };
    return names;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

bool bernoulli(std::mt19937_64& rng, double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

}  // namespace

ScenarioKind parse_scenario_kind(const std::string& name) {
    for (const auto& [kind, n] : kind_names())
        if (n == name) return kind;
    throw ConfigError("unknown scenario kind '" + name + "'");
}

std::string to_string(ScenarioKind kind) {
    for (const auto& [k, n] : kind_names())
        if (k == kind) return n;
    return "unknown";
}

const std::vector<ScenarioKind>& all_modification_kinds() {
    static const std::vector<ScenarioKind> kinds{ScenarioKind::kShiftAll, ScenarioKind::kShiftSubgroup,
                                                 ScenarioKind::kDropoutUniform, ScenarioKind::kDropoutLate,
                                                 ScenarioKind::kScoreConditional};
    return kinds;
}

void ScenarioSpec::validate() const {
    auto prob = [](double p, const char* what) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1]");
    };
    prob(subgroup_probability, "subgroup_probability");
    prob(dropout_probability, "dropout_probability");
    if (!(sum_score_quantile > 0.0 && sum_score_quantile < 1.0))
        throw ConfigError("sum_score_quantile must lie in (0, 1)");
    if (!std::isfinite(shift_offset)) throw ConfigError("shift_offset must be finite");
}

json ScenarioLog::to_json() const {
    json j;
    j["kind"] = to_string(kind);
    j["cutoff"] = cutoff;
    json del = json::array();
    for (const auto& [id, t] : deleted) del.push_back({{"patient_id", id}, {"time_months", t}});
    j["deleted"] = del;
    j["shifted_patients"] = shifted_patients;
    j["emptied_patients"] = emptied_patients;
    return j;
}

std::uint64_t patient_seed(std::uint64_t seed, const std::string& patient_id) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : patient_id) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(seed ^ splitmix64(h));
}

Cohort apply_scenario(const Cohort& cohort, const ScenarioSpec& spec, ScenarioLog* log) {
    spec.validate();
    ScenarioLog local;
    ScenarioLog& lg = log ? *log : local;
    lg = ScenarioLog{};
    lg.kind = spec.kind;
    if (spec.kind == ScenarioKind::kNone) return cohort;
    if (cohort.transformed) throw PreconditionError("scenarios apply to raw item scores, cohort is already transformed");
    if (!cohort.has_s()) throw PreconditionError("scenario '" + to_string(spec.kind) + "' needs a second instrument");

    Cohort out = cohort;
    const bool shift = spec.kind == ScenarioKind::kShiftAll || spec.kind == ScenarioKind::kShiftSubgroup;
    if (shift)
        for (double& m : out.scale_s.item_max) m += spec.shift_offset;

    if (spec.kind == ScenarioKind::kScoreConditional) {
        std::vector<double> sums;
        for (const auto& p : out.patients)
            for (std::size_t k = 0; k < p.r.size(); ++k) sums.push_back(p.r.sum_score(k));
        lg.cutoff = sums.empty() ? 0.0 : quantile(sums, spec.sum_score_quantile);
    }

    for (auto& p : out.patients) {
        std::mt19937_64 rng(patient_seed(spec.seed, p.id));
        Series& s = p.s;
        const bool had_s = !s.empty();
        switch (spec.kind) {
            case ScenarioKind::kShiftAll:
            case ScenarioKind::kShiftSubgroup: {
                const bool selected =
                    spec.kind == ScenarioKind::kShiftAll || bernoulli(rng, spec.subgroup_probability);
                if (!selected || s.empty()) break;
                for (double& v : s.items.data) v += spec.shift_offset;
                lg.shifted_patients.insert(p.id);
                break;
            }
            case ScenarioKind::kDropoutUniform:
            case ScenarioKind::kDropoutLate: {
                const std::size_t n = s.size();
                const std::size_t length = p.r.empty() ? n : p.r.size();
                std::vector<bool> remove(n, false);
                for (std::size_t k = 1; k <= n; ++k) {
                    const double prob = spec.kind == ScenarioKind::kDropoutUniform
                                            ? spec.dropout_probability
                                            : static_cast<double>(k) / static_cast<double>(length + 3);
                    remove[k - 1] = bernoulli(rng, prob);
                    lg.draws.push_back({p.id, k, length, remove[k - 1]});
                }
                for (std::size_t k = n; k-- > 0;)
                    if (remove[k]) {
                        lg.deleted.emplace_back(p.id, s.times[k]);
                        s.erase(k);
                    }
                break;
            }
            case ScenarioKind::kScoreConditional: {
                for (std::size_t k = s.size(); k-- > 0;) {
                    bool above = false;
                    for (std::size_t j = 0; j < p.r.size(); ++j)
                        if (std::abs(p.r.times[j] - s.times[k]) < 1e-9) above = p.r.sum_score(j) > lg.cutoff;
                    if (!above) {
                        lg.deleted.emplace_back(p.id, s.times[k]);
                        s.erase(k);
                    }
                }
                break;
            }
            case ScenarioKind::kNone: break;
        }
        if (had_s && s.empty()) lg.emptied_patients.insert(p.id);
    }
    std::sort(lg.deleted.begin(), lg.deleted.end());
    return out;
}

}  // namespace latalign
