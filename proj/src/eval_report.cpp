#include "latalign/eval_report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <omp.h>

namespace latalign {

namespace {

std::size_t find_time(std::span<const double> times, double t, double tolerance) {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= tolerance) return i;
    return times.size();
}

std::pair<double, double> observed_interval(const PatientData& p) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto* times : {&p.times_r, &p.times_s}) {
        if (times->empty()) continue;
        lo = std::min(lo, times->front());
        hi = std::max(hi, times->back());
    }
    return {lo, hi};
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

std::optional<std::vector<double>> misalignment(const PosteriorSeries& r, const PosteriorSeries& s,
                                                double tolerance) {
    std::optional<std::vector<double>> out;
    std::size_t shared = 0;
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        const std::size_t j = find_time(s.times, r.times[i], tolerance);
        if (j == s.times.size()) continue;
        const auto& a = r.means[i];
        const auto& b = s.means[j];
        if (a.size() != b.size()) throw ConfigError("misalignment: latent dimensions differ");
        if (!out) out.emplace(a.size(), 0.0);
        for (std::size_t d = 0; d < a.size(); ++d) (*out)[d] += std::abs(a[d] - b[d]);
        ++shared;
    }
    if (out)
        for (double& v : *out) v /= static_cast<double>(shared);
    return out;
}

std::vector<double> ode_dynamics_range(const TrajectoryEstimate<double>& traj, double t0, double t_last,
                                       double tolerance) {
    const std::size_t i0 = find_time(traj.times, t0, tolerance);
    const std::size_t i1 = find_time(traj.times, t_last, tolerance);
    if (i0 == traj.times.size() || i1 == traj.times.size())
        throw PreconditionError("ode_dynamics_range: trajectory not evaluated at the interval ends");
    std::vector<double> out(traj.values[i0].size());
    for (std::size_t d = 0; d < out.size(); ++d) out[d] = std::abs(traj.values[i1][d] - traj.values[i0][d]);
    return out;
}

std::optional<AlignmentMetrics> patient_metrics(const ModelState& model, const PatientData& patient,
                                                double tolerance) {
    const PatientFit fit = fit_patient(model, patient);
    auto delta_rs = misalignment(fit.r, fit.s, tolerance);
    if (!delta_rs) return std::nullopt;
    const auto [t0, t_last] = observed_interval(patient);
    const double ends[2] = {t0, t_last};
    const TrajectoryEstimate<double> traj = fit.trajectory(std::span<const double>(ends));
    AlignmentMetrics m;
    m.patient_id = patient.id;
    m.delta_rs = std::move(*delta_rs);
    m.delta_ode = ode_dynamics_range(traj, t0, t_last, tolerance);
    for (std::size_t d = 0; d < m.delta_rs.size(); ++d) m.above_diagonal.push_back(m.delta_ode[d] > m.delta_rs[d]);
    return m;
}

ScatterSummary summarize(const std::vector<AlignmentMetrics>& metrics, std::vector<std::string> excluded,
                         std::size_t latent_dim) {
    ScatterSummary s;
    s.included = metrics.size();
    s.excluded = std::move(excluded);
    s.patients = s.included + s.excluded.size();
    std::vector<double> pooled_rs, pooled_ode;
    for (std::size_t d = 0; d < latent_dim; ++d) {
        std::vector<double> rs, ode;
        std::size_t above = 0;
        for (const auto& m : metrics) {
            rs.push_back(m.delta_rs[d]);
            ode.push_back(m.delta_ode[d]);
            above += m.above_diagonal[d] ? 1 : 0;
        }
        pooled_rs.insert(pooled_rs.end(), rs.begin(), rs.end());
        pooled_ode.insert(pooled_ode.end(), ode.begin(), ode.end());
        const bool any = !metrics.empty();
        s.above_fraction.push_back(any ? static_cast<double>(above) / static_cast<double>(metrics.size()) : 0.0);
        s.median_delta_rs.push_back(any ? quantile(rs, 0.5) : 0.0);
        s.max_delta_rs.push_back(any ? *std::max_element(rs.begin(), rs.end()) : 0.0);
        s.mean_delta_rs.push_back(mean_of(rs));
        s.mean_delta_ode.push_back(mean_of(ode));
    }
    if (!pooled_rs.empty()) s.pooled_median_delta_rs = quantile(pooled_rs, 0.5);
    s.pooled_mean_delta_rs = mean_of(pooled_rs);
    s.pooled_mean_delta_ode = mean_of(pooled_ode);
    return s;
}

nlohmann::json ScatterSummary::to_json() const {
    return {{"patients", patients},
            {"included", included},
            {"excluded_count", excluded.size()},
            {"excluded", excluded},
            {"above_diagonal_fraction", above_fraction},
            {"median_delta_rs", median_delta_rs},
            {"max_delta_rs", max_delta_rs},
            {"mean_delta_rs", mean_delta_rs},
            {"mean_delta_ode", mean_delta_ode},
            {"pooled_median_delta_rs", pooled_median_delta_rs},
            {"pooled_mean_delta_rs", pooled_mean_delta_rs},
            {"pooled_mean_delta_ode", pooled_mean_delta_ode}};
}

namespace {

ScatterReport assemble(const std::vector<std::optional<AlignmentMetrics>>& per_patient,
                       const std::vector<PatientData>& patients, std::size_t latent_dim) {
    ScatterReport report;
    std::vector<std::string> excluded;
    for (std::size_t i = 0; i < patients.size(); ++i) {
        if (per_patient[i]) report.metrics.push_back(*per_patient[i]);
        else excluded.push_back(patients[i].id);
    }
    report.summary = summarize(report.metrics, std::move(excluded), latent_dim);
    return report;
}

}  // namespace

ScatterReport scatter_report_serial(const ModelState& model, const std::vector<PatientData>& patients,
                                    double tolerance) {
    std::vector<std::optional<AlignmentMetrics>> per_patient;
    per_patient.reserve(patients.size());
    for (const auto& p : patients) per_patient.push_back(patient_metrics(model, p, tolerance));
    return assemble(per_patient, patients, model.dims.latent_dim);
}

ScatterReport scatter_report(const ModelState& model, const std::vector<PatientData>& patients, double tolerance) {
    std::vector<std::optional<AlignmentMetrics>> per_patient(patients.size());
    const auto n = static_cast<std::ptrdiff_t>(patients.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            per_patient[static_cast<std::size_t>(i)] =
                patient_metrics(model, patients[static_cast<std::size_t>(i)], tolerance);
        } catch (...) {
#pragma omp critical(latalign_scatter_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return assemble(per_patient, patients, model.dims.latent_dim);
}

void write_metrics_csv(const std::vector<AlignmentMetrics>& metrics, const std::filesystem::path& path) {
    std::string out = "patient_id,dim,delta_rs,delta_ode,above_diagonal\n";
    for (const auto& m : metrics) {
        for (std::size_t d = 0; d < m.delta_rs.size(); ++d) {
            out += m.patient_id + ',' + std::to_string(d + 1) + ',' + format_double(m.delta_rs[d]) + ',' +
                   format_double(m.delta_ode[d]) + ',' + (m.above_diagonal[d] ? "1" : "0") + '\n';
        }
    }
    write_text_atomic(path, out);
}

std::vector<AlignmentMetrics> read_metrics_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "patient_id,dim,delta_rs,delta_ode,above_diagonal")
        throw DataError(path.string() + ":1: unexpected metrics header");
    std::vector<AlignmentMetrics> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 5) throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 5 fields");
        try {
            if (out.empty() || out.back().patient_id != f[0]) out.push_back({f[0], {}, {}, {}});
            auto& m = out.back();
            if (std::stoul(f[1]) != m.delta_rs.size() + 1)
                throw DataError(path.string() + ":" + std::to_string(line_no) + ": dimensions out of order");
            m.delta_rs.push_back(std::stod(f[2]));
            m.delta_ode.push_back(std::stod(f[3]));
            m.above_diagonal.push_back(f[4] == "1");
        } catch (const std::logic_error&) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
        }
    }
    return out;
}

nlohmann::json TrajectoryExport::to_json() const {
    auto series = [](const PosteriorSeries& s) {
        return nlohmann::json{{"times", s.times}, {"means", s.means}};
    };
    return {{"patient_id", patient_id},
            {"r", series(r)},
            {"s", series(s)},
            {"sample_times", sample_times},
            {"samples", samples}};
}

std::vector<TrajectoryExport> trajectory_fit_export(const ModelState& model, const std::vector<PatientData>& patients,
                                                    const std::vector<std::string>& ids) {
    std::vector<TrajectoryExport> out;
    for (const auto& id : ids) {
        auto it = std::find_if(patients.begin(), patients.end(), [&](const PatientData& p) { return p.id == id; });
        if (it == patients.end()) throw DataError("unknown patient id '" + id + "'");
        const PatientFit fit = fit_patient(model, *it);
        const auto [t0, t_last] = observed_interval(*it);
        TrajectoryExport e;
        e.patient_id = id;
        e.r = fit.r;
        e.s = fit.s;
        for (std::size_t i = 0; i < kTrajectorySamples; ++i) {
            const double frac = static_cast<double>(i) / static_cast<double>(kTrajectorySamples - 1);
            e.sample_times.push_back(i + 1 == kTrajectorySamples ? t_last : t0 + frac * (t_last - t0));
        }
        e.samples = fit.trajectory(std::span<const double>(e.sample_times)).values;
        out.push_back(std::move(e));
    }
    return out;
}

void write_trajectory_csv(const std::vector<TrajectoryExport>& exports, const std::filesystem::path& path) {
    std::string out = "patient_id,kind,time_months,dim,value\n";
    auto row = [&](const std::string& id, const char* kind, double t, std::size_t d, double v) {
        out += id + ',' + kind + ',' + format_double(t) + ',' + std::to_string(d + 1) + ',' + format_double(v) + '\n';
    };
    for (const auto& e : exports) {
        for (std::size_t k = 0; k < e.r.times.size(); ++k)
            for (std::size_t d = 0; d < e.r.means[k].size(); ++d) row(e.patient_id, "R", e.r.times[k], d, e.r.means[k][d]);
        for (std::size_t k = 0; k < e.s.times.size(); ++k)
            for (std::size_t d = 0; d < e.s.means[k].size(); ++d) row(e.patient_id, "S", e.s.times[k], d, e.s.means[k][d]);
        for (std::size_t k = 0; k < e.sample_times.size(); ++k)
            for (std::size_t d = 0; d < e.samples[k].size(); ++d)
                row(e.patient_id, "trajectory", e.sample_times[k], d, e.samples[k][d]);
    }
    write_text_atomic(path, out);
}

}  // namespace latalign
