#include "latalign/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>

#include <openssl/evp.h>

#include "latalign/svg.hpp"

namespace latalign {

namespace fs = std::filesystem;
using nlohmann::json;

std::string snapshot_checkpoint_name(std::size_t epoch) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "model_epoch_%03zu.ckpt", epoch);
    return buf;
}

json preprocess_log_json(const PreprocessLog& log) {
    json events = json::array();
    for (const auto& e : log.events) {
        events.push_back({{"patient_id", e.patient_id},
                          {"instrument", std::string(1, e.instrument)},
                          {"what", e.what},
                          {"time_months", e.time}});
    }
    return {{"outlier_threshold_R", log.threshold_r}, {"outlier_threshold_S", log.threshold_s}, {"events", events}};
}

std::vector<std::string> select_patients(const std::vector<PatientData>& patients, std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(patients.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min(n, idx.size()));
    std::sort(idx.begin(), idx.end());
    std::vector<std::string> ids;
    for (std::size_t i : idx) ids.push_back(patients[i].id);
    return ids;
}

Evaluation evaluate_model(const ModelState& model, const Cohort& processed, const EvaluateConfig& config) {
    config.validate();
    const std::vector<PatientData> patients = prepare_patients(processed, model.baseline_stats);
    Evaluation e;
    e.report = scatter_report(model, patients, config.time_tolerance);
    e.panels = trajectory_fit_export(model, patients, select_patients(patients, config.trajectory_patients, model.run_seed));
    return e;
}

void write_evaluation(const Evaluation& eval, const ModelState& model, const fs::path& dir) {
    fs::create_directories(dir);
    write_metrics_csv(eval.report.metrics, dir / files::kMetrics);
    json summary = eval.report.summary.to_json();
    summary["epoch"] = model.epoch;
    summary["run_seed"] = model.run_seed;
    summary["config"] = model.config.to_json();
    write_text_atomic(dir / files::kSummary, summary.dump(2) + "\n");
    for (std::size_t d = 0; d < model.dims.latent_dim; ++d) {
        const std::string name = "scatter_dim" + std::to_string(d + 1) + ".svg";
        write_text_atomic(dir / name, scatter_svg(eval.report.metrics, d,
                                                  "latent dimension " + std::to_string(d + 1) + ", epoch " +
                                                      std::to_string(model.epoch)));
    }
    write_trajectory_csv(eval.panels, dir / files::kTrajectories);
    write_text_atomic(dir / files::kTrajectoryFigure,
                      trajectory_svg(eval.panels, "fitted trajectories, epoch " + std::to_string(model.epoch)));
}

TrainArtifacts train_model(const Cohort& processed, ModelState initial, const std::optional<fs::path>& out_dir,
                           std::ostream* progress, const EvaluateConfig& eval) {
    const std::vector<PatientData> patients = prepare_patients(processed, initial.baseline_stats);
    if (out_dir) fs::create_directories(*out_dir);
    const std::vector<std::size_t> snaps = initial.config.snapshot_epochs;

    std::vector<EpochSnapshot> snapshots;
    auto on_epoch = [&](const ModelState& state, const EpochRecord& rec) {
        if (progress) {
            *progress << "epoch " << rec.epoch << " mean_loss " << format_double(rec.mean_loss) << "\n";
            progress->flush();
        }
        if (std::find(snaps.begin(), snaps.end(), rec.epoch) == snaps.end()) return;
        snapshots.push_back({rec.epoch, scatter_report(state, patients, eval.time_tolerance).summary});
        if (out_dir) save_checkpoint(state, *out_dir / snapshot_checkpoint_name(rec.epoch));
    };

    TrainArtifacts art;
    const std::size_t first_epoch = initial.epoch;
    art.result = train(std::move(initial), patients, on_epoch);
    art.snapshots = std::move(snapshots);

    if (out_dir) {
        save_checkpoint(art.result.state, *out_dir / files::kModel);
        std::string hist = "epoch,mean_loss\n";
        for (const auto& h : art.result.history) hist += std::to_string(h.epoch) + "," + format_double(h.mean_loss) + "\n";
        write_text_atomic(*out_dir / files::kHistory, hist);
        json snap = json::array();
        for (const auto& s : art.snapshots) snap.push_back({{"epoch", s.epoch}, {"summary", s.summary.to_json()}});
        write_text_atomic(*out_dir / files::kSnapshots,
                          json{{"resumed_from_epoch", first_epoch}, {"snapshots", snap}}.dump(2) + "\n");
    }
    return art;
}

std::vector<AblationRow> run_ablation(const Cohort& processed, const TrainConfig& base, const EvaluateConfig& eval,
                                      const std::optional<fs::path>& out_dir, std::ostream* progress) {
    std::vector<AblationRow> rows;
    for (const auto& arm : ablation_arms()) {
        TrainConfig cfg = base;
        cfg.weights = arm.weights;
        cfg.snapshot_epochs.clear();
        if (progress) *progress << "arm " << arm.name << "\n";
        std::optional<fs::path> arm_dir;
        if (out_dir) arm_dir = *out_dir / arm.name;
        TrainArtifacts art = train_model(processed, init_model(processed, cfg), arm_dir, progress, eval);
        Evaluation ev = evaluate_model(art.result.state, processed, eval);
        if (arm_dir) write_evaluation(ev, art.result.state, *arm_dir);
        rows.push_back({arm.name, arm.weights, cfg.seed, ev.report.summary});
    }
    return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
    std::string out = "arm,alpha,beta,gamma,seed,included,mean_delta_rs,mean_delta_ode,median_delta_rs";
    const std::size_t d = rows.empty() ? 0 : rows.front().summary.above_fraction.size();
    for (std::size_t k = 1; k <= d; ++k) out += ",above_fraction_dim" + std::to_string(k);
    out += "\n";
    for (const auto& r : rows) {
        out += r.arm + "," + format_double(r.weights.alpha) + "," + format_double(r.weights.beta) + "," +
               format_double(r.weights.gamma) + "," + std::to_string(r.seed) + "," + std::to_string(r.summary.included) +
               "," + format_double(r.summary.pooled_mean_delta_rs) + "," + format_double(r.summary.pooled_mean_delta_ode) +
               "," + format_double(r.summary.pooled_median_delta_rs);
        for (double f : r.summary.above_fraction) out += "," + format_double(f);
        out += "\n";
    }
    return out;
}

std::string file_digest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 unavailable");
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::string hex;
    char byte[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(byte, sizeof(byte), "%02x", md[i]);
        hex += byte;
    }
    return hex;
}

void RunManifest::add_input(const fs::path& path) { inputs.emplace_back(path.string(), file_digest(path)); }

void RunManifest::add_input_dir(const fs::path& dir) {
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().filename() != files::kManifest) found.push_back(entry.path());
    std::sort(found.begin(), found.end());
    for (const auto& p : found) add_input(p);
}

json RunManifest::to_json() const {
    json in = json::array();
    for (const auto& [p, d] : inputs) in.push_back({{"path", p}, {"sha256", d}});
    return {{"command", command},
            {"config", config},
            {"seed", seed},
            {"inputs", in},
            {"outputs", outputs},
            {"wall_clock_seconds", wall_clock_seconds},
            {"versions",
             {{"latalign", kVersion},
              {"checkpoint_format", kCheckpointFormatVersion},
              {"nlohmann_json",
               std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                   std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
}

void RunManifest::write(const fs::path& dir) const {
    fs::create_directories(dir);
    write_text_atomic(dir / files::kManifest, to_json().dump(2) + "\n");
}

}  // namespace latalign
