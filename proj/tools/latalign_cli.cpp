// latalign: generate, modify, preprocess, train, evaluate, ablate and plot.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "latalign/pipeline.hpp"
#include "latalign/svg.hpp"

namespace fs = std::filesystem;
using namespace latalign;
using nlohmann::json;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::string> preset;
    std::string checkpoint;
    std::string data;
    std::string kind;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> patients;
    std::string ids;
    std::string metrics;
};

RunConfig resolve(const Options& o) {
    if (o.config.empty()) return RunConfig::from_json(json::object(), o.preset);
    return load_run_config(o.config, o.preset);
}

Cohort load_data(const Options& o) {
    if (o.data.empty()) throw ConfigError("--data is required");
    return load_cohort(o.data);
}

// Train and evaluate accept raw cohorts and preprocess them on the fly.
Cohort ensure_preprocessed(const Cohort& c) {
    if (c.transformed) return c;
    std::cerr << "note: input cohort is not preprocessed; preprocessing in memory\n";
    return preprocess(c);
}

class Run {
public:
    Run(std::string command, const Options& o) : o_(o), start_(std::chrono::steady_clock::now()) {
        if (o.out.empty()) throw ConfigError("--out is required");
        manifest_.command = std::move(command);
        fs::create_directories(o.out);
    }

    RunManifest& manifest() { return manifest_; }
    fs::path out() const { return o_.out; }

    void finish() {
        manifest_.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::vector<fs::path> produced;
        for (const auto& entry : fs::recursive_directory_iterator(o_.out))
            if (entry.is_regular_file() && entry.path().filename() != files::kManifest)
                produced.push_back(fs::relative(entry.path(), o_.out));
        std::sort(produced.begin(), produced.end());
        for (const auto& p : produced) manifest_.outputs.push_back(p.generic_string());
        manifest_.write(o_.out);
    }

private:
    const Options& o_;
    RunManifest manifest_;
    std::chrono::steady_clock::time_point start_;
};

void cmd_generate(const Options& o) {
    Run run("generate", o);
    RunConfig cfg = resolve(o);
    if (o.seed) cfg.generator.seed = *o.seed;
    if (o.patients) cfg.generator.n_patients = *o.patients;
    const SyntheticCohort syn = generate_synthetic(cfg.generator);
    write_cohort(syn.cohort, run.out());
    write_text_atomic(run.out() / files::kGroundTruth, syn.truth.to_json().dump(2) + "\n");
    if (!o.config.empty()) run.manifest().add_input(o.config);
    run.manifest().config = {{"generator", cfg.generator.to_json()}};
    run.manifest().seed = cfg.generator.seed;
    run.finish();
    std::cout << "generated " << syn.cohort.patients.size() << " patients in " << o.out << "\n";
}

void cmd_scenario(const Options& o) {
    const Cohort in = load_data(o);
    Run run("scenario", o);
    RunConfig cfg = resolve(o);
    if (!o.kind.empty()) cfg.scenario.kind = parse_scenario_kind(o.kind);
    if (o.seed) cfg.scenario.seed = *o.seed;
    ScenarioLog log;
    const Cohort out = apply_scenario(in, cfg.scenario, &log);
    write_cohort(out, run.out());
    write_text_atomic(run.out() / files::kScenarioLog, log.to_json().dump(2) + "\n");
    run.manifest().add_input_dir(o.data);
    run.manifest().config = {{"scenario", scenario_to_json(cfg.scenario)}};
    run.manifest().seed = cfg.scenario.seed;
    run.finish();
    std::cout << "scenario " << to_string(cfg.scenario.kind) << ": removed " << log.deleted.size()
              << " S visits, shifted " << log.shifted_patients.size() << " patients\n";
}

void cmd_preprocess(const Options& o) {
    const Cohort in = load_data(o);
    Run run("preprocess", o);
    PreprocessLog log;
    const Cohort out = preprocess(in, &log);
    write_cohort(out, run.out());
    write_text_atomic(run.out() / files::kPreprocessLog, preprocess_log_json(log).dump(2) + "\n");
    run.manifest().add_input_dir(o.data);
    run.manifest().config = json::object();
    run.finish();
    std::cout << "kept " << out.patients.size() << " of " << in.patients.size() << " patients\n";
}

void cmd_train(const Options& o) {
    const Cohort data = ensure_preprocessed(load_data(o));
    Run run("train", o);
    RunConfig cfg = resolve(o);
    if (o.seed) cfg.train.seed = *o.seed;
    if (o.epochs) cfg.train.epochs = *o.epochs;
    cfg.train.validate();

    ModelState state;
    if (!o.checkpoint.empty()) {
        state = load_checkpoint(o.checkpoint);
        state.config.epochs = cfg.train.epochs;
        run.manifest().add_input(o.checkpoint);
        std::cout << "resuming from epoch " << state.epoch << "\n";
    } else {
        state = init_model(data, cfg.train);
    }
    const TrainArtifacts art = train_model(data, std::move(state), run.out(), &std::cout, cfg.evaluate);
    run.manifest().add_input_dir(o.data);
    if (!o.config.empty()) run.manifest().add_input(o.config);
    run.manifest().config = cfg.to_json();
    run.manifest().config["train"] = art.result.state.config.to_json();
    run.manifest().seed = art.result.state.run_seed;
    run.finish();
}

void cmd_evaluate(const Options& o) {
    if (o.checkpoint.empty()) throw ConfigError("--checkpoint is required");
    const ModelState model = load_checkpoint(o.checkpoint);
    const Cohort data = ensure_preprocessed(load_data(o));
    Run run("evaluate", o);
    RunConfig cfg = resolve(o);
    const Evaluation ev = evaluate_model(model, data, cfg.evaluate);
    write_evaluation(ev, model, run.out());
    run.manifest().add_input(o.checkpoint);
    run.manifest().add_input_dir(o.data);
    run.manifest().config = {{"evaluate", cfg.to_json()["evaluate"]}, {"model", model.config.to_json()}};
    run.manifest().seed = model.run_seed;
    run.finish();
    const auto& s = ev.report.summary;
    std::cout << "included " << s.included << " excluded " << s.excluded.size() << " above_diagonal";
    for (double f : s.above_fraction) std::cout << " " << format_double(f);
    std::cout << " median_delta_rs " << format_double(s.pooled_median_delta_rs) << "\n";
}

void cmd_ablation(const Options& o) {
    const Cohort data = ensure_preprocessed(load_data(o));
    Run run("ablation", o);
    RunConfig cfg = resolve(o);
    if (o.seed) cfg.train.seed = *o.seed;
    if (o.epochs) cfg.train.epochs = *o.epochs;
    const auto rows = run_ablation(data, cfg.train, cfg.evaluate, run.out(), &std::cout);
    write_text_atomic(run.out() / files::kAblation, ablation_csv(rows));
    run.manifest().add_input_dir(o.data);
    run.manifest().config = cfg.to_json();
    json arms = json::array();
    for (const auto& r : rows)
        arms.push_back({{"arm", r.arm}, {"alpha", r.weights.alpha}, {"beta", r.weights.beta},
                        {"gamma", r.weights.gamma}, {"seed", r.seed}});
    run.manifest().config["arms"] = arms;
    run.manifest().seed = cfg.train.seed;
    run.finish();
    std::cout << ablation_csv(rows);
}

void cmd_plot(const Options& o) {
    Run run("plot", o);
    if (!o.metrics.empty()) {
        const auto metrics = read_metrics_csv(o.metrics);
        const std::size_t d = metrics.empty() ? 0 : metrics.front().delta_rs.size();
        for (std::size_t k = 0; k < d; ++k)
            write_text_atomic(run.out() / ("scatter_dim" + std::to_string(k + 1) + ".svg"),
                              scatter_svg(metrics, k, "latent dimension " + std::to_string(k + 1)));
        run.manifest().add_input(o.metrics);
    }
    if (!o.checkpoint.empty()) {
        const ModelState model = load_checkpoint(o.checkpoint);
        const Cohort data = ensure_preprocessed(load_data(o));
        const auto patients = prepare_patients(data, model.baseline_stats);
        RunConfig cfg = resolve(o);
        std::vector<std::string> ids;
        std::stringstream ss(o.ids);
        for (std::string id; std::getline(ss, id, ',');)
            if (!id.empty()) ids.push_back(id);
        if (ids.empty()) ids = select_patients(patients, cfg.evaluate.trajectory_patients, o.seed.value_or(model.run_seed));
        const auto exports = trajectory_fit_export(model, patients, ids);
        write_trajectory_csv(exports, run.out() / files::kTrajectories);
        write_text_atomic(run.out() / files::kTrajectoryFigure,
                          trajectory_svg(exports, "fitted trajectories, epoch " + std::to_string(model.epoch)));
        run.manifest().add_input(o.checkpoint);
        run.manifest().add_input_dir(o.data);
    }
    if (o.metrics.empty() && o.checkpoint.empty()) throw ConfigError("plot needs --metrics or --checkpoint with --data");
    run.manifest().config = json::object();
    run.finish();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Latent-space alignment of two longitudinal measurement instruments"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool with_data) {
        sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Seed override for this command");
        sub->add_option("--out", o.out, "Output directory")->required();
        if (with_data) sub->add_option("--data", o.data, "Input cohort directory")->check(CLI::ExistingDirectory);
    };

    auto* gen = app.add_subcommand("generate", "Write a seeded synthetic cohort");
    common(gen, false);
    gen->add_option("--patients", o.patients, "Number of patients");

    auto* scen = app.add_subcommand("scenario", "Apply a discrepancy scenario to the second instrument");
    common(scen, true);
    scen->add_option("--kind", o.kind,
                     "none | shift_all | shift_subgroup | dropout_uniform | dropout_late | score_conditional");

    auto* pre = app.add_subcommand("preprocess", "Outlier removal, filters and logit transform");
    common(pre, true);

    auto* tr = app.add_subcommand("train", "Train a model");
    common(tr, true);
    tr->add_option("--preset", o.preset, "synthetic | two-instrument");
    tr->add_option("--checkpoint", o.checkpoint, "Resume from this checkpoint")->check(CLI::ExistingFile);
    tr->add_option("--epochs", o.epochs, "Epochs to run");

    auto* ev = app.add_subcommand("evaluate", "Misalignment metrics and figures for a checkpoint");
    common(ev, true);
    ev->add_option("--checkpoint", o.checkpoint, "Model checkpoint")->required();

    auto* ab = app.add_subcommand("ablation", "Train the four penalty variants");
    common(ab, true);
    ab->add_option("--preset", o.preset, "synthetic | two-instrument");
    ab->add_option("--epochs", o.epochs, "Epochs per arm");

    auto* pl = app.add_subcommand("plot", "Render scatter or trajectory figures");
    common(pl, true);
    pl->add_option("--checkpoint", o.checkpoint, "Model checkpoint for trajectory panels");
    pl->add_option("--patients", o.ids, "Comma-separated patient ids");
    pl->add_option("--metrics", o.metrics, "metrics.csv to draw as scatter")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
    }

    try {
        if (gen->parsed()) cmd_generate(o);
        else if (scen->parsed()) cmd_scenario(o);
        else if (pre->parsed()) cmd_preprocess(o);
        else if (tr->parsed()) cmd_train(o);
        else if (ev->parsed()) cmd_evaluate(o);
        else if (ab->parsed()) cmd_ablation(o);
        else if (pl->parsed()) cmd_plot(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::kData);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::kInternal);
    }
    return 0;
}
