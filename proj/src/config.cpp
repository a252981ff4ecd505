#include "latalign/config.hpp"

#include <cmath>
#include <fstream>

#include "latalign/config_reader.hpp"

namespace latalign {

using nlohmann::json;

void EvaluateConfig::validate() const {
    if (!(time_tolerance >= 0.0) || !std::isfinite(time_tolerance))
        throw ConfigError("evaluate.time_tolerance must be finite and >= 0");
}

json scenario_to_json(const ScenarioSpec& spec) {
    return {{"kind", to_string(spec.kind)},
            {"shift_offset", spec.shift_offset},
            {"subgroup_probability", spec.subgroup_probability},
            {"dropout_probability", spec.dropout_probability},
            {"sum_score_quantile", spec.sum_score_quantile},
            {"seed", spec.seed}};
}

ScenarioSpec scenario_from_json(const json& j, ScenarioSpec base) {
    ConfigReader r(j, "scenario");
    ScenarioSpec s = base;
    std::string kind;
    if (r.read("kind", kind)) s.kind = parse_scenario_kind(kind);
    r.read("shift_offset", s.shift_offset);
    r.read("subgroup_probability", s.subgroup_probability);
    r.read("dropout_probability", s.dropout_probability);
    r.read("sum_score_quantile", s.sum_score_quantile);
    r.read("seed", s.seed);
    r.finish();
    s.validate();
    return s;
}

json RunConfig::to_json() const {
    return {{"preset", preset},
            {"generator", generator.to_json()},
            {"scenario", scenario_to_json(scenario)},
            {"train", train.to_json()},
            {"evaluate", {{"time_tolerance", evaluate.time_tolerance},
                          {"trajectory_patients", evaluate.trajectory_patients}}}};
}

RunConfig RunConfig::from_json(const json& j, const std::optional<std::string>& preset_override) {
    ConfigReader r(j, "config");
    RunConfig c;
    r.read("preset", c.preset);
    if (preset_override) c.preset = *preset_override;
    c.train = train_preset(c.preset);
    if (const json* g = r.child("generator")) c.generator = GeneratorConfig::from_json(*g);
    c.generator.validate();
    if (const json* s = r.child("scenario")) c.scenario = scenario_from_json(*s);
    if (const json* t = r.child("train")) c.train = TrainConfig::from_json(*t, c.train);
    c.train.validate();
    if (const json* e = r.child("evaluate")) {
        ConfigReader er(*e, "evaluate");
        er.read("time_tolerance", c.evaluate.time_tolerance);
        er.read("trajectory_patients", c.evaluate.trajectory_patients);
        er.finish();
    }
    c.evaluate.validate();
    r.finish();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const std::optional<std::string>& preset_override) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return RunConfig::from_json(j, preset_override);
}

}  // namespace latalign
