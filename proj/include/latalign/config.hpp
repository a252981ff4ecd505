#pragma once

// Run configuration file: one JSON object with optional sections
//
//   {
//     "preset": "synthetic",
//     "generator": {...},
//     "scenario": {"kind": "shift_all", ...},
//     "train": {...},        // overrides on top of the preset
//     "evaluate": {...}
//   }
//
// Every key is optional; unknown keys are rejected.

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "latalign/alignment_model.hpp"
#include "latalign/registry_data.hpp"
#include "latalign/synthetic.hpp"

namespace latalign {

struct EvaluateConfig {
    double time_tolerance = 1e-9;        // months
    std::size_t trajectory_patients = 12;  // panels drawn by evaluate and ablation

    void validate() const;
};

nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& j, ScenarioSpec base = {});

struct RunConfig {
    std::string preset = "synthetic";
    GeneratorConfig generator;
    ScenarioSpec scenario;
    TrainConfig train = train_preset("synthetic");
    EvaluateConfig evaluate;

    nlohmann::json to_json() const;
    /// Resolve `j` against defaults; `preset_override` replaces the file's preset.
    static RunConfig from_json(const nlohmann::json& j, const std::optional<std::string>& preset_override = {});
};

/// Read and resolve a config file. Throws ConfigError on malformed JSON.
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::optional<std::string>& preset_override = {});

}  // namespace latalign
