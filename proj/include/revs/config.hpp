#pragma once

#include <string>

#include "revs/attacks.hpp"
#include "revs/dataset.hpp"
#include "revs/engine.hpp"
#include "revs/metrics.hpp"
#include "revs/model.hpp"
#include "revs/trainer.hpp"

namespace revs {

/// Everything that determines an experiment. model.vocab_size = 0 means
/// "take it from the generated dataset".
struct ExperimentConfig {
    DatasetConfig dataset;
    std::uint64_t dataset_seed = 0;
    std::uint64_t model_seed = 0;
    ModelConfig model;
    TrainerConfig trainer;
    RevsConfig revs;
    MetricConfig metrics;
    PerturbationSpec perturbation;
    std::size_t forget_count = 10;  // per split; the rest of the forget pool is held out
    std::string run_dir = "runs/default";

    ExperimentConfig();
    /// Checks what can be checked before the vocabulary size is known.
    void validate() const;
};

/// Canonical JSON with every field spelled out (sorted keys, 2-space indent).
std::string experiment_config_to_json(const ExperimentConfig& config);

/// Strict parse: unknown keys and wrong types are config errors; missing
/// keys keep their defaults.
ExperimentConfig experiment_config_from_json(const std::string& text);

/// SHA-256 of the canonical config with paths removed, so relocating a run
/// keeps its digest.
std::string config_digest(const ExperimentConfig& config);

// Sub-config codecs, shared by the C API.
std::string dataset_config_to_json(const DatasetConfig& c);
DatasetConfig dataset_config_from_json(const std::string& text);
std::string trainer_config_to_json(const TrainerConfig& c);
TrainerConfig trainer_config_from_json(const std::string& text);
std::string revs_config_to_json(const RevsConfig& c);
RevsConfig revs_config_from_json(const std::string& text);
std::string perturbation_spec_to_json(const PerturbationSpec& c);
PerturbationSpec perturbation_spec_from_json(const std::string& text);

}  // namespace revs
