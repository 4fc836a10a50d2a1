#pragma once

#include <map>
#include <string>
#include <vector>

#include "revs/config.hpp"

namespace revs {

const char* tool_version();

enum class Stage { gen_data, train, check_mem, unlearn, evaluate, attack, report };

const char* to_string(Stage stage);
Stage parse_stage(std::string_view name);

struct StageRecord {
    std::string started_at;   // UTC, ISO 8601
    std::string finished_at;
    std::vector<std::string> inputs;   // run-relative paths
    std::vector<std::string> outputs;
};

/// run_dir/manifest.json. `artifacts` maps every file any stage produced
/// to its SHA-256.
struct RunManifest {
    std::string config_digest;
    std::string tool_version;
    std::map<std::string, StageRecord> stages;
    std::map<std::string, std::string> artifacts;
};

std::string run_manifest_to_json(const RunManifest& manifest);
RunManifest run_manifest_from_json(const std::string& text);

/// Forget/retain assignment for one split seed. The dataset's forget pool is
/// shuffled; the first forget_count targets are unlearned and the rest are
/// held out for specificity. `retain_pool` is the dataset's retain split.
struct SplitAssignment {
    std::uint64_t seed = 0;
    std::vector<const TargetSpec*> forget;
    std::vector<const TargetSpec*> retain;
    std::vector<const TargetSpec*> retain_pool;
};

SplitAssignment assign_split(const SyntheticDataset& dataset, std::uint64_t seed, std::size_t forget_count);

/// The model config with vocab_size filled in from the dataset.
ModelConfig resolve_model_config(const ExperimentConfig& config, const SyntheticDataset& dataset);

/// Edits every forget target in order; U† is computed once since REVS never
/// touches the unembedding.
std::vector<EditRecord> unlearn_targets(ModelState& state, std::span<const TargetSpec* const> forget,
                                        const RevsConfig& config);

struct StageOptions {
    /// check-mem only: checkpoint directory to inspect instead of the
    /// run's trained checkpoint.
    std::string checkpoint;
};

/// Runs one stage inside config.run_dir, validating inputs against the run
/// manifest first and recording outputs afterwards.
void run_stage(Stage stage, const ExperimentConfig& config, const StageOptions& options = {});

/// Paths inside a run directory.
namespace run_paths {
inline constexpr const char* manifest = "manifest.json";
inline constexpr const char* config = "config.json";
inline constexpr const char* dataset = "dataset.json";
inline constexpr const char* checkpoint = "checkpoint";
inline constexpr const char* training_log = "training_log.json";
inline constexpr const char* memorization = "memorization.json";
inline constexpr const char* report_json = "report.json";
inline constexpr const char* report_csv = "report.csv";
std::string split_dir(std::uint64_t seed);  // splits/<seed>
}  // namespace run_paths

}  // namespace revs
