#include "revs/revs.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <nlohmann/json.hpp>
#include "revs/checkpoint.hpp"
#include "revs/config.hpp"
#include "revs/pipeline.hpp"

struct revs_dataset {
    revs::SyntheticDataset value;
};

struct revs_model {
    revs::ModelState value;
};

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

// Diagnostics go to stderr so callers can keep stdout for JSON.
const bool g_stderr_logging = [] {
    spdlog::set_default_logger(spdlog::stderr_logger_mt("revs"));
    return true;
}();

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

template <typename T>
void need(const T* p, const char* name) {
    if (!p) throw InvalidArgument(std::string(name) + " must not be null");
}

revs_status status_of(revs::ErrorKind kind) {
    using revs::ErrorKind;
    switch (kind) {
        case ErrorKind::config: return REVS_ERR_CONFIG;
        case ErrorKind::data: return REVS_ERR_DATA;
        case ErrorKind::numeric: return REVS_ERR_NUMERIC;
        case ErrorKind::contract: return REVS_ERR_CONTRACT;
        case ErrorKind::io: return REVS_ERR_IO;
        case ErrorKind::missing_artifact: return REVS_ERR_MISSING_ARTIFACT;
        case ErrorKind::digest_mismatch: return REVS_ERR_DIGEST_MISMATCH;
        case ErrorKind::corrupt_checkpoint: return REVS_ERR_CORRUPT_CHECKPOINT;
        case ErrorKind::memorization: return REVS_ERR_MEMORIZATION;
        case ErrorKind::domain: return REVS_ERR_DOMAIN;
        case ErrorKind::selection: return REVS_ERR_SELECTION;
    }
    return REVS_ERR_UNEXPECTED;
}

/// Runs `body`; no exception crosses the C boundary.
template <typename F>
revs_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return REVS_OK;
    } catch (const InvalidArgument& e) {
        g_last_error = e.what();
        return REVS_ERR_INVALID_ARGUMENT;
    } catch (const revs::MemorizationError& e) {
        std::string msg = e.what();
        if (!e.unmemorized_targets().empty()) {
            msg += " (unmemorized:";
            for (const auto& id : e.unmemorized_targets()) msg += " " + id;
            msg += ")";
        }
        g_last_error = msg;
        return REVS_ERR_MEMORIZATION;
    } catch (const revs::Error& e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return REVS_ERR_UNEXPECTED;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return REVS_ERR_UNEXPECTED;
    } catch (...) {
        g_last_error = "unknown exception";
        return REVS_ERR_UNEXPECTED;
    }
}

char* copy_out(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::vector<const revs::TargetSpec*> lookup(const revs::SyntheticDataset& ds, const char* ids_json) {
    json j;
    try {
        j = json::parse(ids_json);
    } catch (const json::exception& e) {
        revs::fail(revs::ErrorKind::config, std::string("target id list: ") + e.what());
    }
    revs::require(j.is_array(), revs::ErrorKind::config, "target id list must be a JSON array");
    std::vector<const revs::TargetSpec*> out;
    for (const auto& id : j) {
        revs::require(id.is_string(), revs::ErrorKind::config, "target ids must be strings");
        const revs::TargetSpec* found = nullptr;
        for (const auto& t : ds.targets)
            if (t.target_id == id.get<std::string>()) found = &t;
        revs::require(found != nullptr, revs::ErrorKind::data, "unknown target id '" + id.get<std::string>() + "'");
        out.push_back(found);
    }
    return out;
}

json attacks_to_json(const std::vector<revs::AttackSummary>& attacks) {
    json per = json::object();
    for (const auto& a : attacks) {
        json targets = json::array();
        for (const auto& t : a.targets)
            targets.push_back({{"target_id", t.target_id},
                               {"resistance", t.resistance},
                               {"skipped", t.skipped},
                               {"effective_ranks", t.effective_ranks}});
        per[a.attack] = {{"resistance", a.resistance}, {"targets", targets}};
    }
    return json{{"attacks", per}, {"resistance_score", revs::resistance_score(attacks)}};
}

}  // namespace

extern "C" {

const char* revs_last_error(void) { return g_last_error.c_str(); }

const char* revs_status_name(revs_status status) {
    switch (status) {
        case REVS_OK: return "ok";
        case REVS_ERR_UNEXPECTED: return "unexpected";
        case REVS_ERR_CONFIG: return "config";
        case REVS_ERR_DATA: return "data";
        case REVS_ERR_NUMERIC: return "numeric";
        case REVS_ERR_CONTRACT: return "contract";
        case REVS_ERR_IO: return "io";
        case REVS_ERR_MISSING_ARTIFACT: return "missing_artifact";
        case REVS_ERR_DIGEST_MISMATCH: return "digest_mismatch";
        case REVS_ERR_CORRUPT_CHECKPOINT: return "corrupt_checkpoint";
        case REVS_ERR_MEMORIZATION: return "memorization";
        case REVS_ERR_DOMAIN: return "domain";
        case REVS_ERR_SELECTION: return "selection";
        case REVS_ERR_INVALID_ARGUMENT: return "invalid_argument";
    }
    return "unknown";
}

const char* revs_version(void) { return revs::tool_version(); }

void revs_string_free(char* s) { std::free(s); }

revs_status revs_set_log_level(const char* level) {
    return guarded([&] {
        need(level, "level");
        const auto parsed = spdlog::level::from_str(level);
        if (parsed == spdlog::level::off && std::string(level) != "off")
            throw InvalidArgument(std::string("unknown log level '") + level + "'");
        spdlog::set_level(parsed);
    });
}

revs_status revs_config_default(char** out_json) {
    return guarded([&] {
        need(out_json, "out_json");
        *out_json = copy_out(revs::experiment_config_to_json(revs::ExperimentConfig{}));
    });
}

revs_status revs_config_normalize(const char* config_json, char** out_json) {
    return guarded([&] {
        need(config_json, "config_json");
        need(out_json, "out_json");
        *out_json = copy_out(revs::experiment_config_to_json(revs::experiment_config_from_json(config_json)));
    });
}

revs_status revs_config_digest(const char* config_json, char** out_hex) {
    return guarded([&] {
        need(config_json, "config_json");
        need(out_hex, "out_hex");
        *out_hex = copy_out(revs::config_digest(revs::experiment_config_from_json(config_json)));
    });
}

revs_status revs_run_stage(const char* stage, const char* config_json, const char* checkpoint_dir) {
    return guarded([&] {
        need(stage, "stage");
        need(config_json, "config_json");
        revs::StageOptions options;
        if (checkpoint_dir) options.checkpoint = checkpoint_dir;
        revs::run_stage(revs::parse_stage(stage), revs::experiment_config_from_json(config_json), options);
    });
}

revs_status revs_dataset_generate(const char* dataset_config_json, uint64_t seed, revs_dataset** out) {
    return guarded([&] {
        need(out, "out");
        const revs::DatasetConfig cfg =
            dataset_config_json ? revs::dataset_config_from_json(dataset_config_json) : revs::DatasetConfig{};
        *out = new revs_dataset{revs::generate_ssn_dataset(cfg, seed)};
    });
}

revs_status revs_dataset_load(const char* path, revs_dataset** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new revs_dataset{revs::load_dataset(path)};
    });
}

revs_status revs_dataset_save(const revs_dataset* dataset, const char* path) {
    return guarded([&] {
        need(dataset, "dataset");
        need(path, "path");
        revs::save_dataset(dataset->value, path);
    });
}

size_t revs_dataset_vocab_size(const revs_dataset* dataset) {
    return dataset ? dataset->value.vocabulary.size() : 0;
}

size_t revs_dataset_target_count(const revs_dataset* dataset) { return dataset ? dataset->value.targets.size() : 0; }

revs_status revs_dataset_target(const revs_dataset* dataset, size_t index, char** out_json) {
    return guarded([&] {
        need(dataset, "dataset");
        need(out_json, "out_json");
        const auto& targets = dataset->value.targets;
        if (index >= targets.size()) throw InvalidArgument("target index out of range");
        const revs::TargetSpec& t = targets[index];
        json u = json::array();
        for (const auto& tok : t.unlearn_tokens) u.push_back({{"id", tok.id}, {"pos", tok.pos}});
        *out_json = copy_out(json{{"target_id", t.target_id},
                                  {"split", revs::to_string(t.split)},
                                  {"prompt", t.prompt},
                                  {"secret", t.secret},
                                  {"unlearn_tokens", u},
                                  {"generalization_prompts", t.generalization_prompts}}
                                 .dump());
    });
}

revs_status revs_dataset_encode(const revs_dataset* dataset, const char* text, int32_t* tokens, size_t capacity,
                                size_t* out_len) {
    return guarded([&] {
        need(dataset, "dataset");
        need(text, "text");
        need(out_len, "out_len");
        const auto ids = dataset->value.vocabulary.encode(text);
        *out_len = ids.size();
        if (ids.size() > capacity) throw InvalidArgument("token buffer too small");
        need(tokens, "tokens");
        std::copy(ids.begin(), ids.end(), tokens);
    });
}

void revs_dataset_free(revs_dataset* dataset) { delete dataset; }

revs_status revs_model_init(const char* model_config_json, const revs_dataset* dataset, uint64_t seed,
                            double init_std, revs_model** out) {
    return guarded([&] {
        need(out, "out");
        revs::ModelConfig cfg = model_config_json ? revs::model_config_from_json(model_config_json)
                                                  : revs::ExperimentConfig{}.model;
        if (cfg.vocab_size == 0) {
            need(dataset, "dataset");
            cfg.vocab_size = dataset->value.vocabulary.size();
        }
        *out = new revs_model{revs::ModelState::initialize(cfg, seed, init_std)};
    });
}

revs_status revs_model_load(const char* checkpoint_dir, revs_model** out) {
    return guarded([&] {
        need(checkpoint_dir, "checkpoint_dir");
        need(out, "out");
        *out = new revs_model{revs::load_checkpoint(checkpoint_dir)};
    });
}

revs_status revs_model_save(const revs_model* model, const char* checkpoint_dir) {
    return guarded([&] {
        need(model, "model");
        need(checkpoint_dir, "checkpoint_dir");
        revs::save_checkpoint(model->value, checkpoint_dir);
    });
}

revs_status revs_model_clone(const revs_model* model, revs_model** out) {
    return guarded([&] {
        need(model, "model");
        need(out, "out");
        *out = new revs_model{model->value};
    });
}

revs_status revs_model_config(const revs_model* model, char** out_json) {
    return guarded([&] {
        need(model, "model");
        need(out_json, "out_json");
        *out_json = copy_out(revs::model_config_to_json(model->value.config));
    });
}

void revs_model_free(revs_model* model) { delete model; }

revs_status revs_model_train(revs_model* model, const revs_dataset* dataset, const char* trainer_config_json,
                             char** out_log_json) {
    return guarded([&] {
        need(model, "model");
        need(dataset, "dataset");
        const revs::TrainerConfig cfg =
            trainer_config_json ? revs::trainer_config_from_json(trainer_config_json) : revs::ExperimentConfig{}.trainer;
        const revs::TrainingLog log = revs::train_to_memorize(model->value, dataset->value, cfg);
        if (out_log_json) {
            json epochs = json::array();
            for (const auto& e : log.epochs) {
                json row{{"epoch", e.epoch}, {"loss", e.loss}};
                if (e.memorization >= 0) row["memorization"] = e.memorization;
                epochs.push_back(row);
            }
            *out_log_json = copy_out(json{{"epochs", epochs}, {"memorized", log.memorized}, {"steps", log.steps}}.dump());
        }
    });
}

revs_status revs_model_check_memorization(const revs_model* model, const revs_dataset* dataset,
                                          double* out_fraction) {
    return guarded([&] {
        need(model, "model");
        need(dataset, "dataset");
        need(out_fraction, "out_fraction");
        *out_fraction = revs::check_memorization(model->value, dataset->value).fraction();
    });
}

revs_status revs_model_logits(const revs_model* model, const int32_t* prompt, size_t prompt_len, double* logits,
                              size_t capacity) {
    return guarded([&] {
        need(model, "model");
        need(prompt, "prompt");
        need(logits, "logits");
        if (capacity < model->value.config.vocab_size) throw InvalidArgument("logit buffer too small");
        const std::span<const revs::TokenId> p(prompt, prompt_len);
        revs::validate_prompt(model->value.config, p);
        const revs::ForwardTrace trace = revs::forward(model->value, p);
        std::copy(trace.logits.begin(), trace.logits.end(), logits);
    });
}

revs_status revs_model_generate(const revs_model* model, const int32_t* prompt, size_t prompt_len, size_t max_new,
                                int32_t* out_tokens) {
    return guarded([&] {
        need(model, "model");
        need(prompt, "prompt");
        need(out_tokens, "out_tokens");
        const auto gen = revs::greedy_generate(model->value, std::span<const revs::TokenId>(prompt, prompt_len), max_new);
        std::copy(gen.begin(), gen.end(), out_tokens);
    });
}

revs_status revs_model_unlearn(revs_model* model, const revs_dataset* dataset, const char* target_id,
                               const char* revs_config_json, char** out_records_json) {
    return guarded([&] {
        need(model, "model");
        need(dataset, "dataset");
        need(target_id, "target_id");
        const revs::RevsConfig cfg =
            revs_config_json ? revs::revs_config_from_json(revs_config_json) : revs::ExperimentConfig{}.revs;
        const auto targets = lookup(dataset->value, json::array({target_id}).dump().c_str());
        const auto records = revs::unlearn_target(model->value, *targets.front(), cfg);
        if (out_records_json) *out_records_json = copy_out(revs::edit_records_to_json(records));
    });
}

revs_status revs_model_evaluate(const revs_model* model, const revs_dataset* dataset, const char* forget_ids_json,
                                const char* retain_ids_json, size_t k, char** out_report_json) {
    return guarded([&] {
        need(model, "model");
        need(dataset, "dataset");
        need(forget_ids_json, "forget_ids_json");
        need(retain_ids_json, "retain_ids_json");
        need(out_report_json, "out_report_json");
        const auto forget = lookup(dataset->value, forget_ids_json);
        const auto retain = lookup(dataset->value, retain_ids_json);
        *out_report_json = copy_out(revs::eval_report_to_json(revs::evaluate_split(model->value, forget, retain, k)));
    });
}

revs_status revs_model_attack(const revs_model* model, const revs_dataset* dataset, const char* forget_ids_json,
                              size_t k, const char* perturbation_json, char** out_json) {
    return guarded([&] {
        need(model, "model");
        need(dataset, "dataset");
        need(forget_ids_json, "forget_ids_json");
        need(out_json, "out_json");
        const auto forget = lookup(dataset->value, forget_ids_json);
        const revs::PerturbationSpec spec =
            perturbation_json ? revs::perturbation_spec_from_json(perturbation_json) : revs::PerturbationSpec{};
        const auto attacks = revs::run_attacks(model->value, dataset->value.vocabulary, forget, k, spec);
        *out_json = copy_out(attacks_to_json(attacks).dump());
    });
}

}  // extern "C"
