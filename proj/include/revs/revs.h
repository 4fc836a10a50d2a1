/* C interface to the REVS library: opaque handles, status codes, and JSON
 * strings for anything structured. Strings returned through `char**` are
 * owned by the caller and must be released with revs_string_free. */
#ifndef REVS_REVS_H
#define REVS_REVS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define REVS_API __declspec(dllexport)
#else
#define REVS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Also the CLI exit codes. */
typedef enum revs_status {
    REVS_OK = 0,
    REVS_ERR_UNEXPECTED = 1,
    REVS_ERR_CONFIG = 2,
    REVS_ERR_DATA = 3,
    REVS_ERR_NUMERIC = 4,
    REVS_ERR_CONTRACT = 5,
    REVS_ERR_IO = 6,
    REVS_ERR_MISSING_ARTIFACT = 7,
    REVS_ERR_DIGEST_MISMATCH = 8,
    REVS_ERR_CORRUPT_CHECKPOINT = 9,
    REVS_ERR_MEMORIZATION = 10,
    REVS_ERR_DOMAIN = 11,
    REVS_ERR_SELECTION = 12,
    REVS_ERR_INVALID_ARGUMENT = 13
} revs_status;

typedef struct revs_dataset revs_dataset;
typedef struct revs_model revs_model;

/* Message of the last failed call on this thread ("" if none). */
REVS_API const char* revs_last_error(void);
REVS_API const char* revs_status_name(revs_status status);
REVS_API const char* revs_version(void);
REVS_API void revs_string_free(char* s);
/* trace, debug, info, warn, error, critical or off. */
REVS_API revs_status revs_set_log_level(const char* level);

/* ---- experiment configs and pipeline stages ---- */

/* Full default ExperimentConfig as JSON. */
REVS_API revs_status revs_config_default(char** out_json);
/* Validates and canonicalizes a config; unknown fields are rejected. */
REVS_API revs_status revs_config_normalize(const char* config_json, char** out_json);
REVS_API revs_status revs_config_digest(const char* config_json, char** out_hex);
/* Stage names: gen-data, train, check-mem, unlearn, evaluate, attack,
 * report. `checkpoint_dir` may be NULL; check-mem inspects it instead of the
 * run's own checkpoint when given. */
REVS_API revs_status revs_run_stage(const char* stage, const char* config_json, const char* checkpoint_dir);

/* ---- datasets ---- */

/* `dataset_config_json` may be NULL for defaults. */
REVS_API revs_status revs_dataset_generate(const char* dataset_config_json, uint64_t seed, revs_dataset** out);
REVS_API revs_status revs_dataset_load(const char* path, revs_dataset** out);
REVS_API revs_status revs_dataset_save(const revs_dataset* dataset, const char* path);
REVS_API size_t revs_dataset_vocab_size(const revs_dataset* dataset);
REVS_API size_t revs_dataset_target_count(const revs_dataset* dataset);
/* Target i as JSON: target_id, split, prompt, secret, unlearn_tokens,
 * generalization_prompts. */
REVS_API revs_status revs_dataset_target(const revs_dataset* dataset, size_t index, char** out_json);
REVS_API revs_status revs_dataset_encode(const revs_dataset* dataset, const char* text, int32_t* tokens,
                                         size_t capacity, size_t* out_len);
REVS_API void revs_dataset_free(revs_dataset* dataset);

/* ---- models ---- */

/* vocab_size 0 in `model_config_json` takes the dataset vocabulary. */
REVS_API revs_status revs_model_init(const char* model_config_json, const revs_dataset* dataset, uint64_t seed,
                                     double init_std, revs_model** out);
REVS_API revs_status revs_model_load(const char* checkpoint_dir, revs_model** out);
REVS_API revs_status revs_model_save(const revs_model* model, const char* checkpoint_dir);
REVS_API revs_status revs_model_clone(const revs_model* model, revs_model** out);
REVS_API revs_status revs_model_config(const revs_model* model, char** out_json);
REVS_API void revs_model_free(revs_model* model);

/* Trains until every target is memorized; writes the training log JSON. */
REVS_API revs_status revs_model_train(revs_model* model, const revs_dataset* dataset, const char* trainer_config_json,
                                      char** out_log_json);
REVS_API revs_status revs_model_check_memorization(const revs_model* model, const revs_dataset* dataset,
                                                   double* out_fraction);
/* Final-layer logits for the last prompt position; `logits` holds vocab_size values. */
REVS_API revs_status revs_model_logits(const revs_model* model, const int32_t* prompt, size_t prompt_len,
                                       double* logits, size_t capacity);
REVS_API revs_status revs_model_generate(const revs_model* model, const int32_t* prompt, size_t prompt_len,
                                         size_t max_new, int32_t* out_tokens);

/* Unlearns one target in place; EditRecords as JSON. */
REVS_API revs_status revs_model_unlearn(revs_model* model, const revs_dataset* dataset, const char* target_id,
                                        const char* revs_config_json, char** out_records_json);
/* EvalReport JSON. Target lists are JSON arrays of ids. */
REVS_API revs_status revs_model_evaluate(const revs_model* model, const revs_dataset* dataset,
                                         const char* forget_ids_json, const char* retain_ids_json, size_t k,
                                         char** out_report_json);
/* LLA/DA/PA resistances over the forget targets; `perturbation_json` may be NULL. */
REVS_API revs_status revs_model_attack(const revs_model* model, const revs_dataset* dataset,
                                       const char* forget_ids_json, size_t k, const char* perturbation_json,
                                       char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* REVS_REVS_H */
