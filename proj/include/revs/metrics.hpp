#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "revs/dataset.hpp"
#include "revs/model.hpp"

namespace revs {

struct MetricConfig {
    std::size_t k = 20;
    std::vector<std::uint64_t> splits = {1, 2, 3};

    void validate(std::size_t vocab_size) const;
};

/// r/k inside the top-k, 1 outside it.
double score_at_k(Rank r, std::size_t k);

/// Final-output rank of each unlearn token given base ⊕ S[0..pos).
std::vector<Rank> unlearn_token_ranks(const ModelState& state, const TargetSpec& target,
                                      std::span<const TokenId> base_prompt);

/// Max over T of Score@k, conditioned on the target's own prompt.
double efficacy_at_k(const ModelState& state, const TargetSpec& target, std::size_t k);
double efficacy_at_k(const ModelState& state, const TargetSpec& target, std::span<const TokenId> base_prompt,
                     std::size_t k);

/// Mean efficacy over generalization prompts; nullopt when there are none.
std::optional<double> generalization_at_k(const ModelState& state, const TargetSpec& target, std::size_t k);

/// Fraction of retain targets whose secret greedy decoding still reproduces.
double specificity(const ModelState& state, std::span<const TargetSpec* const> retain);
/// Same, after checking every retain target was memorized by `pre`
/// (data error otherwise).
double specificity(const ModelState& post, const ModelState& pre, std::span<const TargetSpec* const> retain);

/// n / Σ 1/vᵢ, and 0 when any value is 0. Empty input is a domain error.
double harmonic_mean(std::span<const double> values);

struct TargetScores {
    std::string target_id;
    double efficacy = 0.0;
    std::optional<double> generalization;
    std::vector<Rank> token_ranks;
};

struct AttackTargetResult {
    std::string target_id;
    double resistance = 1.0;
    bool skipped = false;  // perturbed prompt did not fit the context
    /// [token index in T][layer] effective rank.
    std::vector<std::vector<Rank>> effective_ranks;
};

struct AttackSummary {
    std::string attack;  // "LLA", "DA" or "PA"
    double resistance = 0.0;
    std::vector<AttackTargetResult> targets;
};

struct EvalReport {
    std::uint64_t split_seed = 0;
    std::size_t k = 20;
    std::string config_digest;
    std::vector<TargetScores> targets;
    double efficacy = 0.0;
    std::optional<double> generalization;
    double specificity = 0.0;
    std::size_t retain_count = 0;
    double unlearning_score = 0.0;
    std::vector<AttackSummary> attacks;
    std::optional<double> resistance_score;
};

/// Efficacy, generalization, specificity and the Unlearning Score over
/// forget/retain lists. Attack fields are left empty.
EvalReport evaluate_split(const ModelState& state, std::span<const TargetSpec* const> forget,
                          std::span<const TargetSpec* const> retain, std::size_t k);

/// Unlearning Score: harmonic mean of {efficacy, specificity, generalization},
/// dropping generalization when it does not apply.
double unlearning_score(double efficacy, std::optional<double> generalization, double specificity);

std::string eval_report_to_json(const EvalReport& report);
EvalReport eval_report_from_json(const std::string& text);
/// One row per target plus a summary row.
std::string eval_report_to_csv(const EvalReport& report);

}  // namespace revs
