#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "revs/dataset.hpp"
#include "revs/metrics.hpp"
#include "revs/model.hpp"

namespace revs {

enum class AttackKind { lla, da, pa };

const char* to_string(AttackKind kind);

/// Per-layer attacker candidates for one prompt, plus the effective rank
/// of each probed token at each layer. DA "layers" are consecutive pairs.
struct CandidateSet {
    AttackKind attack = AttackKind::lla;
    std::vector<std::vector<TokenId>> candidates;  // [layer]
    std::vector<TokenId> probes;
    std::vector<std::vector<Rank>> effective_ranks;  // [probe][layer]

    std::size_t layer_count() const noexcept { return candidates.size(); }
    bool contains(std::size_t layer, TokenId token) const;
};

struct PerturbationSpec {
    std::string insert_char = " ";
    std::size_t n_insertions = 10;
    bool insert_after_prompt = true;
    std::uint64_t seed = 0;
    std::size_t samples = 1;  // perturbed prompts per query; ranks take the attacker's best

    void validate() const;
};

/// Top-k ∪ bottom-k of every layer's logit lens; effective rank is
/// min(rank from top, rank from bottom).
CandidateSet logit_lens_candidates(const ModelState& state, std::span<const TokenId> prompt, std::size_t k,
                                   std::span<const TokenId> probes);

/// Top-k of |v^{ℓ+1} - v^ℓ|; effective rank is the position in that ordering.
CandidateSet delta_candidates(const ModelState& state, std::span<const TokenId> prompt, std::size_t k,
                              std::span<const TokenId> probes);

/// Inserts spec.insert_char at n distinct random indices of `text` (and once
/// at the end when insert_after_prompt is set).
std::string perturb_text(std::string_view text, const PerturbationSpec& spec, std::uint64_t seed);

/// Logit-lens candidates on a perturbed, re-tokenized prompt. Returns
/// nullopt when the perturbed prompt no longer fits the context.
std::optional<CandidateSet> perturbation_candidates(const ModelState& state, const Vocabulary& vocab,
                                                    std::string_view prompt_text, const PerturbationSpec& spec,
                                                    std::size_t k, std::span<const TokenId> probes,
                                                    std::uint64_t seed);

/// Min over layers of max over T of Score@k, where sets[i] carries the
/// effective ranks for unlearn token i (probe 0 of that set).
double attack_resistance_at_k(std::span<const CandidateSet> sets, std::size_t k);

/// Runs one attack against one target, one query per unlearn token.
AttackTargetResult attack_target(const ModelState& state, const Vocabulary& vocab, const TargetSpec& target,
                                 AttackKind kind, std::size_t k, const PerturbationSpec& spec);

/// LLA, DA and PA over the forget targets, each averaged across targets.
std::vector<AttackSummary> run_attacks(const ModelState& state, const Vocabulary& vocab,
                                       std::span<const TargetSpec* const> forget, std::size_t k,
                                       const PerturbationSpec& spec);

/// Harmonic mean of the per-attack resistances.
double resistance_score(std::span<const double> resistances);
double resistance_score(const std::vector<AttackSummary>& attacks);

}  // namespace revs
