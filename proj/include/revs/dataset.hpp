#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "revs/linalg.hpp"
#include "revs/tokenizer.hpp"

namespace revs {

enum class TargetSplit { forget, retain };

enum class TokenStrategy { rarest, most_frequent, first, random };

const char* to_string(TargetSplit split);
const char* to_string(TokenStrategy strategy);
TargetSplit parse_target_split(std::string_view name);
TokenStrategy parse_token_strategy(std::string_view name);

/// One token of a secret chosen for unlearning, with its index in the secret.
struct UnlearnToken {
    TokenId id = 0;
    std::size_t pos = 0;

    bool operator==(const UnlearnToken&) const = default;
};

/// One sensitive sequence and the prompts that elicit it.
struct TargetSpec {
    std::string target_id;
    std::vector<TokenId> prompt;  // starts with kBos
    std::vector<TokenId> secret;
    std::vector<UnlearnToken> unlearn_tokens;  // ascending position
    std::vector<std::vector<TokenId>> generalization_prompts;
    TargetSplit split = TargetSplit::forget;

    /// prompt ⊕ secret[0..pos)
    std::vector<TokenId> prompt_for_position(std::size_t pos) const;
    /// Same continuation, but conditioned on another prompt.
    std::vector<TokenId> prompt_for_position(std::span<const TokenId> base, std::size_t pos) const;

    bool operator==(const TargetSpec&) const = default;
};

struct DatasetConfig {
    std::size_t n_targets = 20;
    std::size_t prefixes_per_target = 5;
    std::size_t n_retain_sentences = 100;
    std::size_t unlearn_token_count = 2;
    TokenStrategy token_strategy = TokenStrategy::rarest;

    void validate() const;
};

struct SyntheticDataset {
    std::uint64_t seed = 0;
    Vocabulary vocabulary;
    std::vector<std::vector<TokenId>> sentences;  // each starts with kBos
    std::vector<TargetSpec> targets;
    std::map<std::string, std::size_t> template_domain_counts;

    std::vector<const TargetSpec*> targets_in(TargetSplit split) const;
};

/// Chooses which tokens of a secret to unlearn. `rarest` takes the highest
/// ids (ids are frequency ranked); ties on id resolve by ascending position.
/// Result is sorted by position.
std::vector<UnlearnToken> select_unlearn_tokens(std::span<const TokenId> secret, TokenStrategy strategy,
                                                std::size_t count, const std::set<TokenId>& exclusions,
                                                std::uint64_t seed, const std::string& secret_name = "secret");

/// Ids of the given strings that exist in the vocabulary.
std::set<TokenId> exclusion_ids(const Vocabulary& vocab, std::span<const std::string> tokens);

/// Default exclusion lists by target kind.
const std::vector<std::string>& ssn_exclusions();
const std::vector<std::string>& url_email_exclusions();

SyntheticDataset generate_ssn_dataset(const DatasetConfig& config, std::uint64_t seed);

/// Canonical JSON text (sorted keys, LF newlines).
std::string dataset_to_json(const SyntheticDataset& dataset);
SyntheticDataset dataset_from_json(const std::string& text);

void save_dataset(const SyntheticDataset& dataset, const std::string& path);
SyntheticDataset load_dataset(const std::string& path);

}  // namespace revs
