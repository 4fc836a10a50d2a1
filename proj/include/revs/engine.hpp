#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "revs/dataset.hpp"
#include "revs/model.hpp"

namespace revs {

enum class NeuronStrategy { hybrid, activations, rank, gradient, random, zero };

const char* to_string(NeuronStrategy strategy);
NeuronStrategy parse_neuron_strategy(std::string_view name);

/// Rank thresholds left unset are derived from the vocabulary size by
/// resolve(), using the matching *_fraction field.
struct RevsConfig {
    std::optional<Rank> r_d, eps_rd, r_n, eps_rn;
    double r_d_fraction = 0.006;
    double eps_rd_fraction = 0.002;
    double r_n_fraction = 0.8;
    double eps_rn_fraction = 0.05;
    std::size_t n_max = 24;
    std::size_t act_top_k = 48;
    double grow_factor = 1.3;
    double shrink_factor = 0.8;
    double init_logit = -10.0;
    std::size_t max_edit_iters = 100;
    NeuronStrategy neuron_strategy = NeuronStrategy::hybrid;
    std::uint64_t seed = 0;

    /// Copy with every optional filled in for this vocabulary.
    RevsConfig resolve(std::size_t vocab_size) const;
    /// Checks a resolved config against the model shape.
    void validate(std::size_t vocab_size, std::size_t d_ff) const;
};

struct NeuronRef {
    std::size_t layer = 0;
    std::size_t column = 0;

    auto operator<=>(const NeuronRef&) const = default;
};

struct NeuronEditResult {
    Vector neuron;
    std::size_t iterations = 0;
    Rank initial_rank = 0;
    Rank final_rank = 0;
    double final_logit = 0.0;
    bool budget_exhausted = false;
    std::vector<double> logit_trajectory;  // l_t used in each iteration
};

struct NeuronEdit {
    NeuronRef neuron;
    std::size_t iterations = 0;
    Rank initial_rank = 0;
    Rank final_rank = 0;
    double final_logit = 0.0;
    bool budget_exhausted = false;
    std::vector<double> logit_trajectory;
};

struct LayerEdit {
    std::size_t layer = 0;
    bool selected = false;
    Rank initial_rank = 0;  // r_{t,ℓ} before editing this layer
    Rank final_rank = 0;
    bool n_max_reached = false;  // stopped with r_t still below r_d
    std::vector<NeuronEdit> neurons;
};

struct EditRecord {
    std::string target_id;
    TokenId token = 0;
    std::size_t token_pos = 0;
    std::vector<TokenId> prompt;
    std::vector<LayerEdit> layers;  // one entry per model layer
    bool budget_exhausted = false;

    std::size_t neurons_edited() const;
};

/// Layers whose logit-lens rank of `token` is below r_d, ascending.
std::vector<std::size_t> select_layers(const ModelState& state, std::span<const TokenId> prompt, TokenId token,
                                       const RevsConfig& config);
std::vector<std::size_t> select_layers(const ForwardTrace& trace, TokenId token, const RevsConfig& config);

/// Candidate neurons of `layer` in edit order. Columns in `exclude` are
/// skipped before any filtering. `prompt` is needed only by the gradient
/// strategy.
std::vector<NeuronRef> select_neurons(const ModelState& state, const ForwardTrace& trace, std::size_t layer,
                                      TokenId token, const RevsConfig& config, std::span<const TokenId> prompt = {},
                                      const std::set<std::size_t>& exclude = {});

/// Iterative pseudoinverse edit of one FF₂ column towards in-neuron rank r_n.
NeuronEditResult edit_neuron(std::span<const double> neuron, TokenId token, const RevsConfig& config,
                             const Matrix& u, const Matrix& u_pinv, const NeuronRef& ref = {});

/// Unlearns a single token. `u_pinv` may be passed to skip recomputing U†.
EditRecord unlearn_token(ModelState& state, std::span<const TokenId> prompt, TokenId token, const RevsConfig& config,
                         const Matrix* u_pinv = nullptr);

/// Unlearns every token of T against prompt ⊕ S[0..pos).
std::vector<EditRecord> unlearn_target(ModelState& state, const TargetSpec& target, const RevsConfig& config,
                                       const Matrix* u_pinv = nullptr);

/// Canonical JSON (sorted keys) for a list of records.
std::string edit_records_to_json(const std::vector<EditRecord>& records);
std::vector<EditRecord> edit_records_from_json(const std::string& text);

}  // namespace revs
