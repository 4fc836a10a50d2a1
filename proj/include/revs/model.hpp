#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "revs/linalg.hpp"

namespace revs {

struct ModelConfig {
    std::size_t vocab_size = 0;
    std::size_t d_model = 64;
    std::size_t d_ff = 256;
    std::size_t n_layers = 4;
    std::size_t n_heads = 2;
    std::size_t context_len = 64;

    void validate() const;
    bool operator==(const ModelConfig&) const = default;
};

/// Pre-norm block: x += Attn(LN1(x)); x += FF2 · gelu(FF1 · LN2(x)).
/// The MLP has no biases, so each FF2 column is exactly one neuron's
/// write direction into the residual stream.
struct TransformerBlock {
    Vector ln1_gain, ln1_bias;
    Matrix w_q, w_k, w_v, w_o;  // d × d, row = output
    Vector ln2_gain, ln2_bias;
    Matrix ff1;  // d_ff × d
    Matrix ff2;  // d × d_ff; column j is neuron j

    bool operator==(const TransformerBlock&) const = default;
};

struct TensorView {
    std::string name;
    std::vector<std::size_t> shape;
    std::span<double> values;
};

struct ConstTensorView {
    std::string name;
    std::vector<std::size_t> shape;
    std::span<const double> values;
};

struct ModelState {
    ModelConfig config;
    Matrix token_embedding;     // V × d
    Matrix position_embedding;  // context × d
    std::vector<TransformerBlock> blocks;
    Vector final_gain, final_bias;
    Matrix unembedding;  // V × d, untied from the input embedding

    static ModelState zeros(const ModelConfig& config);
    static ModelState initialize(const ModelConfig& config, std::uint64_t seed, double init_std = 0.02);

    /// Every parameter tensor in canonical (checkpoint) order.
    std::vector<TensorView> tensors();
    std::vector<ConstTensorView> tensors() const;
    std::size_t parameter_count() const;

    /// Rounds every parameter to the nearest float32, the checkpoint precision.
    void round_to_storage_precision();

    bool operator==(const ModelState&) const = default;
};

/// Per-layer internals at the last prompt position.
struct ForwardTrace {
    std::vector<Vector> residual;     // h_ℓ, block output
    std::vector<Vector> activations;  // a_ℓ = gelu(FF1 · LN2(x))
    std::vector<Vector> lens_logits;  // U · LN_f(h_ℓ)
    Vector logits;                    // final output; equals lens_logits.back()

    std::size_t layer_count() const noexcept { return residual.size(); }
};

void validate_prompt(const ModelConfig& config, std::span<const TokenId> prompt);

ForwardTrace forward(const ModelState& state, std::span<const TokenId> prompt);

/// Vocabulary projection of a residual state through the final norm.
Vector logit_lens(const ModelState& state, std::span<const double> hidden);

/// Appends argmax tokens (ascending-id tie-break); returns only the new tokens.
std::vector<TokenId> greedy_generate(const ModelState& state, std::span<const TokenId> prompt,
                                     std::size_t max_new);

/// Teacher-forced check that greedy decoding from `prompt` emits `secret`.
/// Equivalent to comparing greedy_generate output, in a single forward pass.
bool reproduces_secret(const ModelState& state, std::span<const TokenId> prompt,
                       std::span<const TokenId> secret);

}  // namespace revs
