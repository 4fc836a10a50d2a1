#pragma once

// Full-sequence forward and hand-derived backward passes. The trainer and
// the gradient-based neuron selection use these; everything else goes
// through forward() in model.hpp.

#include <optional>
#include <span>
#include <vector>

#include "revs/model.hpp"

namespace revs {

struct LayerNormCache {
    Matrix hat;  // (x - mean) * rstd
    Vector rstd;
    Matrix out;
};

struct LayerCache {
    Matrix input;
    LayerNormCache ln1;
    Matrix q, k, v;
    std::vector<Matrix> probs;  // per head, T × T, lower triangular
    Matrix z;                   // concatenated head outputs
    Matrix mid;                 // residual after attention
    LayerNormCache ln2;
    Matrix pre;  // FF1 · LN2(mid)
    Matrix act;  // gelu(pre)
    Matrix output;
};

struct SequenceCache {
    std::vector<TokenId> tokens;
    std::vector<LayerCache> layers;
    LayerNormCache final_norm;
    Matrix logits;  // T × V
};

/// Runs the blocks only; leaves final_norm and logits empty.
void forward_layers(const ModelState& state, std::span<const TokenId> tokens, SequenceCache& cache);
void forward_sequence(const ModelState& state, std::span<const TokenId> tokens, SequenceCache& cache);

/// U · LN_f(hidden), bitwise equal to the matching row of forward_sequence logits.
Vector project_to_vocabulary(const ModelState& state, std::span<const double> hidden);

/// Accumulates parameter gradients into `grad` given dLoss/dlogits.
/// When `capture_layer` is set, also returns dLoss/d(act) of that layer at
/// the last position.
std::optional<Vector> backward_sequence(const ModelState& state, const SequenceCache& cache,
                                        const Matrix& dlogits, ModelState& grad,
                                        std::optional<std::size_t> capture_layer = std::nullopt);

/// Summed next-token cross-entropy over positions 0..T-2 and its dlogits,
/// each position weighted by `weight`.
double next_token_loss(const SequenceCache& cache, double weight, Matrix& dlogits);

double gelu(double x);
double gelu_derivative(double x);

}  // namespace revs
