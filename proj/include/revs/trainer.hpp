#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "revs/dataset.hpp"
#include "revs/model.hpp"

namespace revs {

struct TrainerConfig {
    double learning_rate = 3e-3;
    double beta1 = 0.9;
    double beta2 = 0.98;
    double adam_eps = 1e-8;
    double grad_clip = 1.0;  // global L2 norm; 0 disables
    double init_std = 0.02;
    std::size_t batch_size = 8;
    std::size_t max_epochs = 300;
    std::size_t min_epochs = 0;  // keep training past memorization to widen margins
    std::size_t check_every = 5;  // epochs between memorization checks
    std::uint64_t seed = 0;

    void validate() const;
};

struct EpochLog {
    std::size_t epoch = 0;
    double loss = 0.0;          // mean per-token cross-entropy
    double memorization = -1;   // fraction of targets reproduced; -1 when not checked
};

struct TrainingLog {
    std::vector<EpochLog> epochs;
    bool memorized = false;
    std::size_t steps = 0;
};

struct MemorizationReport {
    std::vector<std::string> memorized;
    std::vector<std::string> unmemorized;

    double fraction() const;
};

/// A target counts as memorized when greedy decoding reproduces its secret
/// from its prompt and from every generalization prompt.
MemorizationReport check_memorization(const ModelState& state, const SyntheticDataset& dataset);

using EpochCallback = std::function<void(const EpochLog&)>;

/// Trains from the given state until every target is memorized. Throws
/// MemorizationError when max_epochs runs out first. On success the
/// parameters are rounded to checkpoint precision and re-verified.
TrainingLog train_to_memorize(ModelState& state, const SyntheticDataset& dataset, const TrainerConfig& config,
                              const EpochCallback& on_epoch = {});

/// Mean next-token loss of one sequence and its gradient (grad is overwritten).
double sequence_loss_and_gradient(const ModelState& state, std::span<const TokenId> tokens, ModelState& grad);

/// dL/da at `layer`, last prompt position, for L = -log p(token | prompt).
Vector activation_gradient(const ModelState& state, std::span<const TokenId> prompt, TokenId token,
                           std::size_t layer);

}  // namespace revs
