#include "revs/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "revs/rng.hpp"
#include "revs/transformer.hpp"

namespace revs {

void TrainerConfig::validate() const {
    require(learning_rate > 0 && std::isfinite(learning_rate), ErrorKind::config, "learning_rate must be positive");
    require(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1, ErrorKind::config, "Adam betas must lie in [0, 1)");
    require(adam_eps > 0, ErrorKind::config, "adam_eps must be positive");
    require(grad_clip >= 0, ErrorKind::config, "grad_clip must be non-negative");
    require(init_std > 0, ErrorKind::config, "init_std must be positive");
    require(batch_size > 0, ErrorKind::config, "batch_size must be positive");
    require(max_epochs > 0, ErrorKind::config, "max_epochs must be positive");
    require(check_every > 0, ErrorKind::config, "check_every must be positive");
    require(min_epochs <= max_epochs, ErrorKind::config, "min_epochs must not exceed max_epochs");
}

double MemorizationReport::fraction() const {
    const std::size_t total = memorized.size() + unmemorized.size();
    return total == 0 ? 1.0 : static_cast<double>(memorized.size()) / static_cast<double>(total);
}

MemorizationReport check_memorization(const ModelState& state, const SyntheticDataset& dataset) {
    MemorizationReport report;
    for (const auto& t : dataset.targets) {
        bool ok = reproduces_secret(state, t.prompt, t.secret);
        for (std::size_t i = 0; ok && i < t.generalization_prompts.size(); ++i)
            ok = reproduces_secret(state, t.generalization_prompts[i], t.secret);
        (ok ? report.memorized : report.unmemorized).push_back(t.target_id);
    }
    return report;
}

double sequence_loss_and_gradient(const ModelState& state, std::span<const TokenId> tokens, ModelState& grad) {
    require(tokens.size() >= 2, ErrorKind::domain, "need at least two tokens for a next-token loss");
    grad = ModelState::zeros(state.config);
    SequenceCache cache;
    forward_sequence(state, tokens, cache);
    Matrix dlogits;
    const double loss = next_token_loss(cache, 1.0 / static_cast<double>(tokens.size() - 1), dlogits);
    backward_sequence(state, cache, dlogits, grad);
    return loss;
}

Vector activation_gradient(const ModelState& state, std::span<const TokenId> prompt, TokenId token,
                           std::size_t layer) {
    require(layer < state.config.n_layers, ErrorKind::domain, "layer out of range");
    require(token >= 0 && static_cast<std::size_t>(token) < state.config.vocab_size, ErrorKind::domain,
            "token id outside vocabulary");
    SequenceCache cache;
    forward_sequence(state, prompt, cache);
    const std::size_t last = prompt.size() - 1;
    const auto row = cache.logits.row(last);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double v : row) sum += std::exp(v - mx);
    const double log_z = mx + std::log(sum);
    Matrix dlogits(prompt.size(), state.config.vocab_size);
    for (std::size_t v = 0; v < row.size(); ++v) dlogits(last, v) = std::exp(row[v] - log_z);
    dlogits(last, static_cast<std::size_t>(token)) -= 1.0;
    ModelState grad = ModelState::zeros(state.config);
    return *backward_sequence(state, cache, dlogits, grad, layer);
}

namespace {

struct Adam {
    ModelState m, v;
    std::size_t step = 0;
};

void adam_update(ModelState& state, const ModelState& grad, Adam& adam, const TrainerConfig& cfg, double scale) {
    ++adam.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam.step));
    auto params = state.tensors();
    const auto grads = grad.tensors();
    auto ms = adam.m.tensors();
    auto vs = adam.v.tensors();
    for (std::size_t t = 0; t < params.size(); ++t) {
        auto p = params[t].values;
        const auto g = grads[t].values;
        auto m = ms[t].values;
        auto v = vs[t].values;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double gi = g[i] * scale;
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
            p[i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.adam_eps);
        }
    }
}

double grad_norm(const ModelState& grad) {
    double s = 0.0;
    for (const auto& t : grad.tensors())
        for (double g : t.values) s += g * g;
    return std::sqrt(s);
}

void zero(ModelState& grad) {
    for (auto& t : grad.tensors()) std::fill(t.values.begin(), t.values.end(), 0.0);
}

}  // namespace

TrainingLog train_to_memorize(ModelState& state, const SyntheticDataset& dataset, const TrainerConfig& config,
                              const EpochCallback& on_epoch) {
    config.validate();
    require(state.config.vocab_size == dataset.vocabulary.size(), ErrorKind::data,
            "dataset vocabulary does not match the model");
    for (const auto& s : dataset.sentences)
        require(s.size() >= 2 && s.size() <= state.config.context_len, ErrorKind::data,
                "sentence length outside [2, context_len]");

    Rng rng(config.seed);
    Adam adam{ModelState::zeros(state.config), ModelState::zeros(state.config)};
    ModelState grad = ModelState::zeros(state.config);
    std::vector<std::size_t> order(dataset.sentences.size());
    std::iota(order.begin(), order.end(), 0);
    TrainingLog log;
    SequenceCache cache;
    Matrix dlogits;
    MemorizationReport last_report;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        rng.shuffle(std::span(order));
        double epoch_loss = 0.0;
        std::size_t epoch_tokens = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            std::size_t batch_tokens = 0;
            for (std::size_t i = start; i < end; ++i) batch_tokens += dataset.sentences[order[i]].size() - 1;
            const double weight = 1.0 / static_cast<double>(batch_tokens);
            zero(grad);
            for (std::size_t i = start; i < end; ++i) {
                forward_sequence(state, dataset.sentences[order[i]], cache);
                epoch_loss += next_token_loss(cache, weight, dlogits) * static_cast<double>(batch_tokens);
                backward_sequence(state, cache, dlogits, grad);
            }
            epoch_tokens += batch_tokens;
            double scale = 1.0;
            if (config.grad_clip > 0) {
                const double norm = grad_norm(grad);
                require(std::isfinite(norm), ErrorKind::numeric, "non-finite gradient during training");
                if (norm > config.grad_clip) scale = config.grad_clip / norm;
            }
            adam_update(state, grad, adam, config, scale);
            ++log.steps;
        }
        EpochLog entry{epoch, epoch_loss / static_cast<double>(epoch_tokens), -1.0};
        require(std::isfinite(entry.loss), ErrorKind::numeric, "training loss diverged");
        const bool check =
            epoch >= config.min_epochs && (epoch % config.check_every == 0 || epoch == config.max_epochs);
        if (check) {
            last_report = check_memorization(state, dataset);
            entry.memorization = last_report.fraction();
            if (last_report.unmemorized.empty()) {
                // Verify at storage precision; keep training if rounding broke a target.
                ModelState rounded = state;
                rounded.round_to_storage_precision();
                last_report = check_memorization(rounded, dataset);
                if (last_report.unmemorized.empty()) {
                    state = std::move(rounded);
                    log.memorized = true;
                }
            }
        }
        log.epochs.push_back(entry);
        if (on_epoch) on_epoch(entry);
        if (log.memorized) return log;
    }
    throw MemorizationError("model did not memorize all targets within " + std::to_string(config.max_epochs) +
                                " epochs",
                            last_report.unmemorized);
}

}  // namespace revs
