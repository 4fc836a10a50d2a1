#include "revs/model.hpp"

#include <cmath>
#include <string>

#include "revs/rng.hpp"
#include "revs/transformer.hpp"

namespace revs {

void ModelConfig::validate() const {
    require(d_model > 0 && d_ff > 0 && n_layers > 0 && n_heads > 0 && context_len > 0, ErrorKind::config,
            "model dimensions must be positive");
    require(d_model % n_heads == 0, ErrorKind::config, "d_model must be divisible by n_heads");
    require(vocab_size >= d_model, ErrorKind::config,
            "vocab_size " + std::to_string(vocab_size) + " < d_model " + std::to_string(d_model) +
                " leaves the unembedding rank deficient");
}

ModelState ModelState::zeros(const ModelConfig& config) {
    config.validate();
    const std::size_t d = config.d_model;
    ModelState s;
    s.config = config;
    s.token_embedding = Matrix(config.vocab_size, d);
    s.position_embedding = Matrix(config.context_len, d);
    s.blocks.resize(config.n_layers);
    for (auto& b : s.blocks) {
        b.ln1_gain.assign(d, 0.0);
        b.ln1_bias.assign(d, 0.0);
        b.w_q = b.w_k = b.w_v = b.w_o = Matrix(d, d);
        b.ln2_gain.assign(d, 0.0);
        b.ln2_bias.assign(d, 0.0);
        b.ff1 = Matrix(config.d_ff, d);
        b.ff2 = Matrix(d, config.d_ff);
    }
    s.final_gain.assign(d, 0.0);
    s.final_bias.assign(d, 0.0);
    s.unembedding = Matrix(config.vocab_size, d);
    return s;
}

ModelState ModelState::initialize(const ModelConfig& config, std::uint64_t seed, double init_std) {
    ModelState s = zeros(config);
    Rng rng(seed);
    // Residual-writing projections are scaled down with depth (GPT-2 style).
    const double out_std = init_std / std::sqrt(2.0 * static_cast<double>(config.n_layers));
    for (auto& t : s.tensors()) {
        const bool is_gain = t.name.ends_with(".gain");
        const bool is_bias = t.name.ends_with(".bias");
        const bool is_out = t.name.ends_with("attn.w_o") || t.name.ends_with("mlp.ff2");
        for (double& v : t.values) {
            if (is_gain) v = 1.0;
            else if (is_bias) v = 0.0;
            else v = rng.normal() * (is_out ? out_std : init_std);
        }
    }
    return s;
}

namespace {

template <typename View, typename State>
std::vector<View> enumerate_tensors(State& s) {
    std::vector<View> out;
    auto mat = [&](std::string name, auto& m) { out.push_back(View{std::move(name), {m.rows(), m.cols()}, m.data()}); };
    auto vec = [&](std::string name, auto& v) { out.push_back(View{std::move(name), {v.size()}, v}); };
    mat("token_embedding", s.token_embedding);
    mat("position_embedding", s.position_embedding);
    for (std::size_t l = 0; l < s.blocks.size(); ++l) {
        auto& b = s.blocks[l];
        const std::string p = "blocks." + std::to_string(l) + ".";
        vec(p + "ln1.gain", b.ln1_gain);
        vec(p + "ln1.bias", b.ln1_bias);
        mat(p + "attn.w_q", b.w_q);
        mat(p + "attn.w_k", b.w_k);
        mat(p + "attn.w_v", b.w_v);
        mat(p + "attn.w_o", b.w_o);
        vec(p + "ln2.gain", b.ln2_gain);
        vec(p + "ln2.bias", b.ln2_bias);
        mat(p + "mlp.ff1", b.ff1);
        mat(p + "mlp.ff2", b.ff2);
    }
    vec("final_norm.gain", s.final_gain);
    vec("final_norm.bias", s.final_bias);
    mat("unembedding", s.unembedding);
    return out;
}

}  // namespace

std::vector<TensorView> ModelState::tensors() { return enumerate_tensors<TensorView>(*this); }

std::vector<ConstTensorView> ModelState::tensors() const { return enumerate_tensors<ConstTensorView>(*this); }

std::size_t ModelState::parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors()) n += t.values.size();
    return n;
}

void ModelState::round_to_storage_precision() {
    for (auto& t : tensors())
        for (double& v : t.values) v = static_cast<double>(static_cast<float>(v));
}

void validate_prompt(const ModelConfig& config, std::span<const TokenId> prompt) {
    require(!prompt.empty(), ErrorKind::domain, "empty prompt");
    require(prompt.size() <= config.context_len, ErrorKind::domain,
            "prompt length " + std::to_string(prompt.size()) + " exceeds context " +
                std::to_string(config.context_len));
    for (TokenId t : prompt)
        require(t >= 0 && static_cast<std::size_t>(t) < config.vocab_size, ErrorKind::domain,
                "token id " + std::to_string(t) + " outside vocabulary");
}

ForwardTrace forward(const ModelState& state, std::span<const TokenId> prompt) {
    SequenceCache cache;
    forward_layers(state, prompt, cache);
    const std::size_t last = prompt.size() - 1;
    ForwardTrace trace;
    for (const auto& layer : cache.layers) {
        const auto h = layer.output.row(last);
        const auto a = layer.act.row(last);
        trace.residual.emplace_back(h.begin(), h.end());
        trace.activations.emplace_back(a.begin(), a.end());
        trace.lens_logits.push_back(project_to_vocabulary(state, h));
    }
    trace.logits = trace.lens_logits.back();
    return trace;
}

Vector logit_lens(const ModelState& state, std::span<const double> hidden) {
    require(hidden.size() == state.config.d_model, ErrorKind::domain, "hidden state has wrong width");
    return project_to_vocabulary(state, hidden);
}

std::vector<TokenId> greedy_generate(const ModelState& state, std::span<const TokenId> prompt, std::size_t max_new) {
    validate_prompt(state.config, prompt);
    require(prompt.size() + max_new <= state.config.context_len + 1, ErrorKind::domain,
            "generation would overflow the context window");
    std::vector<TokenId> seq(prompt.begin(), prompt.end());
    std::vector<TokenId> out;
    for (std::size_t i = 0; i < max_new; ++i) {
        const ForwardTrace trace = forward(state, seq);
        const auto next = static_cast<TokenId>(argmax(trace.logits));
        out.push_back(next);
        seq.push_back(next);
    }
    return out;
}

bool reproduces_secret(const ModelState& state, std::span<const TokenId> prompt, std::span<const TokenId> secret) {
    if (secret.empty()) return true;
    std::vector<TokenId> seq(prompt.begin(), prompt.end());
    seq.insert(seq.end(), secret.begin(), secret.end() - 1);
    SequenceCache cache;
    forward_sequence(state, seq, cache);
    for (std::size_t i = 0; i < secret.size(); ++i) {
        if (static_cast<TokenId>(argmax(cache.logits.row(prompt.size() - 1 + i))) != secret[i]) return false;
    }
    return true;
}

}  // namespace revs
