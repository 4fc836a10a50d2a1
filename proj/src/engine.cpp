#include "revs/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>
#include "revs/rng.hpp"
#include "revs/trainer.hpp"

namespace revs {

using nlohmann::json;

const char* to_string(NeuronStrategy strategy) {
    switch (strategy) {
        case NeuronStrategy::hybrid: return "hybrid";
        case NeuronStrategy::activations: return "activations";
        case NeuronStrategy::rank: return "rank";
        case NeuronStrategy::gradient: return "gradient";
        case NeuronStrategy::random: return "random";
        case NeuronStrategy::zero: return "zero";
    }
    return "unknown";
}

NeuronStrategy parse_neuron_strategy(std::string_view name) {
    for (auto s : {NeuronStrategy::hybrid, NeuronStrategy::activations, NeuronStrategy::rank,
                   NeuronStrategy::gradient, NeuronStrategy::random, NeuronStrategy::zero})
        if (name == to_string(s)) return s;
    fail(ErrorKind::config, "unknown neuron strategy '" + std::string(name) + "'");
}

RevsConfig RevsConfig::resolve(std::size_t vocab_size) const {
    const double v = static_cast<double>(vocab_size);
    RevsConfig out = *this;
    if (!out.r_d) out.r_d = static_cast<Rank>(std::ceil(r_d_fraction * v));
    if (!out.eps_rd) out.eps_rd = static_cast<Rank>(std::ceil(eps_rd_fraction * v));
    if (!out.r_n) out.r_n = static_cast<Rank>(std::floor(r_n_fraction * v));
    if (!out.eps_rn) out.eps_rn = static_cast<Rank>(std::ceil(eps_rn_fraction * v));
    return out;
}

void RevsConfig::validate(std::size_t vocab_size, std::size_t d_ff) const {
    require(r_d && eps_rd && r_n && eps_rn, ErrorKind::config, "revs config must be resolved before use");
    require(*r_d >= 1 && *r_d <= vocab_size, ErrorKind::config, "r_d must lie in [1, |V|]");
    require(*r_n >= 1 && *r_n <= vocab_size, ErrorKind::config, "r_n must lie in [1, |V|]");
    require(grow_factor > 1.0, ErrorKind::config, "grow_factor must exceed 1");
    require(shrink_factor > 0.0 && shrink_factor < 1.0, ErrorKind::config, "shrink_factor must lie in (0, 1)");
    require(init_logit < 0.0 && std::isfinite(init_logit), ErrorKind::config, "init_logit must be negative");
    require(max_edit_iters >= 1, ErrorKind::config, "max_edit_iters must be positive");
    require(act_top_k >= 1 && act_top_k <= d_ff, ErrorKind::config,
            "act_top_k " + std::to_string(act_top_k) + " must lie in [1, d_ff=" + std::to_string(d_ff) + "]");
}

std::size_t EditRecord::neurons_edited() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.neurons.size();
    return n;
}

std::vector<std::size_t> select_layers(const ForwardTrace& trace, TokenId token, const RevsConfig& config) {
    std::vector<std::size_t> out;
    for (std::size_t l = 0; l < trace.layer_count(); ++l)
        if (rank_of_token(trace.lens_logits[l], token) < *config.r_d) out.push_back(l);
    return out;
}

std::vector<std::size_t> select_layers(const ModelState& state, std::span<const TokenId> prompt, TokenId token,
                                       const RevsConfig& config) {
    return select_layers(forward(state, prompt), token, config);
}

namespace {

Rank neuron_rank(const ModelState& state, std::size_t layer, std::size_t column, TokenId token) {
    const Vector n = state.blocks[layer].ff2.column(column);
    return rank_of_token(matvec(state.unembedding, n), token);
}

// Stable sort of columns by a key, ties by ascending column index.
template <typename Key>
void order_by(std::vector<std::size_t>& cols, Key key) {
    std::vector<std::pair<decltype(key(0)), std::size_t>> keyed;
    keyed.reserve(cols.size());
    for (std::size_t c : cols) keyed.emplace_back(key(c), c);
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = keyed[i].second;
}

std::vector<std::size_t> top_by_value(const std::vector<std::size_t>& cols, std::span<const double> values,
                                      std::size_t k) {
    Vector sub(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) sub[i] = values[cols[i]];
    std::vector<std::size_t> out;
    for (std::size_t i : top_k_indices(sub, std::min(k, sub.size()))) out.push_back(cols[i]);
    return out;
}

}  // namespace

std::vector<NeuronRef> select_neurons(const ModelState& state, const ForwardTrace& trace, std::size_t layer,
                                      TokenId token, const RevsConfig& config, std::span<const TokenId> prompt,
                                      const std::set<std::size_t>& exclude) {
    const std::size_t d_ff = state.config.d_ff;
    require(layer < state.config.n_layers, ErrorKind::domain, "layer out of range");
    require(config.act_top_k >= 1 && config.act_top_k <= d_ff, ErrorKind::config, "act_top_k must lie in [1, d_ff]");
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < d_ff; ++j)
        if (!exclude.contains(j)) cols.push_back(j);
    const auto& act = trace.activations[layer];

    switch (config.neuron_strategy) {
        case NeuronStrategy::hybrid:
        case NeuronStrategy::zero:
            cols = top_by_value(cols, act, config.act_top_k);
            order_by(cols, [&](std::size_t c) { return neuron_rank(state, layer, c, token); });
            break;
        case NeuronStrategy::activations:
            cols = top_by_value(cols, act, cols.size());
            break;
        case NeuronStrategy::rank:
            order_by(cols, [&](std::size_t c) { return neuron_rank(state, layer, c, token); });
            break;
        case NeuronStrategy::gradient: {
            require(!prompt.empty(), ErrorKind::domain, "gradient strategy needs the prompt");
            const Vector g = activation_gradient(state, prompt, token, layer);
            Vector mag(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) mag[i] = std::abs(g[i]);
            cols = top_by_value(cols, mag, cols.size());
            break;
        }
        case NeuronStrategy::random: {
            // Fixed permutation per (seed, layer, token), so exclusions walk it in order.
            std::vector<std::size_t> perm(d_ff);
            std::iota(perm.begin(), perm.end(), 0);
            Rng rng(config.seed * 0x9E3779B97F4A7C15ULL + layer * 0x100000001B3ULL + static_cast<std::uint64_t>(token));
            rng.shuffle(std::span(perm));
            cols.clear();
            for (std::size_t c : perm)
                if (!exclude.contains(c)) cols.push_back(c);
            break;
        }
    }
    std::vector<NeuronRef> out;
    for (std::size_t c : cols) out.push_back({layer, c});
    return out;
}

NeuronEditResult edit_neuron(std::span<const double> neuron, TokenId token, const RevsConfig& config,
                             const Matrix& u, const Matrix& u_pinv, const NeuronRef& ref) {
    require(neuron.size() == u.cols(), ErrorKind::domain, "neuron length must equal d_model");
    const Rank r_n = *config.r_n;
    const Rank eps = *config.eps_rn;
    auto distance = [&](Rank r) { return r > r_n ? r - r_n : r_n - r; };
    auto name = [&] {
        return "neuron (layer " + std::to_string(ref.layer) + ", column " + std::to_string(ref.column) + ")";
    };

    NeuronEditResult result;
    result.neuron.assign(neuron.begin(), neuron.end());
    Vector v = matvec(u, result.neuron);
    result.initial_rank = rank_of_token(v, token);
    result.final_rank = result.initial_rank;
    if (distance(result.initial_rank) <= eps) return result;

    Vector n = result.neuron;
    Rank best_distance = SIZE_MAX;
    double l = config.init_logit;
    const auto t = static_cast<std::size_t>(token);
    for (std::size_t it = 1; it <= config.max_edit_iters; ++it) {
        result.logit_trajectory.push_back(l);
        v = matvec(u, n);
        v[t] = l;
        n = matvec(u_pinv, v);
        v = matvec(u, n);
        if (!all_finite(n) || !all_finite(v)) fail(ErrorKind::numeric, "non-finite values while editing " + name());
        const Rank r = rank_of_token(v, token);
        result.iterations = it;
        if (distance(r) < best_distance) {
            best_distance = distance(r);
            result.neuron = n;
            result.final_rank = r;
            result.final_logit = l;
        }
        if (distance(r) <= eps) return result;
        l *= r < r_n ? config.grow_factor : config.shrink_factor;
    }
    result.budget_exhausted = true;
    return result;
}

EditRecord unlearn_token(ModelState& state, std::span<const TokenId> prompt, TokenId token, const RevsConfig& config,
                         const Matrix* u_pinv) {
    const RevsConfig cfg = config.resolve(state.config.vocab_size);
    cfg.validate(state.config.vocab_size, state.config.d_ff);
    validate_prompt(state.config, prompt);
    require(token >= 0 && static_cast<std::size_t>(token) < state.config.vocab_size, ErrorKind::domain,
            "token id outside vocabulary");
    Matrix local_pinv;
    if (!u_pinv) {
        local_pinv = pseudoinverse(state.unembedding);
        u_pinv = &local_pinv;
    }

    EditRecord record;
    record.token = token;
    record.prompt.assign(prompt.begin(), prompt.end());
    ForwardTrace trace = forward(state, prompt);
    const auto selected = select_layers(trace, token, cfg);
    for (std::size_t l = 0; l < state.config.n_layers; ++l) {
        LayerEdit le;
        le.layer = l;
        le.selected = std::find(selected.begin(), selected.end(), l) != selected.end();
        le.initial_rank = le.final_rank = rank_of_token(trace.lens_logits[l], token);
        record.layers.push_back(le);
    }

    for (std::size_t l : selected) {
        LayerEdit& le = record.layers[l];
        // Earlier layers' edits change this layer's input, so start from a fresh trace.
        trace = forward(state, prompt);
        Rank r_t = rank_of_token(trace.lens_logits[l], token);
        le.initial_rank = r_t;
        std::set<std::size_t> edited;
        while (r_t < *cfg.r_d && edited.size() < cfg.n_max) {
            const auto candidates = select_neurons(state, trace, l, token, cfg, prompt, edited);
            if (candidates.empty()) break;
            const NeuronRef ref = candidates.front();
            Matrix& ff2 = state.blocks[l].ff2;
            NeuronEdit ne;
            ne.neuron = ref;
            if (cfg.neuron_strategy == NeuronStrategy::zero) {
                ne.initial_rank = neuron_rank(state, l, ref.column, token);
                ff2.set_column(ref.column, Vector(ff2.rows(), 0.0));
                ne.final_rank = neuron_rank(state, l, ref.column, token);
            } else {
                auto res = edit_neuron(ff2.column(ref.column), token, cfg, state.unembedding, *u_pinv, ref);
                ff2.set_column(ref.column, res.neuron);
                ne.iterations = res.iterations;
                ne.initial_rank = res.initial_rank;
                ne.final_rank = res.final_rank;
                ne.final_logit = res.final_logit;
                ne.budget_exhausted = res.budget_exhausted;
                ne.logit_trajectory = std::move(res.logit_trajectory);
                record.budget_exhausted = record.budget_exhausted || ne.budget_exhausted;
            }
            edited.insert(ref.column);
            le.neurons.push_back(std::move(ne));
            trace = forward(state, prompt);
            r_t = rank_of_token(trace.lens_logits[l], token);
        }
        le.final_rank = r_t;
        le.n_max_reached = r_t < *cfg.r_d;
        record.budget_exhausted = record.budget_exhausted || le.n_max_reached;
    }
    // Report every layer's rank on the final state.
    trace = forward(state, prompt);
    for (auto& le : record.layers)
        if (!le.selected) le.final_rank = rank_of_token(trace.lens_logits[le.layer], token);
    return record;
}

std::vector<EditRecord> unlearn_target(ModelState& state, const TargetSpec& target, const RevsConfig& config,
                                       const Matrix* u_pinv) {
    require(!target.unlearn_tokens.empty(), ErrorKind::domain, "target " + target.target_id + " has no unlearn tokens");
    Matrix local_pinv;
    if (!u_pinv) {
        local_pinv = pseudoinverse(state.unembedding);
        u_pinv = &local_pinv;
    }
    std::vector<EditRecord> records;
    for (const auto& ut : target.unlearn_tokens) {
        auto rec = unlearn_token(state, target.prompt_for_position(ut.pos), ut.id, config, u_pinv);
        rec.target_id = target.target_id;
        rec.token_pos = ut.pos;
        records.push_back(std::move(rec));
    }
    return records;
}

namespace {

json to_json(const EditRecord& r) {
    json layers = json::array();
    for (const auto& l : r.layers) {
        json neurons = json::array();
        for (const auto& n : l.neurons)
            neurons.push_back({{"layer", n.neuron.layer},
                               {"column", n.neuron.column},
                               {"iterations", n.iterations},
                               {"initial_rank", n.initial_rank},
                               {"final_rank", n.final_rank},
                               {"final_logit", n.final_logit},
                               {"budget_exhausted", n.budget_exhausted},
                               {"logit_trajectory", n.logit_trajectory}});
        layers.push_back({{"layer", l.layer},
                          {"selected", l.selected},
                          {"initial_rank", l.initial_rank},
                          {"final_rank", l.final_rank},
                          {"n_max_reached", l.n_max_reached},
                          {"neurons", neurons}});
    }
    return {{"target_id", r.target_id}, {"token", r.token},   {"token_pos", r.token_pos},
            {"prompt", r.prompt},       {"layers", layers},   {"budget_exhausted", r.budget_exhausted}};
}

EditRecord from_json(const json& j) {
    EditRecord r;
    r.target_id = j.at("target_id").get<std::string>();
    r.token = j.at("token").get<TokenId>();
    r.token_pos = j.at("token_pos").get<std::size_t>();
    r.prompt = j.at("prompt").get<std::vector<TokenId>>();
    r.budget_exhausted = j.at("budget_exhausted").get<bool>();
    for (const auto& lj : j.at("layers")) {
        LayerEdit l;
        l.layer = lj.at("layer").get<std::size_t>();
        l.selected = lj.at("selected").get<bool>();
        l.initial_rank = lj.at("initial_rank").get<Rank>();
        l.final_rank = lj.at("final_rank").get<Rank>();
        l.n_max_reached = lj.at("n_max_reached").get<bool>();
        for (const auto& nj : lj.at("neurons")) {
            NeuronEdit n;
            n.neuron = {nj.at("layer").get<std::size_t>(), nj.at("column").get<std::size_t>()};
            n.iterations = nj.at("iterations").get<std::size_t>();
            n.initial_rank = nj.at("initial_rank").get<Rank>();
            n.final_rank = nj.at("final_rank").get<Rank>();
            n.final_logit = nj.at("final_logit").get<double>();
            n.budget_exhausted = nj.at("budget_exhausted").get<bool>();
            n.logit_trajectory = nj.at("logit_trajectory").get<std::vector<double>>();
            l.neurons.push_back(std::move(n));
        }
        r.layers.push_back(std::move(l));
    }
    return r;
}

}  // namespace

std::string edit_records_to_json(const std::vector<EditRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) arr.push_back(to_json(r));
    return arr.dump(2) + "\n";
}

std::vector<EditRecord> edit_records_from_json(const std::string& text) {
    std::vector<EditRecord> out;
    try {
        for (const auto& j : json::parse(text)) out.push_back(from_json(j));
    } catch (const json::exception& e) {
        fail(ErrorKind::data, std::string("edit records: ") + e.what());
    }
    return out;
}

}  // namespace revs
