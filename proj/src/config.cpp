#include "revs/config.hpp"

#include <set>

#include <nlohmann/json.hpp>
#include "revs/checkpoint.hpp"
#include "revs/io.hpp"

namespace revs {

using nlohmann::json;

namespace {

/// Reads an object field by field and rejects anything it was not asked about.
class StrictObject {
public:
    StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        require(j_.is_object(), ErrorKind::config, where() + " must be an object");
    }

    void get(const char* key, std::size_t& out) {
        if (const json* v = take(key)) {
            require(v->is_number_unsigned(), ErrorKind::config, where(key) + " must be a non-negative integer");
            out = v->get<std::size_t>();
        }
    }
    void get(const char* key, double& out) {
        if (const json* v = take(key)) {
            require(v->is_number(), ErrorKind::config, where(key) + " must be a number");
            out = v->get<double>();
        }
    }
    void get(const char* key, bool& out) {
        if (const json* v = take(key)) {
            require(v->is_boolean(), ErrorKind::config, where(key) + " must be a boolean");
            out = v->get<bool>();
        }
    }
    void get(const char* key, std::string& out) {
        if (const json* v = take(key)) {
            require(v->is_string(), ErrorKind::config, where(key) + " must be a string");
            out = v->get<std::string>();
        }
    }
    /// Unsigned integer or null.
    void get(const char* key, std::optional<Rank>& out) {
        if (const json* v = take(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            require(v->is_number_unsigned(), ErrorKind::config, where(key) + " must be a non-negative integer or null");
            out = v->get<Rank>();
        }
    }
    void get(const char* key, std::vector<std::uint64_t>& out) {
        if (const json* v = take(key)) {
            require(v->is_array(), ErrorKind::config, where(key) + " must be an array");
            out.clear();
            for (const auto& e : *v) {
                require(e.is_number_unsigned(), ErrorKind::config, where(key) + " entries must be non-negative integers");
                out.push_back(e.get<std::uint64_t>());
            }
        }
    }
    const json* sub(const char* key) { return take(key); }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            require(seen_.contains(k), ErrorKind::config, "unknown config field '" + where(k.c_str()) + "'");
    }

private:
    const json* take(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }
    std::string where() const { return path_.empty() ? "config" : path_; }
    std::string where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

json parse(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::config, std::string(what) + ": " + e.what());
    }
}

json opt(const std::optional<Rank>& v) { return v ? json(*v) : json(nullptr); }

json to_j(const DatasetConfig& c) {
    return json{{"n_targets", c.n_targets},
                {"prefixes_per_target", c.prefixes_per_target},
                {"n_retain_sentences", c.n_retain_sentences},
                {"unlearn_token_count", c.unlearn_token_count},
                {"token_strategy", to_string(c.token_strategy)}};
}

DatasetConfig dataset_from(const json& j, const std::string& path) {
    DatasetConfig c;
    StrictObject o(j, path);
    o.get("n_targets", c.n_targets);
    o.get("prefixes_per_target", c.prefixes_per_target);
    o.get("n_retain_sentences", c.n_retain_sentences);
    o.get("unlearn_token_count", c.unlearn_token_count);
    std::string strategy = to_string(c.token_strategy);
    o.get("token_strategy", strategy);
    o.finish();
    try {
        c.token_strategy = parse_token_strategy(strategy);
    } catch (const Error& e) {
        fail(ErrorKind::config, e.what());
    }
    return c;
}

json to_j(const TrainerConfig& c) {
    return json{{"learning_rate", c.learning_rate}, {"beta1", c.beta1},
                {"beta2", c.beta2},                 {"adam_eps", c.adam_eps},
                {"grad_clip", c.grad_clip},         {"init_std", c.init_std},
                {"batch_size", c.batch_size},       {"max_epochs", c.max_epochs},
                {"min_epochs", c.min_epochs},       {"check_every", c.check_every},
                {"seed", c.seed}};
}

TrainerConfig trainer_from(const json& j, const std::string& path) {
    TrainerConfig c;
    StrictObject o(j, path);
    o.get("learning_rate", c.learning_rate);
    o.get("beta1", c.beta1);
    o.get("beta2", c.beta2);
    o.get("adam_eps", c.adam_eps);
    o.get("grad_clip", c.grad_clip);
    o.get("init_std", c.init_std);
    o.get("batch_size", c.batch_size);
    o.get("max_epochs", c.max_epochs);
    o.get("min_epochs", c.min_epochs);
    o.get("check_every", c.check_every);
    std::size_t seed = c.seed;
    o.get("seed", seed);
    c.seed = seed;
    o.finish();
    return c;
}

json to_j(const RevsConfig& c) {
    return json{{"r_d", opt(c.r_d)},
                {"eps_rd", opt(c.eps_rd)},
                {"r_n", opt(c.r_n)},
                {"eps_rn", opt(c.eps_rn)},
                {"r_d_fraction", c.r_d_fraction},
                {"eps_rd_fraction", c.eps_rd_fraction},
                {"r_n_fraction", c.r_n_fraction},
                {"eps_rn_fraction", c.eps_rn_fraction},
                {"n_max", c.n_max},
                {"act_top_k", c.act_top_k},
                {"grow_factor", c.grow_factor},
                {"shrink_factor", c.shrink_factor},
                {"init_logit", c.init_logit},
                {"max_edit_iters", c.max_edit_iters},
                {"neuron_strategy", to_string(c.neuron_strategy)},
                {"seed", c.seed}};
}

RevsConfig revs_from(const json& j, const std::string& path) {
    RevsConfig c;
    StrictObject o(j, path);
    o.get("r_d", c.r_d);
    o.get("eps_rd", c.eps_rd);
    o.get("r_n", c.r_n);
    o.get("eps_rn", c.eps_rn);
    o.get("r_d_fraction", c.r_d_fraction);
    o.get("eps_rd_fraction", c.eps_rd_fraction);
    o.get("r_n_fraction", c.r_n_fraction);
    o.get("eps_rn_fraction", c.eps_rn_fraction);
    o.get("n_max", c.n_max);
    o.get("act_top_k", c.act_top_k);
    o.get("grow_factor", c.grow_factor);
    o.get("shrink_factor", c.shrink_factor);
    o.get("init_logit", c.init_logit);
    o.get("max_edit_iters", c.max_edit_iters);
    std::string strategy = to_string(c.neuron_strategy);
    o.get("neuron_strategy", strategy);
    std::size_t seed = c.seed;
    o.get("seed", seed);
    c.seed = seed;
    o.finish();
    try {
        c.neuron_strategy = parse_neuron_strategy(strategy);
    } catch (const Error& e) {
        fail(ErrorKind::config, e.what());
    }
    return c;
}

json to_j(const MetricConfig& c) { return json{{"k", c.k}, {"splits", c.splits}}; }

MetricConfig metrics_from(const json& j, const std::string& path) {
    MetricConfig c;
    StrictObject o(j, path);
    o.get("k", c.k);
    o.get("splits", c.splits);
    o.finish();
    return c;
}

json to_j(const PerturbationSpec& c) {
    return json{{"insert_char", c.insert_char},
                {"n_insertions", c.n_insertions},
                {"insert_after_prompt", c.insert_after_prompt},
                {"seed", c.seed},
                {"samples", c.samples}};
}

PerturbationSpec perturbation_from(const json& j, const std::string& path) {
    PerturbationSpec c;
    StrictObject o(j, path);
    o.get("insert_char", c.insert_char);
    o.get("n_insertions", c.n_insertions);
    o.get("insert_after_prompt", c.insert_after_prompt);
    std::size_t seed = c.seed;
    o.get("seed", seed);
    c.seed = seed;
    o.get("samples", c.samples);
    o.finish();
    return c;
}

json experiment_json(const ExperimentConfig& c, bool with_paths) {
    json j{{"dataset", to_j(c.dataset)},
           {"dataset_seed", c.dataset_seed},
           {"model_seed", c.model_seed},
           {"model", json::parse(model_config_to_json(c.model))},
           {"trainer", to_j(c.trainer)},
           {"revs", to_j(c.revs)},
           {"metrics", to_j(c.metrics)},
           {"perturbation", to_j(c.perturbation)},
           {"forget_count", c.forget_count}};
    if (with_paths) j["paths"] = json{{"run_dir", c.run_dir}};
    return j;
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
    // Rare number tokens barely move away from their initial unembedding rows
    // during training. A wider model with a larger init keeps those rows far
    // enough apart that demoting one secret digit leaves its neighbours alone.
    model.d_model = 128;
    trainer.init_std = 0.06;
    trainer.learning_rate = 1.5e-3;
    trainer.batch_size = 4;
    trainer.check_every = 1;
    revs.r_d_fraction = 0.03;
    revs.r_n_fraction = 0.9;
    revs.n_max = 16;
    revs.act_top_k = 16;
}

void ExperimentConfig::validate() const {
    dataset.validate();
    trainer.validate();
    perturbation.validate();
    require(!run_dir.empty(), ErrorKind::config, "paths.run_dir must not be empty");
    require(forget_count > 0 && forget_count < dataset.n_targets, ErrorKind::config,
            "forget_count must lie in [1, dataset.n_targets)");
    require(!metrics.splits.empty(), ErrorKind::config, "metrics.splits must not be empty");
    ModelConfig m = model;
    if (m.vocab_size == 0) m.vocab_size = m.d_model;  // checked for real once the dataset exists
    m.validate();
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
    return experiment_json(config, true).dump(2) + "\n";
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    const json j = parse(text, "experiment config");
    ExperimentConfig c;
    StrictObject o(j, "");
    if (const json* v = o.sub("dataset")) c.dataset = dataset_from(*v, "dataset");
    o.get("dataset_seed", c.dataset_seed);
    o.get("model_seed", c.model_seed);
    if (const json* v = o.sub("model")) {
        // Missing model keys keep the experiment defaults, not ModelConfig's.
        json merged = json::parse(model_config_to_json(c.model));
        require(v->is_object(), ErrorKind::config, "model must be an object");
        for (const auto& [k, val] : v->items()) merged[k] = val;
        c.model = model_config_from_json(merged.dump());
    }
    if (const json* v = o.sub("trainer")) c.trainer = trainer_from(*v, "trainer");
    if (const json* v = o.sub("revs")) {
        // Same merge rule for the REVS block.
        json merged = to_j(c.revs);
        require(v->is_object(), ErrorKind::config, "revs must be an object");
        for (const auto& [k, val] : v->items()) merged[k] = val;
        c.revs = revs_from(merged, "revs");
    }
    if (const json* v = o.sub("metrics")) c.metrics = metrics_from(*v, "metrics");
    if (const json* v = o.sub("perturbation")) c.perturbation = perturbation_from(*v, "perturbation");
    o.get("forget_count", c.forget_count);
    if (const json* v = o.sub("paths")) {
        StrictObject p(*v, "paths");
        p.get("run_dir", c.run_dir);
        p.finish();
    }
    o.finish();
    c.validate();
    return c;
}

std::string config_digest(const ExperimentConfig& config) {
    return sha256_hex(experiment_json(config, false).dump());
}

std::string dataset_config_to_json(const DatasetConfig& c) { return to_j(c).dump(2) + "\n"; }
DatasetConfig dataset_config_from_json(const std::string& text) {
    DatasetConfig c = dataset_from(parse(text, "dataset config"), "dataset");
    c.validate();
    return c;
}
std::string trainer_config_to_json(const TrainerConfig& c) { return to_j(c).dump(2) + "\n"; }
TrainerConfig trainer_config_from_json(const std::string& text) {
    TrainerConfig c = trainer_from(parse(text, "trainer config"), "trainer");
    c.validate();
    return c;
}
std::string revs_config_to_json(const RevsConfig& c) { return to_j(c).dump(2) + "\n"; }
RevsConfig revs_config_from_json(const std::string& text) { return revs_from(parse(text, "revs config"), "revs"); }
std::string perturbation_spec_to_json(const PerturbationSpec& c) { return to_j(c).dump(2) + "\n"; }
PerturbationSpec perturbation_spec_from_json(const std::string& text) {
    PerturbationSpec c = perturbation_from(parse(text, "perturbation spec"), "perturbation");
    c.validate();
    return c;
}

}  // namespace revs
