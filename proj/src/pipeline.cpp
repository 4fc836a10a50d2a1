#include "revs/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include <nlohmann/json.hpp>
#include "revs/checkpoint.hpp"
#include "revs/io.hpp"
#include "revs/linalg.hpp"
#include "revs/rng.hpp"

#ifndef REVS_VERSION
#define REVS_VERSION "0.0.0"
#endif

namespace revs {

using nlohmann::json;
namespace fs = std::filesystem;

const char* tool_version() { return REVS_VERSION; }

namespace {

constexpr std::pair<Stage, const char*> kStageNames[] = {
    {Stage::gen_data, "gen-data"}, {Stage::train, "train"},   {Stage::check_mem, "check-mem"},
    {Stage::unlearn, "unlearn"},   {Stage::evaluate, "evaluate"}, {Stage::attack, "attack"},
    {Stage::report, "report"},
};

}  // namespace

const char* to_string(Stage stage) {
    for (const auto& [s, name] : kStageNames)
        if (s == stage) return name;
    return "unknown";
}

Stage parse_stage(std::string_view name) {
    for (const auto& [s, n] : kStageNames)
        if (name == n) return s;
    fail(ErrorKind::config, "unknown stage '" + std::string(name) + "'");
}

std::string run_paths::split_dir(std::uint64_t seed) { return "splits/" + std::to_string(seed); }

std::string run_manifest_to_json(const RunManifest& m) {
    json stages = json::object();
    for (const auto& [name, s] : m.stages)
        stages[name] = {{"started_at", s.started_at},
                        {"finished_at", s.finished_at},
                        {"inputs", s.inputs},
                        {"outputs", s.outputs}};
    return json{{"config_digest", m.config_digest},
                {"tool_version", m.tool_version},
                {"stages", stages},
                {"artifacts", m.artifacts}}
               .dump(2) +
           "\n";
}

RunManifest run_manifest_from_json(const std::string& text) {
    RunManifest m;
    try {
        const json j = json::parse(text);
        m.config_digest = j.at("config_digest").get<std::string>();
        m.tool_version = j.at("tool_version").get<std::string>();
        for (const auto& [name, s] : j.at("stages").items()) {
            StageRecord r;
            r.started_at = s.at("started_at").get<std::string>();
            r.finished_at = s.at("finished_at").get<std::string>();
            r.inputs = s.at("inputs").get<std::vector<std::string>>();
            r.outputs = s.at("outputs").get<std::vector<std::string>>();
            m.stages[name] = std::move(r);
        }
        m.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    } catch (const json::exception& e) {
        fail(ErrorKind::data, std::string("run manifest: ") + e.what());
    }
    return m;
}

SplitAssignment assign_split(const SyntheticDataset& dataset, std::uint64_t seed, std::size_t forget_count) {
    SplitAssignment a;
    a.seed = seed;
    std::vector<const TargetSpec*> pool = dataset.targets_in(TargetSplit::forget);
    require(forget_count > 0 && forget_count < pool.size(), ErrorKind::config,
            "forget_count " + std::to_string(forget_count) + " must leave at least one held-out target out of " +
                std::to_string(pool.size()));
    Rng rng(seed);
    rng.shuffle(std::span(pool));
    a.forget.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(forget_count));
    a.retain.assign(pool.begin() + static_cast<std::ptrdiff_t>(forget_count), pool.end());
    a.retain_pool = dataset.targets_in(TargetSplit::retain);
    return a;
}

ModelConfig resolve_model_config(const ExperimentConfig& config, const SyntheticDataset& dataset) {
    ModelConfig m = config.model;
    const std::size_t v = dataset.vocabulary.size();
    if (m.vocab_size == 0) m.vocab_size = v;
    require(m.vocab_size == v, ErrorKind::config,
            "model.vocab_size " + std::to_string(m.vocab_size) + " does not match the dataset vocabulary " +
                std::to_string(v));
    m.validate();
    return m;
}

std::vector<EditRecord> unlearn_targets(ModelState& state, std::span<const TargetSpec* const> forget,
                                        const RevsConfig& config) {
    const Matrix u_pinv = pseudoinverse(state.unembedding);
    std::vector<EditRecord> records;
    for (const TargetSpec* t : forget) {
        auto r = unlearn_target(state, *t, config, &u_pinv);
        spdlog::debug("unlearned {}: {} neuron edits", t->target_id,
                      std::accumulate(r.begin(), r.end(), std::size_t{0},
                                      [](std::size_t n, const EditRecord& e) { return n + e.neurons_edited(); }));
        records.insert(records.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
    }
    return records;
}

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

/// Everything a stage needs to resolve paths and keep the manifest honest.
class RunContext {
public:
    RunContext(const ExperimentConfig& config, Stage stage) : config_(config), stage_(stage) {
        root_ = fs::path(config.run_dir);
        digest_ = config_digest(config);
        const fs::path mpath = root_ / run_paths::manifest;
        if (fs::exists(mpath)) {
            manifest_ = run_manifest_from_json(read_text_file(mpath.string()));
            require(manifest_.config_digest == digest_, ErrorKind::digest_mismatch,
                    "run directory " + root_.string() + " was produced by config " + manifest_.config_digest +
                        ", current config is " + digest_);
        } else {
            manifest_.config_digest = digest_;
        }
        manifest_.tool_version = tool_version();
        record_.started_at = utc_now();
    }

    const std::string& digest() const { return digest_; }
    std::string path(const std::string& rel) const { return (root_ / rel).string(); }

    /// Checks a file (or every file under a directory) against the manifest.
    void input(const std::string& rel) {
        const fs::path p = root_ / rel;
        require(fs::exists(p), ErrorKind::missing_artifact,
                std::string(to_string(stage_)) + " needs " + p.string() + "; run the stage that produces it first");
        for (const std::string& f : files_under(rel)) {
            auto it = manifest_.artifacts.find(f);
            require(it != manifest_.artifacts.end(), ErrorKind::digest_mismatch,
                    f + " is not recorded in the run manifest");
            require(sha256_file(path(f)) == it->second, ErrorKind::digest_mismatch,
                    f + " changed since it was recorded in the run manifest");
            record_.inputs.push_back(f);
        }
    }

    void output(const std::string& rel) {
        for (const std::string& f : files_under(rel)) {
            manifest_.artifacts[f] = sha256_file(path(f));
            record_.outputs.push_back(f);
        }
    }

    void prepare_dir(const std::string& rel) const { fs::create_directories(root_ / rel); }

    void write(const std::string& rel, const std::string& text) {
        fs::create_directories((root_ / rel).parent_path());
        write_text_file(path(rel), text);
        output(rel);
    }

    void commit() {
        record_.finished_at = utc_now();
        std::sort(record_.inputs.begin(), record_.inputs.end());
        std::sort(record_.outputs.begin(), record_.outputs.end());
        manifest_.stages[to_string(stage_)] = record_;
        fs::create_directories(root_);
        write_text_file(path(run_paths::manifest), run_manifest_to_json(manifest_));
    }

private:
    std::vector<std::string> files_under(const std::string& rel) const {
        const fs::path p = root_ / rel;
        if (!fs::is_directory(p)) return {rel};
        std::vector<std::string> files;
        for (const auto& e : fs::recursive_directory_iterator(p))
            if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root_).generic_string());
        std::sort(files.begin(), files.end());
        return files;
    }

    const ExperimentConfig& config_;
    Stage stage_;
    fs::path root_;
    std::string digest_;
    RunManifest manifest_;
    StageRecord record_;
};

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::data, what + ": " + e.what());
    }
}

std::vector<std::string> ids(std::span<const TargetSpec* const> targets) {
    std::vector<std::string> out;
    for (const auto* t : targets) out.push_back(t->target_id);
    return out;
}

std::string checkpoint_for(std::uint64_t seed) { return run_paths::split_dir(seed) + "/checkpoint"; }

SyntheticDataset load_run_dataset(RunContext& ctx) {
    ctx.input(run_paths::dataset);
    return load_dataset(ctx.path(run_paths::dataset));
}

ModelState load_run_checkpoint(RunContext& ctx, const std::string& rel) {
    ctx.input(rel);
    return load_checkpoint(ctx.path(rel));
}

void stage_gen_data(const ExperimentConfig& config, RunContext& ctx) {
    const SyntheticDataset ds = generate_ssn_dataset(config.dataset, config.dataset_seed);
    resolve_model_config(config, ds);
    spdlog::info("generated {} sentences, {} targets, vocabulary {}", ds.sentences.size(), ds.targets.size(),
                 ds.vocabulary.size());
    ctx.write(run_paths::config, experiment_config_to_json(config));
    ctx.write(run_paths::dataset, dataset_to_json(ds));
}

void stage_train(const ExperimentConfig& config, RunContext& ctx) {
    const SyntheticDataset ds = load_run_dataset(ctx);
    ModelState state = ModelState::initialize(resolve_model_config(config, ds), config.model_seed,
                                              config.trainer.init_std);
    json epochs = json::array();
    auto on_epoch = [&](const EpochLog& e) {
        json row{{"epoch", e.epoch}, {"loss", e.loss}};
        if (e.memorization >= 0) {
            row["memorization"] = e.memorization;
            spdlog::info("epoch {} loss {:.4f} memorized {:.3f}", e.epoch, e.loss, e.memorization);
        }
        epochs.push_back(std::move(row));
    };
    const TrainingLog log = train_to_memorize(state, ds, config.trainer, on_epoch);
    ctx.prepare_dir(run_paths::checkpoint);
    save_checkpoint(state, ctx.path(run_paths::checkpoint));
    ctx.output(run_paths::checkpoint);
    ctx.write(run_paths::training_log, json{{"config_digest", ctx.digest()},
                                            {"epochs", epochs},
                                            {"memorized", log.memorized},
                                            {"steps", log.steps},
                                            {"parameters", state.parameter_count()}}
                                           .dump(2) +
                                           "\n");
}

void stage_check_mem(const ExperimentConfig&, RunContext& ctx, const StageOptions& options) {
    const SyntheticDataset ds = load_run_dataset(ctx);
    const bool external = !options.checkpoint.empty();
    const ModelState state =
        external ? load_checkpoint(options.checkpoint) : load_run_checkpoint(ctx, run_paths::checkpoint);
    const MemorizationReport rep = check_memorization(state, ds);
    const std::set<std::string> ok(rep.memorized.begin(), rep.memorized.end());
    json targets = json::array();
    for (const auto& t : ds.targets)
        targets.push_back({{"target_id", t.target_id}, {"split", to_string(t.split)}, {"reproduced", ok.contains(t.target_id)}});
    spdlog::info("memorization fraction {:.3f}", rep.fraction());
    ctx.write(run_paths::memorization, json{{"config_digest", ctx.digest()},
                                            {"checkpoint", external ? options.checkpoint : run_paths::checkpoint},
                                            {"fraction", rep.fraction()},
                                            {"targets", targets}}
                                           .dump(2) +
                                           "\n");
}

void stage_unlearn(const ExperimentConfig& config, RunContext& ctx) {
    const SyntheticDataset ds = load_run_dataset(ctx);
    const ModelState pre = load_run_checkpoint(ctx, run_paths::checkpoint);
    for (std::uint64_t seed : config.metrics.splits) {
        const SplitAssignment split = assign_split(ds, seed, config.forget_count);
        for (const auto* t : split.forget)
            require(reproduces_secret(pre, t->prompt, t->secret), ErrorKind::contract,
                    "forget target " + t->target_id + " is not memorized by the trained checkpoint");
        ModelState state = pre;
        const auto records = unlearn_targets(state, split.forget, config.revs);
        const std::string dir = run_paths::split_dir(seed);
        ctx.write(dir + "/split.json", json{{"config_digest", ctx.digest()},
                                            {"split_seed", seed},
                                            {"forget", ids(split.forget)},
                                            {"retain", ids(split.retain)},
                                            {"retain_pool", ids(split.retain_pool)}}
                                               .dump(2) +
                                               "\n");
        ctx.write(dir + "/edits.json", json{{"config_digest", ctx.digest()},
                                            {"split_seed", seed},
                                            {"records", json::parse(edit_records_to_json(records))}}
                                               .dump(2) +
                                               "\n");
        ctx.prepare_dir(checkpoint_for(seed));
        save_checkpoint(state, ctx.path(checkpoint_for(seed)));
        ctx.output(checkpoint_for(seed));
        std::size_t edits = 0;
        for (const auto& r : records) edits += r.neurons_edited();
        spdlog::info("split {}: {} tokens unlearned with {} neuron edits", seed, records.size(), edits);
    }
}

/// Re-derives the split and checks it against what unlearn recorded.
SplitAssignment recorded_split(const SyntheticDataset& ds, const ExperimentConfig& config, std::uint64_t seed,
                               RunContext& ctx) {
    const std::string rel = run_paths::split_dir(seed) + "/split.json";
    ctx.input(rel);
    const json j = parse_json(read_text_file(ctx.path(rel)), rel);
    SplitAssignment split = assign_split(ds, seed, config.forget_count);
    require(j.at("forget").get<std::vector<std::string>>() == ids(split.forget), ErrorKind::contract,
            rel + " does not match the split this config produces");
    return split;
}

void stage_evaluate(const ExperimentConfig& config, RunContext& ctx) {
    const SyntheticDataset ds = load_run_dataset(ctx);
    const ModelState pre = load_run_checkpoint(ctx, run_paths::checkpoint);
    const std::size_t k = config.metrics.k;
    for (std::uint64_t seed : config.metrics.splits) {
        const SplitAssignment split = recorded_split(ds, config, seed, ctx);
        const ModelState post = load_run_checkpoint(ctx, checkpoint_for(seed));
        EvalReport before = evaluate_split(pre, split.forget, split.retain, k);
        EvalReport after = evaluate_split(post, split.forget, split.retain, k);
        // Specificity is only meaningful when the retain secrets were there to begin with.
        after.specificity = specificity(post, pre, split.retain);
        for (auto* r : {&before, &after}) {
            r->split_seed = seed;
            r->config_digest = ctx.digest();
        }
        spdlog::info("split {}: efficacy {:.3f} generalization {:.3f} specificity {:.3f} score {:.3f}", seed,
                     after.efficacy, after.generalization.value_or(-1), after.specificity, after.unlearning_score);
        ctx.write(run_paths::split_dir(seed) + "/eval.json",
                  json{{"config_digest", ctx.digest()},
                       {"split_seed", seed},
                       {"pre", json::parse(eval_report_to_json(before))},
                       {"post", json::parse(eval_report_to_json(after))},
                       {"retain_pool_specificity",
                        {{"pre", specificity(pre, split.retain_pool)},
                         {"post", specificity(post, pre, split.retain_pool)}}}}
                          .dump(2) +
                      "\n");
    }
}

json attacks_json(const std::vector<AttackSummary>& attacks) {
    json out = json::object();
    for (const auto& a : attacks) {
        json per = json::array();
        for (const auto& t : a.targets)
            per.push_back({{"target_id", t.target_id},
                           {"resistance", t.resistance},
                           {"skipped", t.skipped},
                           {"effective_ranks", t.effective_ranks}});
        out[a.attack] = {{"resistance", a.resistance}, {"targets", per}};
    }
    return json{{"attacks", out}, {"resistance_score", resistance_score(attacks)}};
}

void stage_attack(const ExperimentConfig& config, RunContext& ctx) {
    const SyntheticDataset ds = load_run_dataset(ctx);
    const ModelState pre = load_run_checkpoint(ctx, run_paths::checkpoint);
    for (std::uint64_t seed : config.metrics.splits) {
        const SplitAssignment split = recorded_split(ds, config, seed, ctx);
        const ModelState post = load_run_checkpoint(ctx, checkpoint_for(seed));
        const auto before = run_attacks(pre, ds.vocabulary, split.forget, config.metrics.k, config.perturbation);
        const auto after = run_attacks(post, ds.vocabulary, split.forget, config.metrics.k, config.perturbation);
        spdlog::info("split {}: resistance score {:.3f}", seed, resistance_score(after));
        ctx.write(run_paths::split_dir(seed) + "/attack.json", json{{"config_digest", ctx.digest()},
                                                                   {"split_seed", seed},
                                                                   {"pre", attacks_json(before)},
                                                                   {"post", attacks_json(after)}}
                                                                      .dump(2) +
                                                                      "\n");
    }
}

struct Stat {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation; 0 for a single split
};

Stat summarize(const std::vector<double>& xs) {
    Stat s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

void stage_report(const ExperimentConfig& config, RunContext& ctx) {
    // Column order of the consolidated table.
    const std::vector<std::string> metrics = {"efficacy", "generalization", "specificity", "unlearning_score",
                                              "retain_pool_specificity", "LLA", "DA", "PA", "resistance_score"};
    std::map<std::string, std::map<std::string, std::vector<double>>> values;  // phase -> metric -> per split
    json splits = json::array();
    for (std::uint64_t seed : config.metrics.splits) {
        const std::string dir = run_paths::split_dir(seed);
        ctx.input(dir + "/eval.json");
        ctx.input(dir + "/attack.json");
        const json ev = parse_json(read_text_file(ctx.path(dir + "/eval.json")), dir + "/eval.json");
        const json at = parse_json(read_text_file(ctx.path(dir + "/attack.json")), dir + "/attack.json");
        json row{{"split_seed", seed}};
        for (const char* phase : {"pre", "post"}) {
            const json& e = ev.at(phase);
            const json& a = at.at(phase);
            std::map<std::string, double> m;
            m["efficacy"] = e.at("efficacy").get<double>();
            m["generalization"] = e.at("generalization").is_null() ? 0.0 : e.at("generalization").get<double>();
            m["specificity"] = e.at("specificity").get<double>();
            m["unlearning_score"] = e.at("unlearning_score").get<double>();
            m["retain_pool_specificity"] = ev.at("retain_pool_specificity").at(phase).get<double>();
            for (const char* name : {"LLA", "DA", "PA"}) m[name] = a.at("attacks").at(name).at("resistance").get<double>();
            m["resistance_score"] = a.at("resistance_score").get<double>();
            json cell = json::object();
            for (const auto& name : metrics) {
                cell[name] = m.at(name);
                values[phase][name].push_back(m.at(name));
            }
            row[phase] = cell;
        }
        splits.push_back(row);
    }

    json summary = json::object();
    std::ostringstream csv;
    csv << std::setprecision(17) << "phase,row";
    for (const auto& name : metrics) csv << ',' << name;
    csv << '\n';
    for (const char* phase : {"pre", "post"}) {
        for (std::size_t i = 0; i < config.metrics.splits.size(); ++i) {
            csv << phase << ",split_" << config.metrics.splits[i];
            for (const auto& name : metrics) csv << ',' << values[phase][name][i];
            csv << '\n';
        }
        std::map<std::string, Stat> stats;
        for (const auto& name : metrics) {
            stats[name] = summarize(values[phase][name]);
            summary[phase][name] = {{"mean", stats[name].mean}, {"std", stats[name].std}};
        }
        csv << phase << ",mean";
        for (const auto& name : metrics) csv << ',' << stats[name].mean;
        csv << '\n' << phase << ",std";
        for (const auto& name : metrics) csv << ',' << stats[name].std;
        csv << '\n';
    }
    ctx.write(run_paths::report_json, json{{"config_digest", ctx.digest()},
                                           {"tool_version", tool_version()},
                                           {"k", config.metrics.k},
                                           {"splits", splits},
                                           {"summary", summary}}
                                          .dump(2) +
                                          "\n");
    ctx.write(run_paths::report_csv, csv.str());
}

}  // namespace

void run_stage(Stage stage, const ExperimentConfig& config, const StageOptions& options) {
    config.validate();
    RunContext ctx(config, stage);
    spdlog::info("stage {} in {} (config {})", to_string(stage), config.run_dir, ctx.digest().substr(0, 12));
    switch (stage) {
        case Stage::gen_data: stage_gen_data(config, ctx); break;
        case Stage::train: stage_train(config, ctx); break;
        case Stage::check_mem: stage_check_mem(config, ctx, options); break;
        case Stage::unlearn: stage_unlearn(config, ctx); break;
        case Stage::evaluate: stage_evaluate(config, ctx); break;
        case Stage::attack: stage_attack(config, ctx); break;
        case Stage::report: stage_report(config, ctx); break;
    }
    ctx.commit();
}

}  // namespace revs
