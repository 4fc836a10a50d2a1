// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero when any of them fails.
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include "revs/checkpoint.hpp"
#include "revs/engine.hpp"
#include "revs/io.hpp"
#include "revs/linalg.hpp"
#include "revs/metrics.hpp"
#include "revs/pipeline.hpp"
#include "revs/rng.hpp"
#include "revs/trainer.hpp"

using namespace revs;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int g_failures = 0;

void verdict(int id, bool ok, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

/// Runs a criterion body, turning an escaping exception into a failure line.
void criterion(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        verdict(id, false, std::string("threw: ") + e.what());
    }
}

std::string text(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

json read_json(const std::string& path) { return json::parse(read_text_file(path)); }

std::string fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("revs_acceptance_" + name);
    std::filesystem::remove_all(dir);
    return dir.string();
}

constexpr Stage kAll[] = {Stage::gen_data, Stage::train,  Stage::check_mem, Stage::unlearn,
                          Stage::evaluate, Stage::attack, Stage::report};

struct Run {
    ExperimentConfig config;
    std::string dir;
    double setup_seconds = 0.0;  // gen-data + train
    double total_seconds = 0.0;
};

Run full_run(const std::string& name) {
    Run r;
    r.dir = fresh_dir(name);
    r.config.run_dir = r.dir;
    const auto t0 = Clock::now();
    for (Stage s : kAll) {
        run_stage(s, r.config);
        if (s == Stage::train) r.setup_seconds = seconds_since(t0);
    }
    r.total_seconds = seconds_since(t0);
    return r;
}

std::string split_path(const Run& r, std::uint64_t seed, const std::string& file) {
    return r.dir + "/" + run_paths::split_dir(seed) + "/" + file;
}

// Worst entry across the four Penrose conditions.
double penrose_error(const Matrix& a) {
    const Matrix p = pseudoinverse(a);
    const Matrix ap = matmul(a, p), pa = matmul(p, a);
    double worst = max_abs_diff(matmul(ap, a), a);
    worst = std::max(worst, max_abs_diff(matmul(pa, p), p));
    worst = std::max(worst, max_abs_diff(ap.transposed(), ap));
    worst = std::max(worst, max_abs_diff(pa.transposed(), pa));
    return worst;
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::warn);
    const Run run = full_run("a");
    const ExperimentConfig& cfg = run.config;
    const SyntheticDataset ds = load_dataset(run.dir + "/" + run_paths::dataset);
    const ModelState pre = load_checkpoint(run.dir + "/" + run_paths::checkpoint);
    const std::size_t k = cfg.metrics.k;
    const RevsConfig revs = cfg.revs.resolve(pre.config.vocab_size);

    criterion(1, [&] {
        const auto t0 = Clock::now();
        const auto pool = ds.targets_in(TargetSplit::forget);
        bool exact = true;
        for (const auto* t : pool) exact = exact && efficacy_at_k(pre, *t, k) == 1.0 / static_cast<double>(k);
        std::vector<const TargetSpec*> all;
        for (const auto& t : ds.targets) all.push_back(&t);
        const double spec = specificity(pre, all);
        const double secs = run.setup_seconds + seconds_since(t0);
        verdict(1, exact && spec == 1.0 && secs <= 300,
                text("unedited efficacy@%zu %s 1/k on all %zu targets, specificity %.3f, %.0fs with training", k,
                    exact ? "==" : "!=", pool.size(), spec, secs));
    });

    criterion(2, [&] {
        bool ok = run.total_seconds <= 600;
        std::string detail;
        for (std::uint64_t seed : cfg.metrics.splits) {
            const auto post = read_json(split_path(run, seed, "eval.json")).at("post");
            const double e = post.at("efficacy"), g = post.at("generalization"), s = post.at("specificity");
            ok = ok && e >= 0.90 && g >= 0.70 && s >= 0.70;
            detail += text(" split %llu eff %.3f gen %.3f spec %.3f;", static_cast<unsigned long long>(seed), e, g, s);
        }
        verdict(2, ok, "after unlearning" + detail + text(" pipeline %.0fs", run.total_seconds));
    });

    criterion(3, [&] {
        bool ok = true;
        std::string detail;
        for (std::uint64_t seed : cfg.metrics.splits) {
            const auto attack = read_json(split_path(run, seed, "attack.json"));
            const double rs = attack.at("post").at("resistance_score");
            ok = ok && rs >= 0.85;
            detail += text(" split %llu RS %.3f;", static_cast<unsigned long long>(seed), rs);
            for (const char* phase : {"pre", "post"}) {
                for (const auto& t : attack.at(phase).at("attacks").at("LLA").at("targets")) {
                    double final_term = 0.0;
                    for (const auto& ranks : t.at("effective_ranks"))
                        final_term = std::max(final_term, score_at_k(ranks.back().get<Rank>(), k));
                    ok = ok && t.at("resistance").get<double>() <= final_term;
                }
            }
        }
        verdict(3, ok, "post resistance score >= 0.85 and LLA <= final-layer term:" + detail);
    });

    criterion(4, [&] {
        const Matrix u_pinv = pseudoinverse(pre.unembedding);
        Rng rng(2024);
        const std::size_t n = 200;
        std::size_t converged = 0, flagged = 0, law_ok = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t layer = rng.uniform_index(pre.config.n_layers);
            const std::size_t col = rng.uniform_index(pre.config.d_ff);
            const auto token = static_cast<TokenId>(rng.uniform_index(pre.config.vocab_size));
            const auto res =
                edit_neuron(pre.blocks[layer].ff2.column(col), token, revs, pre.unembedding, u_pinv, {layer, col});
            const Rank d = res.final_rank > *revs.r_n ? res.final_rank - *revs.r_n : *revs.r_n - res.final_rank;
            if (d <= *revs.eps_rn) ++converged;
            else if (res.budget_exhausted) ++flagged;
            bool law = res.logit_trajectory.empty() || res.logit_trajectory.front() == revs.init_logit;
            for (std::size_t j = 1; j < res.logit_trajectory.size(); ++j) {
                const double prev = res.logit_trajectory[j - 1], cur = res.logit_trajectory[j];
                law = law && (cur == prev * revs.grow_factor || cur == prev * revs.shrink_factor);
            }
            law_ok += law;
        }
        // The worked example: a token that stays prominent grows -10, -13, -16.9.
        const Matrix eye = Matrix::identity(8);
        Vector neuron(8, -1000.0);
        neuron[3] = 5.0;
        RevsConfig small = revs;
        small.r_n = 6;
        small.eps_rn = 1;
        small.max_edit_iters = 3;
        const auto ex = edit_neuron(neuron, 3, small, eye, eye);
        const bool example = ex.logit_trajectory.size() == 3 && ex.logit_trajectory[0] == -10.0 &&
                             std::abs(ex.logit_trajectory[1] + 13.0) < 1e-12 &&
                             std::abs(ex.logit_trajectory[2] + 16.9) < 1e-12;
        verdict(4, converged * 100 >= 95 * n && converged + flagged == n && law_ok == n && example,
                text("%zu/%zu edits within eps_rn of r_n=%zu, %zu flagged, l_t law held on %zu, example %s", converged,
                    n, *revs.r_n, flagged, law_ok, example ? "-10,-13,-16.9" : "wrong"));
    });

    criterion(5, [&] {
        double worst = 0.0;
        const std::pair<std::size_t, std::size_t> shapes[] = {{16, 4}, {200, 50}, {1024, 64}, {2048, 128}};
        std::uint64_t seed = 1;
        for (auto [r, c] : shapes) {
            Rng rng(seed++);
            Matrix a(r, c);
            for (double& x : a.data()) x = rng.normal();
            worst = std::max(worst, penrose_error(a));
        }
        double ckpt = max_abs_diff(matmul(pseudoinverse(pre.unembedding), pre.unembedding),
                                   Matrix::identity(pre.config.d_model));
        for (std::uint64_t s : cfg.metrics.splits) {
            const ModelState post = load_checkpoint(split_path(run, s, "checkpoint"));
            ckpt = std::max(ckpt, max_abs_diff(matmul(pseudoinverse(post.unembedding), post.unembedding),
                                               Matrix::identity(post.config.d_model)));
        }
        verdict(5, worst <= 1e-6 && ckpt <= 1e-6,
                text("Penrose identities worst %.2e up to 2048x128; U+U = I on every checkpoint within %.2e", worst,
                    ckpt));
    });

    criterion(6, [&] {
        ModelConfig mc;
        mc.vocab_size = 11;
        mc.d_model = 4;
        mc.d_ff = 6;
        mc.n_layers = 1;
        mc.n_heads = 2;
        mc.context_len = 8;
        ModelState s = ModelState::zeros(mc);
        Rng rng(21);
        for (auto& t : s.tensors())
            for (double& v : t.values) v = rng.normal() * 0.5 + (t.name.ends_with(".gain") ? 1.0 : 0.0);
        const std::vector<TokenId> tokens{1, 4, 9, 4, 10, 3};
        auto loss = [&] {
            ModelState g = ModelState::zeros(mc);
            return sequence_loss_and_gradient(s, tokens, g);
        };
        ModelState grad = ModelState::zeros(mc);
        sequence_loss_and_gradient(s, tokens, grad);
        const auto analytic = grad.tensors();
        auto params = s.tensors();
        double worst = 0.0;
        std::string worst_name;
        for (std::size_t b = 0; b < params.size(); ++b) {
            double diff2 = 0.0, norm2 = 0.0;
            for (std::size_t i = 0; i < params[b].values.size(); ++i) {
                double& p = params[b].values[i];
                const double saved = p, h = 1e-5;
                p = saved + h;
                const double up = loss();
                p = saved - h;
                const double down = loss();
                p = saved;
                const double numeric = (up - down) / (2 * h);
                diff2 += std::pow(analytic[b].values[i] - numeric, 2);
                norm2 += numeric * numeric;
            }
            const double rel = std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-12);
            if (rel >= worst) worst = rel, worst_name = params[b].name;
        }
        verdict(6, worst <= 1e-3,
                text("worst relative gradient error %.2e over %zu blocks (%s)", worst, params.size(),
                    worst_name.c_str()));
    });

    criterion(7, [&] {
        bool ok = true;
        std::size_t changed_total = 0, named_total = 0;
        for (std::uint64_t seed : cfg.metrics.splits) {
            const ModelState post = load_checkpoint(split_path(run, seed, "checkpoint"));
            std::set<NeuronRef> named;
            const auto records =
                edit_records_from_json(read_json(split_path(run, seed, "edits.json")).at("records").dump());
            for (const auto& r : records)
                for (const auto& l : r.layers)
                    for (const auto& n : l.neurons) named.insert(n.neuron);
            named_total += named.size();
            const auto a = pre.tensors();
            const auto b = post.tensors();
            for (std::size_t i = 0; i < a.size(); ++i)
                if (!a[i].name.ends_with("mlp.ff2")) ok = ok && std::ranges::equal(a[i].values, b[i].values);
            for (std::size_t l = 0; l < pre.config.n_layers; ++l) {
                for (std::size_t j = 0; j < pre.config.d_ff; ++j) {
                    if (pre.blocks[l].ff2.column(j) == post.blocks[l].ff2.column(j)) continue;
                    ++changed_total;
                    ok = ok && named.contains({l, j});
                }
            }
        }
        verdict(7, ok,
                text("%zu changed FF2 columns across splits, all among %zu recorded; no other tensor moved",
                    changed_total, named_total));
    });

    criterion(8, [&] {
        double hybrid = 0.0, rank = 0.0, random = 0.0;
        for (std::uint64_t seed : cfg.metrics.splits) {
            hybrid += read_json(split_path(run, seed, "eval.json")).at("post").at("unlearning_score").get<double>();
            const SplitAssignment split = assign_split(ds, seed, cfg.forget_count);
            for (auto [strategy, sum] : {std::pair{NeuronStrategy::rank, &rank}, {NeuronStrategy::random, &random}}) {
                RevsConfig c = cfg.revs;
                c.neuron_strategy = strategy;
                ModelState s = pre;
                unlearn_targets(s, split.forget, c);
                *sum += evaluate_split(s, split.forget, split.retain, k).unlearning_score;
            }
        }
        const double n = static_cast<double>(cfg.metrics.splits.size());
        hybrid /= n, rank /= n, random /= n;
        verdict(8, hybrid >= random && hybrid >= rank,
                text("mean unlearning score: hybrid %.3f, rank-only %.3f, random %.3f", hybrid, rank, random));
    });

    criterion(9, [&] {
        const Run again = full_run("b");
        std::vector<std::string> files{run_paths::report_json, run_paths::report_csv,
                                       std::string(run_paths::checkpoint) + "/manifest.json",
                                       std::string(run_paths::checkpoint) + "/tensors.bin"};
        for (std::uint64_t s : cfg.metrics.splits)
            for (const char* f : {"edits.json", "eval.json", "attack.json", "checkpoint/manifest.json",
                                  "checkpoint/tensors.bin"})
                files.push_back(run_paths::split_dir(s) + "/" + f);
        std::size_t same = 0;
        for (const auto& f : files) same += sha256_file(run.dir + "/" + f) == sha256_file(again.dir + "/" + f);
        verdict(9, same == files.size(),
                text("%zu/%zu report and checkpoint files byte-identical across two runs", same, files.size()));
    });

    std::printf("%d criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
