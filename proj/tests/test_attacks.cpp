#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "revs/attacks.hpp"
#include "test_support.hpp"

using namespace revs;
using revs::testing::noisy_model;
using revs::testing::tiny_world;

namespace {

// Full sort of (value, id) pairs; descending value with ties to the lower id.
std::vector<TokenId> sorted_desc(const Vector& v) {
    std::vector<TokenId> ids(v.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::sort(ids.begin(), ids.end(), [&](TokenId a, TokenId b) {
        const double x = v[static_cast<std::size_t>(a)], y = v[static_cast<std::size_t>(b)];
        return x != y ? x > y : a < b;
    });
    return ids;
}

std::set<TokenId> first_n(const std::vector<TokenId>& ids, std::size_t n) { return {ids.begin(), ids.begin() + n}; }

const TargetSpec& first_target() { return tiny_world().dataset.targets.front(); }

}  // namespace

TEST(ResistanceScore, Examples) {
    const std::vector v{0.9888, 0.9892, 1.0};
    EXPECT_NEAR(resistance_score(v), 3.0 / (1 / v[0] + 1 / v[1] + 1 / v[2]), 1e-15);
    EXPECT_NEAR(resistance_score(v), 0.9926, 5e-5);
    EXPECT_DOUBLE_EQ(resistance_score(std::vector{0.6, 0.6, 0.6}), 0.6);
    EXPECT_EQ(resistance_score(std::vector{0.0, 1.0, 1.0}), 0.0);
}

TEST(LogitLens, HalfVocabularyCoversEverything) {
    const auto& w = tiny_world();
    const auto& t = first_target();
    const std::size_t v = w.trained.config.vocab_size;
    const TokenId probe[] = {t.secret[0]};
    const CandidateSet set = logit_lens_candidates(w.trained, t.prompt, (v + 1) / 2, probe);
    for (const auto& layer : set.candidates) EXPECT_EQ(std::set<TokenId>(layer.begin(), layer.end()).size(), v);
}

TEST(LogitLens, MembershipMatchesFullSort) {
    const auto& w = tiny_world();
    const auto& t = first_target();
    const std::size_t k = 20;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const ModelState s = noisy_model(w.trained.config, seed, 0.3);
        const TokenId probe[] = {t.secret[1]};
        const CandidateSet set = logit_lens_candidates(s, t.prompt, k, probe);
        const ForwardTrace trace = forward(s, t.prompt);
        ASSERT_EQ(set.layer_count(), trace.layer_count());
        for (std::size_t l = 0; l < set.layer_count(); ++l) {
            const auto order = sorted_desc(trace.lens_logits[l]);
            std::set<TokenId> expected = first_n(order, k);
            for (std::size_t i = order.size() - k; i < order.size(); ++i) expected.insert(order[i]);
            EXPECT_EQ(std::set<TokenId>(set.candidates[l].begin(), set.candidates[l].end()), expected);
            EXPECT_LE(set.candidates[l].size(), 2 * k);
            const auto pos = static_cast<Rank>(std::find(order.begin(), order.end(), probe[0]) - order.begin());
            EXPECT_EQ(set.effective_ranks[0][l], std::min<Rank>(pos + 1, order.size() - pos));
            EXPECT_EQ(set.contains(l, probe[0]), set.effective_ranks[0][l] <= k);
        }
    }
}

TEST(LogitLens, BottomTokenHasEffectiveRankOne) {
    const auto& w = tiny_world();
    const auto& t = first_target();
    const ForwardTrace trace = forward(w.trained, t.prompt);
    const auto order = sorted_desc(trace.lens_logits.back());
    const TokenId probe[] = {order.back()};
    const CandidateSet set = logit_lens_candidates(w.trained, t.prompt, 20, probe);
    EXPECT_EQ(set.effective_ranks[0].back(), 1u);
    EXPECT_DOUBLE_EQ(attack_resistance_at_k(std::span(&set, 1), 20), 1.0 / 20);
}

TEST(Delta, MembershipMatchesFullSortAndArgmaxHasRankOne) {
    const auto& w = tiny_world();
    const auto& t = first_target();
    const std::size_t k = 15;
    for (std::uint64_t seed : {4u, 5u}) {
        const ModelState s = noisy_model(w.trained.config, seed, 0.3);
        const ForwardTrace trace = forward(s, t.prompt);
        for (std::size_t l = 0; l + 1 < trace.layer_count(); ++l) {
            Vector delta(trace.lens_logits[l].size());
            for (std::size_t i = 0; i < delta.size(); ++i)
                delta[i] = std::abs(trace.lens_logits[l + 1][i] - trace.lens_logits[l][i]);
            const auto order = sorted_desc(delta);
            const TokenId probe[] = {order.front()};
            const CandidateSet set = delta_candidates(s, t.prompt, k, probe);
            ASSERT_EQ(set.layer_count(), trace.layer_count() - 1);
            EXPECT_EQ(std::set<TokenId>(set.candidates[l].begin(), set.candidates[l].end()), first_n(order, k));
            EXPECT_EQ(set.effective_ranks[0][l], 1u);
        }
    }
}

TEST(Delta, IdenticalLayersFallBackToTieBreak) {
    // With all blocks zeroed every layer's lens is the same, so every delta is 0.
    const auto& w = tiny_world();
    ModelState s = w.trained;
    for (auto& b : s.blocks) {
        b.w_o = Matrix(b.w_o.rows(), b.w_o.cols());
        b.ff2 = Matrix(b.ff2.rows(), b.ff2.cols());
    }
    const TokenId probe[] = {7};
    const CandidateSet set = delta_candidates(s, first_target().prompt, 5, probe);
    for (const auto& c : set.candidates) EXPECT_EQ(c, (std::vector<TokenId>{0, 1, 2, 3, 4}));
    for (Rank r : set.effective_ranks[0]) EXPECT_EQ(r, 8u);
}

TEST(Perturbation, IdentityEqualsLogitLens) {
    const auto& w = tiny_world();
    const auto& t = first_target();
    PerturbationSpec spec;
    spec.n_insertions = 0;
    spec.insert_after_prompt = false;
    const TokenId probe[] = {t.secret[0]};
    const auto pa = perturbation_candidates(w.trained, w.dataset.vocabulary, w.dataset.vocabulary.decode(t.prompt),
                                            spec, 20, probe, 1);
    ASSERT_TRUE(pa);
    const CandidateSet lla = logit_lens_candidates(w.trained, t.prompt, 20, probe);
    EXPECT_EQ(pa->candidates, lla.candidates);
    EXPECT_EQ(pa->effective_ranks, lla.effective_ranks);
    EXPECT_EQ(pa->attack, AttackKind::pa);
}

TEST(Perturbation, InsertionsAreSeededAndDistinct) {
    PerturbationSpec spec;
    spec.n_insertions = 4;
    spec.insert_char = "#";
    const std::string text = "The SSN of Ann Lee is";
    const std::string a = perturb_text(text, spec, 11);
    EXPECT_EQ(a, perturb_text(text, spec, 11));
    EXPECT_EQ(a.size(), text.size() + 5);
    EXPECT_EQ(std::count(a.begin(), a.end(), '#'), 5);
    EXPECT_EQ(a.back(), '#');
    std::string stripped = a;
    std::erase(stripped, '#');
    EXPECT_EQ(stripped, text);
    // Distinct positions: no two insertions land before the same character.
    EXPECT_EQ(a.find("##"), std::string::npos);
    spec.n_insertions = 100;
    EXPECT_EQ(perturb_text("abc", spec, 1), "#a#b#c#");
}

TEST(Perturbation, OverlongPromptIsSkippedAsResisted) {
    const auto& w = tiny_world();
    PerturbationSpec spec;
    spec.n_insertions = 60;  // splits enough words to overflow the context
    const auto r = attack_target(w.trained, w.dataset.vocabulary, first_target(), AttackKind::pa, 20, spec);
    EXPECT_TRUE(r.skipped);
    EXPECT_EQ(r.resistance, 1.0);
}

TEST(Resistance, EqualsMinOverLayersOfMaxOverTokens) {
    const auto& w = tiny_world();
    const ModelState s = noisy_model(w.trained.config, 9, 0.4);
    const std::size_t k = 40;
    for (const auto& t : w.dataset.targets) {
        const auto r = attack_target(s, w.dataset.vocabulary, t, AttackKind::lla, k, PerturbationSpec{});
        double expected = 1.0;
        for (std::size_t l = 0; l < s.config.n_layers; ++l) {
            double worst = 0.0;
            for (const auto& ut : t.unlearn_tokens) {
                const ForwardTrace trace = forward(s, t.prompt_for_position(ut.pos));
                const auto order = sorted_desc(trace.lens_logits[l]);
                const auto pos = static_cast<Rank>(std::find(order.begin(), order.end(), ut.id) - order.begin());
                const Rank eff = std::min<Rank>(pos + 1, order.size() - pos);
                worst = std::max(worst, eff < k ? static_cast<double>(eff) / k : 1.0);
            }
            expected = std::min(expected, worst);
        }
        EXPECT_DOUBLE_EQ(r.resistance, expected) << t.target_id;
    }
}

TEST(Resistance, LogitLensNeverExceedsFinalLayerEfficacy) {
    const auto& w = tiny_world();
    for (const auto& t : w.dataset.targets) {
        const auto r = attack_target(w.trained, w.dataset.vocabulary, t, AttackKind::lla, 20, PerturbationSpec{});
        double final_layer = 0.0;
        for (const auto& ranks : r.effective_ranks) final_layer = std::max(final_layer, score_at_k(ranks.back(), 20));
        EXPECT_LE(r.resistance, final_layer);
    }
}

TEST(Resistance, LargerKNeverHelpsTheDefender) {
    const auto& w = tiny_world();
    const ModelState s = noisy_model(w.trained.config, 12, 0.4);
    for (AttackKind kind : {AttackKind::lla, AttackKind::da}) {
        for (const auto& t : w.dataset.targets) {
            double prev = 2.0;
            for (std::size_t k : {5u, 20u, 80u}) {
                const double r = attack_target(s, w.dataset.vocabulary, t, kind, k, PerturbationSpec{}).resistance;
                EXPECT_LE(r, prev + 1e-15);
                prev = r;
            }
        }
    }
}

TEST(RunAttacks, SeededAndAveragedAcrossTargets) {
    const auto& w = tiny_world();
    std::vector<const TargetSpec*> forget;
    for (const auto& t : w.dataset.targets) forget.push_back(&t);
    const auto a = run_attacks(w.trained, w.dataset.vocabulary, forget, 20, PerturbationSpec{});
    const auto b = run_attacks(w.trained, w.dataset.vocabulary, forget, 20, PerturbationSpec{});
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(a[i].resistance, b[i].resistance);
        double mean = 0.0;
        for (const auto& t : a[i].targets) mean += t.resistance;
        EXPECT_NEAR(a[i].resistance, mean / static_cast<double>(forget.size()), 1e-15);
    }
    EXPECT_EQ(a[0].attack, "LLA");
    // Memorized secrets sit at the top of the final layer.
    EXPECT_DOUBLE_EQ(a[0].resistance, 1.0 / 20);
}
