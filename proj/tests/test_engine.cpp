#include <gtest/gtest.h>

#include <algorithm>

#include "revs/engine.hpp"
#include "revs/linalg.hpp"
#include "revs/rng.hpp"
#include "test_support.hpp"

using namespace revs;
using revs::testing::tiny_world;

namespace {

RevsConfig explicit_ranks(Rank r_d, Rank eps_rd, Rank r_n, Rank eps_rn) {
    RevsConfig c;
    c.r_d = r_d;
    c.eps_rd = eps_rd;
    c.r_n = r_n;
    c.eps_rn = eps_rn;
    return c;
}

Matrix gaussian(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(r, c);
    for (double& x : m.data()) x = rng.normal();
    return m;
}

/// Default thresholds resolved for the tiny world, with act_top_k sized to its d_ff.
RevsConfig tiny_config() {
    RevsConfig c;
    c.r_d_fraction = 0.05;
    c.act_top_k = 16;
    c.n_max = 8;
    return c.resolve(tiny_world().trained.config.vocab_size);
}

const TargetSpec& first_forget() { return *tiny_world().dataset.targets_in(TargetSplit::forget).front(); }

}  // namespace

TEST(RevsConfig, ResolveUsesVocabularyFractions) {
    RevsConfig c;
    c.r_d_fraction = 0.05;
    const RevsConfig r = c.resolve(1000);
    EXPECT_EQ(*r.r_d, 50u);
    EXPECT_EQ(*r.eps_rd, 2u);
    EXPECT_EQ(*r.r_n, 800u);
    EXPECT_EQ(*r.eps_rn, 50u);
    c.r_d = 7;
    EXPECT_EQ(*c.resolve(1000).r_d, 7u);
}

TEST(RevsConfig, ValidationRejectsBadValues) {
    RevsConfig c = RevsConfig{}.resolve(100);
    c.act_top_k = 10;
    EXPECT_NO_THROW(c.validate(100, 64));
    EXPECT_THROW(c.validate(100, 8), Error);  // act_top_k > d_ff
    auto bad = c;
    bad.init_logit = 1.0;
    EXPECT_THROW(bad.validate(100, 64), Error);
    bad = c;
    bad.grow_factor = 0.9;
    EXPECT_THROW(bad.validate(100, 64), Error);
    bad = c;
    bad.r_n = 101;
    EXPECT_THROW(bad.validate(100, 64), Error);
    EXPECT_THROW(RevsConfig{}.validate(100, 64), Error);  // unresolved
    EXPECT_EQ(parse_neuron_strategy("rank"), NeuronStrategy::rank);
    EXPECT_THROW(parse_neuron_strategy("bogus"), Error);
}

TEST(EditNeuron, LogitLawGrowsWhileTokenStaysProminent) {
    // Square identity unembedding: the projection is exact, and with every
    // other logit far below, the token stays at rank 1 for many rounds.
    const std::size_t v = 8;
    const Matrix u = Matrix::identity(v);
    Vector n(v, -1000.0);
    n[3] = 5.0;
    RevsConfig c = explicit_ranks(2, 1, 6, 1);
    c.max_edit_iters = 5;
    const auto res = edit_neuron(n, 3, c, u, pseudoinverse(u));
    ASSERT_EQ(res.logit_trajectory.size(), 5u);
    EXPECT_EQ(res.logit_trajectory[0], -10.0);
    EXPECT_NEAR(res.logit_trajectory[1], -13.0, 1e-12);
    EXPECT_NEAR(res.logit_trajectory[2], -16.9, 1e-12);
    for (std::size_t i = 1; i < res.logit_trajectory.size(); ++i)
        EXPECT_EQ(res.logit_trajectory[i], res.logit_trajectory[i - 1] * 1.3);
    EXPECT_TRUE(res.budget_exhausted);
}

TEST(EditNeuron, LogitLawShrinksWhenTokenIsTooSuppressed) {
    const std::size_t v = 8;
    const Matrix u = Matrix::identity(v);
    Vector n(v, 1000.0);  // every other logit far above: token lands at the bottom
    RevsConfig c = explicit_ranks(2, 1, 4, 0);
    c.max_edit_iters = 4;
    const auto res = edit_neuron(n, 0, c, u, pseudoinverse(u));
    ASSERT_EQ(res.logit_trajectory.size(), 4u);
    for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(res.logit_trajectory[i], res.logit_trajectory[i - 1] * 0.8);
}

TEST(EditNeuron, AlreadySatisfiedNeuronIsReturnedUnchanged) {
    const Matrix u = gaussian(64, 8, 3);
    const Vector n{0.3, -1.0, 0.2, 0.5, -0.4, 1.1, 0.0, 0.7};
    const Vector logits = matvec(u, n);
    RevsConfig c = explicit_ranks(5, 1, 40, 2);
    // Pick the token sitting exactly at rank r_n.
    TokenId token = 0;
    for (TokenId t = 0; t < 64; ++t)
        if (rank_of_token(logits, t) == 40) token = t;
    const auto res = edit_neuron(n, token, c, u, pseudoinverse(u));
    EXPECT_EQ(res.iterations, 0u);
    EXPECT_TRUE(res.logit_trajectory.empty());
    EXPECT_EQ(res.neuron, n);
    EXPECT_EQ(res.final_rank, 40u);
    EXPECT_FALSE(res.budget_exhausted);
}

TEST(EditNeuron, ConvergesOnSeededVocabulary256) {
    const std::size_t V = 256, d = 16;
    const Matrix u = gaussian(V, d, 99);
    const Matrix p = pseudoinverse(u);
    const RevsConfig c = RevsConfig{}.resolve(V);
    Rng rng(5);
    std::size_t converged = 0, flagged = 0;
    const std::size_t trials = 200;
    for (std::size_t i = 0; i < trials; ++i) {
        Vector n(d);
        for (double& x : n) x = rng.normal();
        const auto token = static_cast<TokenId>(rng.uniform_index(V));
        const auto res = edit_neuron(n, token, c, u, p);
        // The reported rank is the rank of the returned neuron.
        EXPECT_EQ(rank_of_token(matvec(u, res.neuron), token), res.final_rank);
        const Rank dist = res.final_rank > *c.r_n ? res.final_rank - *c.r_n : *c.r_n - res.final_rank;
        if (dist <= *c.eps_rn) ++converged;
        else {
            EXPECT_TRUE(res.budget_exhausted);
            ++flagged;
        }
    }
    EXPECT_GE(converged, trials * 95 / 100);
    EXPECT_EQ(converged + flagged, trials);
}

TEST(SelectLayers, ThresholdOfOneSelectsNothing) {
    const auto& w = tiny_world();
    const auto& t = first_forget();
    const RevsConfig c = explicit_ranks(1, 1, 10, 2);
    EXPECT_TRUE(select_layers(w.trained, t.prompt, t.secret[0], c).empty());
}

TEST(SelectLayers, MemorizedTokenSelectsFinalLayerAndMatchesBruteForce) {
    const auto& w = tiny_world();
    const RevsConfig c = tiny_config();
    for (const auto& t : w.dataset.targets) {
        for (const auto& ut : t.unlearn_tokens) {
            const auto prompt = t.prompt_for_position(ut.pos);
            const ForwardTrace trace = forward(w.trained, prompt);
            const auto got = select_layers(trace, ut.id, c);
            std::vector<std::size_t> expected;
            for (std::size_t l = 0; l < trace.layer_count(); ++l) {
                // Brute force: count tokens that beat ut.id.
                const auto& lg = trace.lens_logits[l];
                Rank r = 1;
                for (std::size_t j = 0; j < lg.size(); ++j)
                    if (lg[j] > lg[ut.id] || (lg[j] == lg[ut.id] && j < static_cast<std::size_t>(ut.id))) ++r;
                if (r < *c.r_d) expected.push_back(l);
            }
            EXPECT_EQ(got, expected);
            ASSERT_FALSE(got.empty());
            EXPECT_EQ(got.back(), trace.layer_count() - 1) << t.target_id;
        }
    }
}

TEST(SelectNeurons, HybridWithFullFilterEqualsRankOrdering) {
    const auto& w = tiny_world();
    const auto& t = first_forget();
    const auto prompt = t.prompt_for_position(t.unlearn_tokens[0].pos);
    const TokenId token = t.unlearn_tokens[0].id;
    const ForwardTrace trace = forward(w.trained, prompt);
    RevsConfig hybrid = tiny_config();
    hybrid.act_top_k = w.trained.config.d_ff;
    RevsConfig rank = hybrid;
    rank.neuron_strategy = NeuronStrategy::rank;
    for (std::size_t l = 0; l < w.trained.config.n_layers; ++l)
        EXPECT_EQ(select_neurons(w.trained, trace, l, token, hybrid), select_neurons(w.trained, trace, l, token, rank));
}

TEST(SelectNeurons, HybridFirstChoiceMatchesExhaustiveScan) {
    const auto& w = tiny_world();
    const RevsConfig c = tiny_config();
    for (const auto& t : w.dataset.targets) {
        const auto prompt = t.prompt_for_position(t.unlearn_tokens[0].pos);
        const TokenId token = t.unlearn_tokens[0].id;
        const ForwardTrace trace = forward(w.trained, prompt);
        for (std::size_t l = 0; l < w.trained.config.n_layers; ++l) {
            const auto& act = trace.activations[l];
            // Activation top-k, written out: a column is in when fewer than k columns beat it.
            std::vector<std::size_t> top;
            for (std::size_t j = 0; j < act.size(); ++j) {
                std::size_t better = 0;
                for (std::size_t i = 0; i < act.size(); ++i)
                    if (act[i] > act[j] || (act[i] == act[j] && i < j)) ++better;
                if (better < c.act_top_k) top.push_back(j);
            }
            std::size_t best = top.front();
            Rank best_rank = SIZE_MAX;
            for (std::size_t j : top) {
                const Rank r = rank_of_token(matvec(w.trained.unembedding, w.trained.blocks[l].ff2.column(j)), token);
                if (r < best_rank) best_rank = r, best = j;
            }
            const auto got = select_neurons(w.trained, trace, l, token, c);
            ASSERT_EQ(got.size(), c.act_top_k);
            EXPECT_EQ(got.front().column, best);
            EXPECT_EQ(got.front().layer, l);
        }
    }
}

TEST(SelectNeurons, StrategiesAreReproducibleAndRespectExclusions) {
    const auto& w = tiny_world();
    const auto& t = first_forget();
    const auto prompt = t.prompt_for_position(t.unlearn_tokens[0].pos);
    const TokenId token = t.unlearn_tokens[0].id;
    const ForwardTrace trace = forward(w.trained, prompt);
    const std::set<std::size_t> exclude{0, 5, 7};
    for (auto s : {NeuronStrategy::hybrid, NeuronStrategy::activations, NeuronStrategy::rank, NeuronStrategy::gradient,
                   NeuronStrategy::random}) {
        RevsConfig c = tiny_config();
        c.neuron_strategy = s;
        const auto a = select_neurons(w.trained, trace, 1, token, c, prompt, exclude);
        EXPECT_EQ(a, select_neurons(w.trained, trace, 1, token, c, prompt, exclude)) << to_string(s);
        for (const auto& r : a) EXPECT_FALSE(exclude.contains(r.column)) << to_string(s);
        ASSERT_FALSE(a.empty());
    }
    RevsConfig r1 = tiny_config(), r2 = tiny_config();
    r1.neuron_strategy = r2.neuron_strategy = NeuronStrategy::random;
    r2.seed = 1;
    EXPECT_NE(select_neurons(w.trained, trace, 1, token, r1), select_neurons(w.trained, trace, 1, token, r2));
}

TEST(UnlearnToken, ThresholdOfOneLeavesStateUntouched) {
    const auto& w = tiny_world();
    ModelState s = w.trained;
    const auto& t = first_forget();
    const EditRecord rec = unlearn_token(s, t.prompt, t.secret[0], explicit_ranks(1, 1, 10, 2));
    EXPECT_TRUE(s == w.trained);
    EXPECT_EQ(rec.neurons_edited(), 0u);
    for (const auto& l : rec.layers) EXPECT_FALSE(l.selected);
}

TEST(UnlearnToken, ZeroStrategyWithOneNeuronZeroesOneColumnPerSelectedLayer) {
    const auto& w = tiny_world();
    ModelState s = w.trained;
    const auto& t = first_forget();
    RevsConfig c = tiny_config();
    c.neuron_strategy = NeuronStrategy::zero;
    c.n_max = 1;
    const auto prompt = t.prompt_for_position(t.unlearn_tokens[0].pos);
    const EditRecord rec = unlearn_token(s, prompt, t.unlearn_tokens[0].id, c);
    for (const auto& l : rec.layers) {
        const Matrix& before = w.trained.blocks[l.layer].ff2;
        const Matrix& after = s.blocks[l.layer].ff2;
        std::size_t zeroed = 0, changed = 0;
        for (std::size_t j = 0; j < after.cols(); ++j) {
            const Vector col = after.column(j);
            if (col != before.column(j)) ++changed;
            if (std::all_of(col.begin(), col.end(), [](double x) { return x == 0.0; })) ++zeroed;
        }
        EXPECT_EQ(changed, l.selected ? 1u : 0u);
        EXPECT_EQ(zeroed, l.selected ? 1u : 0u);
        EXPECT_EQ(l.neurons.size(), l.selected ? 1u : 0u);
    }
}

TEST(UnlearnTarget, EditsOnlyRecordedColumnsAndDemotesTokens) {
    const auto& w = tiny_world();
    ModelState s = w.trained;
    const auto& t = first_forget();
    const RevsConfig c = tiny_config();
    const auto records = unlearn_target(s, t, c);
    ASSERT_EQ(records.size(), t.unlearn_tokens.size());

    std::set<NeuronRef> named;
    for (const auto& r : records) {
        EXPECT_EQ(r.target_id, t.target_id);
        for (const auto& l : r.layers) {
            for (const auto& n : l.neurons) named.insert(n.neuron);
            if (l.selected) {
                EXPECT_TRUE(l.final_rank + *c.eps_rd >= *c.r_d || l.n_max_reached);
            }
        }
    }
    EXPECT_FALSE(named.empty());
    const auto before = w.trained.tensors();
    const auto after = s.tensors();
    for (std::size_t b = 0; b < before.size(); ++b) {
        if (!before[b].name.ends_with("mlp.ff2")) {
            EXPECT_TRUE(std::equal(before[b].values.begin(), before[b].values.end(), after[b].values.begin()))
                << before[b].name;
        }
    }
    for (std::size_t l = 0; l < s.config.n_layers; ++l)
        for (std::size_t j = 0; j < s.config.d_ff; ++j)
            if (!named.contains({l, j})) {
                EXPECT_EQ(s.blocks[l].ff2.column(j), w.trained.blocks[l].ff2.column(j));
            }
    EXPECT_FALSE(reproduces_secret(s, t.prompt, t.secret));
}

TEST(UnlearnTarget, AllForgetTargetsStopReproducing) {
    const auto& w = tiny_world();
    ModelState s = w.trained;
    const auto forget = w.dataset.targets_in(TargetSplit::forget);
    for (const auto* t : forget) unlearn_target(s, *t, tiny_config());
    std::size_t leaked = 0;
    for (const auto* t : forget) leaked += greedy_generate(s, t->prompt, t->secret.size()) == t->secret;
    EXPECT_EQ(leaked, 0u);
}

TEST(EditRecords, JsonRoundTrip) {
    const auto& w = tiny_world();
    ModelState s = w.trained;
    const auto records = unlearn_target(s, first_forget(), tiny_config());
    const std::string text = edit_records_to_json(records);
    const auto back = edit_records_from_json(text);
    EXPECT_EQ(edit_records_to_json(back), text);
    ASSERT_EQ(back.size(), records.size());
    EXPECT_EQ(back[0].neurons_edited(), records[0].neurons_edited());
    EXPECT_THROW(edit_records_from_json("{\"records\": 3}"), Error);
}
