#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "revs/dataset.hpp"
#include "revs/templates.hpp"
#include "revs/tokenizer.hpp"

using namespace revs;

TEST(Vocabulary, FrequencyOrderOnTinyCorpus) {
    const std::vector<std::string> corpus{"a a b"};
    const Vocabulary v = Vocabulary::build(corpus);
    EXPECT_EQ(v.id_of("a"), 3);
    EXPECT_EQ(v.id_of("b"), 4);
    EXPECT_EQ(v.token(kPad), v.tokens()[0]);
    EXPECT_EQ(v.encode("a b a"), (std::vector<TokenId>{3, 4, 3}));
}

TEST(Vocabulary, EncodeDecodeRoundTrip) {
    const std::vector<std::string> corpus{"The SSN of Ann Lee is 123-45-6789.", "Ann's record, filed 2020."};
    const Vocabulary v = Vocabulary::build(corpus);
    for (const auto& s : corpus) EXPECT_EQ(v.decode(v.encode(s)), s);
}

TEST(Vocabulary, UnknownPiecesFallBackToCharacters) {
    const std::vector<std::string> corpus{"abc 12"};
    const Vocabulary v = Vocabulary::build(corpus);
    const auto ids = v.encode("cab");
    ASSERT_EQ(ids.size(), 3u);
    EXPECT_EQ(v.token(ids[0]), "c");
    EXPECT_EQ(v.token(ids[1]), "a");
    EXPECT_EQ(v.token(ids[2]), "b");
}

TEST(Vocabulary, RebuildFromTokensPreservesIds) {
    const std::vector<std::string> corpus{"x y y z z z"};
    const Vocabulary v = Vocabulary::build(corpus);
    const std::vector<std::vector<TokenId>> tokenized{v.encode(corpus[0])};
    const Vocabulary w = Vocabulary::from_tokens(v.tokens(), tokenized);
    EXPECT_EQ(w.tokens(), v.tokens());
    EXPECT_EQ(w.frequency(), v.frequency());
}

TEST(TokenSelection, RarestSkipsExclusions) {
    // Ids are frequency ranked, so the rarest tokens are the largest ids.
    const std::vector<TokenId> secret{273, 49143, 962, 15567, 72876, 916};
    const auto got = select_unlearn_tokens(secret, TokenStrategy::rarest, 2, {72876, 916}, 0);
    ASSERT_EQ(got.size(), 2u);
    EXPECT_EQ(got[0], (UnlearnToken{49143, 1}));
    EXPECT_EQ(got[1], (UnlearnToken{15567, 3}));
}

TEST(TokenSelection, SsnRarestPicksNumericTokens) {
    const std::vector<std::string> corpus{"123-45-6789", "123 45", "123"};
    const Vocabulary v = Vocabulary::build(corpus);
    const auto secret = v.encode("123-45-6789");
    const auto excl = exclusion_ids(v, ssn_exclusions());
    const auto got = select_unlearn_tokens(secret, TokenStrategy::rarest, 2, excl, 0);
    ASSERT_EQ(got.size(), 2u);
    EXPECT_EQ(v.token(got[0].id), "45");
    EXPECT_EQ(v.token(got[1].id), "6789");
}

TEST(TokenSelection, FirstTakesSequenceOrder) {
    const std::vector<TokenId> secret{10, 4, 99, 7};
    const auto got = select_unlearn_tokens(secret, TokenStrategy::first, 2, {4}, 0);
    EXPECT_EQ(got, (std::vector<UnlearnToken>{{10, 0}, {99, 2}}));
}

TEST(TokenSelection, TooFewEligibleIsSelectionError) {
    const std::vector<TokenId> secret{5, 5, 6};
    try {
        select_unlearn_tokens(secret, TokenStrategy::rarest, 2, {6}, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::selection);
    }
}

TEST(TokenSelection, RandomIsSeedReproducible) {
    const std::vector<TokenId> secret{10, 11, 12, 13, 14, 15};
    EXPECT_EQ(select_unlearn_tokens(secret, TokenStrategy::random, 3, {}, 42),
              select_unlearn_tokens(secret, TokenStrategy::random, 3, {}, 42));
}

class DefaultDataset : public ::testing::Test {
protected:
    static void SetUpTestSuite() { ds_ = new SyntheticDataset(generate_ssn_dataset(DatasetConfig{}, 0)); }
    static void TearDownTestSuite() {
        delete ds_;
        ds_ = nullptr;
    }
    static SyntheticDataset* ds_;
};
SyntheticDataset* DefaultDataset::ds_ = nullptr;

TEST_F(DefaultDataset, ShapeMatchesConfig) {
    EXPECT_EQ(ds_->sentences.size(), 200u);
    const auto forget = ds_->targets_in(TargetSplit::forget);
    ASSERT_EQ(forget.size(), 20u);
    for (const auto* t : forget) {
        EXPECT_EQ(t->generalization_prompts.size(), 4u);
        EXPECT_EQ(t->unlearn_tokens.size(), 2u);
        EXPECT_EQ(t->prompt.front(), kBos);
    }
}

TEST_F(DefaultDataset, SameSeedIsByteIdentical) {
    EXPECT_EQ(dataset_to_json(*ds_), dataset_to_json(generate_ssn_dataset(DatasetConfig{}, 0)));
    EXPECT_NE(dataset_to_json(*ds_), dataset_to_json(generate_ssn_dataset(DatasetConfig{}, 1)));
}

TEST_F(DefaultDataset, JsonRoundTrip) {
    const SyntheticDataset back = dataset_from_json(dataset_to_json(*ds_));
    EXPECT_EQ(back.targets, ds_->targets);
    EXPECT_EQ(back.sentences, ds_->sentences);
    EXPECT_EQ(back.vocabulary.tokens(), ds_->vocabulary.tokens());
    EXPECT_EQ(dataset_to_json(back), dataset_to_json(*ds_));
}

TEST_F(DefaultDataset, ForgetSecretsNeverAppearInRetainSentences) {
    std::vector<std::string> retain_text;
    std::set<std::vector<TokenId>> forget_sentences;
    for (const auto* t : ds_->targets_in(TargetSplit::forget)) {
        std::vector<std::vector<TokenId>> prompts{t->prompt};
        prompts.insert(prompts.end(), t->generalization_prompts.begin(), t->generalization_prompts.end());
        for (const auto& p : prompts) {
            std::vector<TokenId> s = p;
            s.insert(s.end(), t->secret.begin(), t->secret.end());
            forget_sentences.insert(s);
        }
    }
    for (const auto& s : ds_->sentences) {
        bool is_forget = false;
        for (const auto& f : forget_sentences)
            if (s.size() >= f.size() && std::equal(f.begin(), f.end(), s.begin())) is_forget = true;
        if (!is_forget) retain_text.push_back(ds_->vocabulary.decode(s));
    }
    ASSERT_EQ(retain_text.size(), 100u);
    for (const auto* t : ds_->targets_in(TargetSplit::forget)) {
        const std::string ssn = ds_->vocabulary.decode(t->secret);
        for (const auto& s : retain_text) EXPECT_EQ(s.find(ssn), std::string::npos) << ssn;
    }
}

TEST_F(DefaultDataset, IdOrderMatchesRecountedFrequencies) {
    std::map<TokenId, std::uint64_t> counts;
    for (const auto& s : ds_->sentences)
        for (TokenId id : s) ++counts[id];
    const auto& tokens = ds_->vocabulary.tokens();
    std::vector<std::pair<std::uint64_t, std::string>> oracle;
    for (std::size_t id = kFirstRegularId; id < tokens.size(); ++id)
        oracle.push_back({counts[static_cast<TokenId>(id)], tokens[id]});
    std::stable_sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (std::size_t i = 0; i < oracle.size(); ++i)
        EXPECT_EQ(tokens[kFirstRegularId + i], oracle[i].second) << "id " << kFirstRegularId + i;
    const auto& freq = ds_->vocabulary.frequency();
    for (std::size_t id = kFirstRegularId + 1; id < freq.size(); ++id) EXPECT_GE(freq[id - 1], freq[id]);
}

TEST_F(DefaultDataset, SecretsReconstructSentences) {
    for (const auto& t : ds_->targets) {
        std::vector<TokenId> full = t.prompt;
        full.insert(full.end(), t.secret.begin(), t.secret.end());
        const bool found = std::any_of(ds_->sentences.begin(), ds_->sentences.end(), [&](const auto& s) {
            return s.size() >= full.size() && std::equal(full.begin(), full.end(), s.begin());
        });
        EXPECT_TRUE(found) << t.target_id;
        for (const auto& u : t.unlearn_tokens) EXPECT_EQ(t.secret[u.pos], u.id);
        const auto p = t.prompt_for_position(1);
        EXPECT_EQ(p.size(), t.prompt.size() + 1);
        EXPECT_EQ(p.back(), t.secret[0]);
    }
}

TEST(DatasetConfig, RejectsInvalidCounts) {
    DatasetConfig c;
    c.n_targets = 0;
    EXPECT_THROW(c.validate(), Error);
    c = DatasetConfig{};
    c.n_retain_sentences = 101;
    EXPECT_THROW(c.validate(), Error);
    c = DatasetConfig{};
    c.n_targets = 500;
    EXPECT_THROW(generate_ssn_dataset(c, 0), Error);
}

TEST(Templates, EveryTemplateHasOneSsnSlot) {
    for (const auto& t : ssn_templates()) {
        const std::string_view text = t.text;
        const auto at = text.find("[SSN]");
        ASSERT_NE(at, std::string_view::npos) << text;
        EXPECT_EQ(text.find("[SSN]", at + 1), std::string_view::npos) << text;
    }
}
