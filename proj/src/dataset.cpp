#include "revs/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>
#include "revs/io.hpp"
#include "revs/rng.hpp"
#include "revs/templates.hpp"

namespace revs {

using nlohmann::json;

const char* to_string(TargetSplit split) { return split == TargetSplit::forget ? "forget" : "retain"; }

const char* to_string(TokenStrategy strategy) {
    switch (strategy) {
        case TokenStrategy::rarest: return "rarest";
        case TokenStrategy::most_frequent: return "most_frequent";
        case TokenStrategy::first: return "first";
        case TokenStrategy::random: return "random";
    }
    return "unknown";
}

TargetSplit parse_target_split(std::string_view name) {
    if (name == "forget") return TargetSplit::forget;
    if (name == "retain") return TargetSplit::retain;
    fail(ErrorKind::data, "unknown target split '" + std::string(name) + "'");
}

TokenStrategy parse_token_strategy(std::string_view name) {
    if (name == "rarest") return TokenStrategy::rarest;
    if (name == "most_frequent") return TokenStrategy::most_frequent;
    if (name == "first") return TokenStrategy::first;
    if (name == "random") return TokenStrategy::random;
    fail(ErrorKind::config, "unknown token strategy '" + std::string(name) + "'");
}

std::vector<TokenId> TargetSpec::prompt_for_position(std::size_t pos) const {
    return prompt_for_position(prompt, pos);
}

std::vector<TokenId> TargetSpec::prompt_for_position(std::span<const TokenId> base, std::size_t pos) const {
    require(pos < secret.size(), ErrorKind::domain, "secret position out of range");
    std::vector<TokenId> out(base.begin(), base.end());
    out.insert(out.end(), secret.begin(), secret.begin() + static_cast<std::ptrdiff_t>(pos));
    return out;
}

std::vector<const TargetSpec*> SyntheticDataset::targets_in(TargetSplit split) const {
    std::vector<const TargetSpec*> out;
    for (const auto& t : targets)
        if (t.split == split) out.push_back(&t);
    return out;
}

void DatasetConfig::validate() const {
    require(n_targets > 0, ErrorKind::config, "dataset.n_targets must be positive");
    require(prefixes_per_target >= 1, ErrorKind::config, "dataset.prefixes_per_target must be at least 1");
    require(n_retain_sentences % prefixes_per_target == 0, ErrorKind::config,
            "dataset.n_retain_sentences must be a multiple of prefixes_per_target");
    require(unlearn_token_count >= 1, ErrorKind::config, "dataset.unlearn_token_count must be at least 1");
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& ssn_exclusions() {
    static const std::vector<std::string> list{"-"};
    return list;
}

const std::vector<std::string>& url_email_exclusions() {
    static const std::vector<std::string> list{"@", "com", "org", "net", "edu", "gov", "://", "www",
                                               "http", "https", "/", "\"", "-", ".", ":"};
    return list;
}

std::set<TokenId> exclusion_ids(const Vocabulary& vocab, std::span<const std::string> tokens) {
    std::set<TokenId> out;
    for (const auto& t : tokens)
        if (vocab.contains(t)) out.insert(vocab.id_of(t));
    return out;
}

std::vector<UnlearnToken> select_unlearn_tokens(std::span<const TokenId> secret, TokenStrategy strategy,
                                                std::size_t count, const std::set<TokenId>& exclusions,
                                                std::uint64_t seed, const std::string& secret_name) {
    // Distinct eligible tokens, each at its first occurrence.
    std::vector<UnlearnToken> eligible;
    std::set<TokenId> seen;
    for (std::size_t pos = 0; pos < secret.size(); ++pos) {
        const TokenId id = secret[pos];
        if (exclusions.count(id) || !seen.insert(id).second) continue;
        eligible.push_back({id, pos});
    }
    if (eligible.size() < count)
        fail(ErrorKind::selection, "cannot select " + std::to_string(count) + " unlearn tokens from " +
                                       secret_name + ": only " + std::to_string(eligible.size()) +
                                       " eligible");

    switch (strategy) {
        case TokenStrategy::rarest:
            std::stable_sort(eligible.begin(), eligible.end(),
                             [](const UnlearnToken& a, const UnlearnToken& b) { return a.id > b.id; });
            break;
        case TokenStrategy::most_frequent:
            std::stable_sort(eligible.begin(), eligible.end(),
                             [](const UnlearnToken& a, const UnlearnToken& b) { return a.id < b.id; });
            break;
        case TokenStrategy::first:
            break;
        case TokenStrategy::random: {
            Rng rng(seed);
            rng.shuffle(std::span<UnlearnToken>(eligible));
            break;
        }
    }
    eligible.resize(count);
    std::sort(eligible.begin(), eligible.end(),
              [](const UnlearnToken& a, const UnlearnToken& b) { return a.pos < b.pos; });
    return eligible;
}

// ---------------------------------------------------------------------------

namespace {

std::string replace_all(std::string text, std::string_view key, std::string_view value) {
    for (std::size_t at = text.find(key); at != std::string::npos; at = text.find(key, at + value.size()))
        text.replace(at, key.size(), value);
    return text;
}

std::string two_digits(std::int64_t v) { return (v < 10 ? "0" : "") + std::to_string(v); }

struct Identity {
    std::string name;
    std::string ssn;
};

// Every SSN group is unique across identities and never collides with a
// date component, so each group is its own token with a known frequency.
std::vector<Identity> make_identities(std::size_t n, Rng& rng) {
    std::vector<std::string_view> firsts = first_names();
    std::vector<std::string_view> lasts = last_names();
    require(n <= firsts.size() && n <= lasts.size(), ErrorKind::config,
            "dataset needs " + std::to_string(n) + " identities but only " +
                std::to_string(std::min(firsts.size(), lasts.size())) + " names are available");
    rng.shuffle(std::span<std::string_view>(firsts));
    rng.shuffle(std::span<std::string_view>(lasts));

    std::set<std::string> used;
    auto draw = [&](std::int64_t lo, std::int64_t hi, auto format, auto reject) {
        for (;;) {
            const std::int64_t v = rng.uniform_int(lo, hi);
            if (reject(v)) continue;
            std::string s = format(v);
            if (used.insert(s).second) return s;
        }
    };
    auto plain = [](std::int64_t v) { return std::to_string(v); };

    std::vector<Identity> out;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string area = draw(100, 899, plain, [](std::int64_t v) { return v == 666; });
        const std::string group = draw(32, 99, two_digits, [](std::int64_t) { return false; });
        const std::string serial =
            draw(1000, 9999, plain, [](std::int64_t v) { return v >= 1990 && v <= 2030; });
        out.push_back({std::string(firsts[i]) + " " + std::string(lasts[i]), area + "-" + group + "-" + serial});
    }
    return out;
}

std::string random_date(Rng& rng) {
    const auto day = rng.uniform_int(1, 28);
    const auto month = rng.uniform_int(1, 12);
    const auto year = rng.uniform_int(2010, 2023);
    return std::to_string(day) + "-" + std::to_string(month) + "-" + std::to_string(year);
}

}  // namespace

SyntheticDataset generate_ssn_dataset(const DatasetConfig& config, std::uint64_t seed) {
    config.validate();
    const auto& templates = ssn_templates();
    const std::size_t p = config.prefixes_per_target;
    const std::size_t n_retain_identities = config.n_retain_sentences / p;
    const std::size_t n_identities = config.n_targets + n_retain_identities;
    const std::size_t n_sentences = n_identities * p;
    if (templates.size() < n_sentences)
        fail(ErrorKind::config, "dataset needs " + std::to_string(n_sentences) + " templates but only " +
                                    std::to_string(templates.size()) + " are available");

    Rng rng(seed);
    std::vector<std::size_t> order(templates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    const std::vector<Identity> identities = make_identities(n_identities, rng);

    struct Filled {
        std::string sentence;
        std::string prompt;
    };
    std::vector<std::vector<Filled>> filled(n_identities);
    std::vector<std::string> corpus;
    SyntheticDataset ds;
    ds.seed = seed;
    for (std::size_t i = 0; i < n_identities; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            const Template& tpl = templates[order[i * p + j]];
            ++ds.template_domain_counts[to_string(tpl.domain)];
            std::string text = replace_all(std::string(tpl.text), "[NAME]", identities[i].name);
            text = replace_all(std::move(text), "[DATE]", random_date(rng));
            const std::size_t at = text.find("[SSN]");
            require(at != std::string::npos && at > 0 && text[at - 1] == ' ', ErrorKind::data,
                    "template without a mid-sentence [SSN]: " + std::string(tpl.text));
            std::string prompt = text.substr(0, at - 1);
            text.replace(at, 5, identities[i].ssn);
            corpus.push_back(text);
            filled[i].push_back({std::move(text), std::move(prompt)});
        }
    }

    ds.vocabulary = Vocabulary::build(corpus);
    const Vocabulary& vocab = ds.vocabulary;
    auto with_bos = [&](std::string_view text) {
        std::vector<TokenId> ids{kBos};
        const auto body = vocab.encode(text);
        ids.insert(ids.end(), body.begin(), body.end());
        return ids;
    };
    for (const auto& s : corpus) ds.sentences.push_back(with_bos(s));

    const auto exclusions = exclusion_ids(vocab, ssn_exclusions());
    for (std::size_t i = 0; i < n_identities; ++i) {
        TargetSpec t;
        t.split = i < config.n_targets ? TargetSplit::forget : TargetSplit::retain;
        t.target_id = "ssn-" + two_digits(static_cast<std::int64_t>(i));
        t.prompt = with_bos(filled[i][0].prompt);
        t.secret = vocab.encode(identities[i].ssn);
        for (std::size_t j = 1; j < p; ++j) t.generalization_prompts.push_back(with_bos(filled[i][j].prompt));
        t.unlearn_tokens = select_unlearn_tokens(t.secret, config.token_strategy, config.unlearn_token_count,
                                                 exclusions, seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)),
                                                 t.target_id);
        ds.targets.push_back(std::move(t));
    }
    return ds;
}

// ---------------------------------------------------------------------------

std::string dataset_to_json(const SyntheticDataset& ds) {
    json j;
    j["seed"] = ds.seed;
    j["vocabulary"] = ds.vocabulary.tokens();
    j["sentences"] = ds.sentences;
    j["template_domain_counts"] = ds.template_domain_counts;
    json targets = json::array();
    for (const auto& t : ds.targets) {
        json u = json::array();
        for (const auto& tok : t.unlearn_tokens) u.push_back({{"id", tok.id}, {"pos", tok.pos}});
        targets.push_back({{"target_id", t.target_id},
                           {"prompt", t.prompt},
                           {"secret", t.secret},
                           {"unlearn_tokens", u},
                           {"generalization_prompts", t.generalization_prompts},
                           {"split", to_string(t.split)}});
    }
    j["targets"] = targets;
    return j.dump(2) + "\n";
}

SyntheticDataset dataset_from_json(const std::string& text) {
    SyntheticDataset ds;
    try {
        const json j = json::parse(text);
        ds.seed = j.at("seed").get<std::uint64_t>();
        ds.sentences = j.at("sentences").get<std::vector<std::vector<TokenId>>>();
        ds.vocabulary = Vocabulary::from_tokens(j.at("vocabulary").get<std::vector<std::string>>(), ds.sentences);
        if (j.contains("template_domain_counts"))
            ds.template_domain_counts = j.at("template_domain_counts").get<std::map<std::string, std::size_t>>();
        for (const auto& jt : j.at("targets")) {
            TargetSpec t;
            t.target_id = jt.at("target_id").get<std::string>();
            t.prompt = jt.at("prompt").get<std::vector<TokenId>>();
            t.secret = jt.at("secret").get<std::vector<TokenId>>();
            t.generalization_prompts = jt.at("generalization_prompts").get<std::vector<std::vector<TokenId>>>();
            t.split = parse_target_split(jt.at("split").get<std::string>());
            for (const auto& u : jt.at("unlearn_tokens"))
                t.unlearn_tokens.push_back({u.at("id").get<TokenId>(), u.at("pos").get<std::size_t>()});
            ds.targets.push_back(std::move(t));
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::data, std::string("malformed dataset: ") + e.what());
    }

    const auto vocab_size = static_cast<TokenId>(ds.vocabulary.size());
    auto check_ids = [&](std::span<const TokenId> ids, const std::string& what) {
        for (TokenId id : ids)
            require(id >= 0 && id < vocab_size, ErrorKind::data, what + ": token id out of vocabulary");
    };
    for (const auto& t : ds.targets) {
        check_ids(t.prompt, t.target_id + " prompt");
        check_ids(t.secret, t.target_id + " secret");
        for (const auto& g : t.generalization_prompts) check_ids(g, t.target_id + " generalization prompt");
        for (const auto& u : t.unlearn_tokens)
            require(u.pos < t.secret.size() && t.secret[u.pos] == u.id, ErrorKind::data,
                    t.target_id + ": unlearn token does not match the secret");
    }
    return ds;
}

void save_dataset(const SyntheticDataset& dataset, const std::string& path) {
    write_text_file(path, dataset_to_json(dataset));
}

SyntheticDataset load_dataset(const std::string& path) { return dataset_from_json(read_text_file(path)); }

}  // namespace revs
