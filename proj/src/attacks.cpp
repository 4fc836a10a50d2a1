#include "revs/attacks.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

#include "revs/io.hpp"
#include "revs/rng.hpp"

namespace revs {

const char* to_string(AttackKind kind) {
    switch (kind) {
        case AttackKind::lla: return "LLA";
        case AttackKind::da: return "DA";
        case AttackKind::pa: return "PA";
    }
    return "unknown";
}

bool CandidateSet::contains(std::size_t layer, TokenId token) const {
    const auto& c = candidates.at(layer);
    return std::find(c.begin(), c.end(), token) != c.end();
}

void PerturbationSpec::validate() const {
    require(!insert_char.empty(), ErrorKind::config, "insert_char must be non-empty");
    require(samples >= 1, ErrorKind::config, "perturbation samples must be positive");
}

namespace {

std::vector<TokenId> to_ids(const std::vector<std::size_t>& idx) {
    return {idx.begin(), idx.end()};
}

void check_k(const ModelState& state, std::size_t k) {
    require(k >= 1 && k <= state.config.vocab_size, ErrorKind::domain, "attack k must lie in [1, |V|]");
}

}  // namespace

CandidateSet logit_lens_candidates(const ModelState& state, std::span<const TokenId> prompt, std::size_t k,
                                   std::span<const TokenId> probes) {
    check_k(state, k);
    const ForwardTrace trace = forward(state, prompt);
    CandidateSet set;
    set.attack = AttackKind::lla;
    set.probes.assign(probes.begin(), probes.end());
    set.effective_ranks.assign(probes.size(), {});
    const std::size_t kk = std::min(k, state.config.vocab_size);
    for (const auto& v : trace.lens_logits) {
        auto top = to_ids(top_k_indices(v, kk));
        const auto bottom = to_ids(bottom_k_indices(v, kk));
        for (TokenId t : bottom)
            if (std::find(top.begin(), top.end(), t) == top.end()) top.push_back(t);
        set.candidates.push_back(std::move(top));
        for (std::size_t i = 0; i < probes.size(); ++i)
            set.effective_ranks[i].push_back(std::min(rank_of_token(v, probes[i]), rank_from_bottom(v, probes[i])));
    }
    return set;
}

CandidateSet delta_candidates(const ModelState& state, std::span<const TokenId> prompt, std::size_t k,
                              std::span<const TokenId> probes) {
    check_k(state, k);
    require(state.config.n_layers >= 2, ErrorKind::domain, "delta attack needs at least two layers");
    const ForwardTrace trace = forward(state, prompt);
    CandidateSet set;
    set.attack = AttackKind::da;
    set.probes.assign(probes.begin(), probes.end());
    set.effective_ranks.assign(probes.size(), {});
    for (std::size_t l = 0; l + 1 < trace.layer_count(); ++l) {
        const auto& a = trace.lens_logits[l];
        const auto& b = trace.lens_logits[l + 1];
        Vector delta(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) delta[i] = std::abs(b[i] - a[i]);
        set.candidates.push_back(to_ids(top_k_indices(delta, k)));
        for (std::size_t i = 0; i < probes.size(); ++i) set.effective_ranks[i].push_back(rank_of_token(delta, probes[i]));
    }
    return set;
}

std::string perturb_text(std::string_view text, const PerturbationSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> idx(text.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    // Partial Fisher-Yates: the first n entries are n distinct indices.
    const std::size_t n = std::min(spec.n_insertions, idx.size());
    for (std::size_t i = 0; i < n; ++i) std::swap(idx[i], idx[i + rng.uniform_index(idx.size() - i)]);
    std::vector<std::size_t> chosen(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n));
    std::sort(chosen.begin(), chosen.end());
    std::string out;
    std::size_t next = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (next < chosen.size() && chosen[next] == i) {
            out += spec.insert_char;
            ++next;
        }
        out += text[i];
    }
    if (spec.insert_after_prompt) out += spec.insert_char;
    return out;
}

std::optional<CandidateSet> perturbation_candidates(const ModelState& state, const Vocabulary& vocab,
                                                    std::string_view prompt_text, const PerturbationSpec& spec,
                                                    std::size_t k, std::span<const TokenId> probes,
                                                    std::uint64_t seed) {
    spec.validate();
    std::optional<CandidateSet> best;
    for (std::size_t s = 0; s < spec.samples; ++s) {
        std::vector<TokenId> ids = {kBos};
        const auto body = vocab.encode(perturb_text(prompt_text, spec, seed + s));
        ids.insert(ids.end(), body.begin(), body.end());
        if (ids.size() > state.config.context_len) return std::nullopt;
        CandidateSet set = logit_lens_candidates(state, ids, k, probes);
        set.attack = AttackKind::pa;
        if (!best) {
            best = std::move(set);
            continue;
        }
        // Union across samples: the attacker keeps the best rank per layer.
        for (std::size_t l = 0; l < set.layer_count(); ++l) {
            for (TokenId t : set.candidates[l])
                if (!best->contains(l, t)) best->candidates[l].push_back(t);
            for (std::size_t i = 0; i < probes.size(); ++i)
                best->effective_ranks[i][l] = std::min(best->effective_ranks[i][l], set.effective_ranks[i][l]);
        }
    }
    return best;
}

double attack_resistance_at_k(std::span<const CandidateSet> sets, std::size_t k) {
    require(!sets.empty(), ErrorKind::domain, "attack resistance needs at least one candidate set");
    const std::size_t layers = sets.front().layer_count();
    double resistance = 1.0;
    for (std::size_t l = 0; l < layers; ++l) {
        double efficacy = 0.0;
        for (const auto& s : sets) {
            require(s.layer_count() == layers && !s.effective_ranks.empty(), ErrorKind::domain,
                    "candidate sets must cover the same layers");
            efficacy = std::max(efficacy, score_at_k(s.effective_ranks[0][l], k));
        }
        resistance = std::min(resistance, efficacy);
    }
    return resistance;
}

AttackTargetResult attack_target(const ModelState& state, const Vocabulary& vocab, const TargetSpec& target,
                                 AttackKind kind, std::size_t k, const PerturbationSpec& spec) {
    require(!target.unlearn_tokens.empty(), ErrorKind::domain, "target " + target.target_id + " has no unlearn tokens");
    AttackTargetResult result;
    result.target_id = target.target_id;
    std::vector<CandidateSet> sets;
    for (std::size_t i = 0; i < target.unlearn_tokens.size(); ++i) {
        const auto& ut = target.unlearn_tokens[i];
        const auto prompt = target.prompt_for_position(ut.pos);
        const TokenId probe[] = {ut.id};
        if (kind == AttackKind::lla) {
            sets.push_back(logit_lens_candidates(state, prompt, k, probe));
        } else if (kind == AttackKind::da) {
            sets.push_back(delta_candidates(state, prompt, k, probe));
        } else {
            const std::uint64_t seed = spec.seed * 1000003ULL + crc32c(std::span(reinterpret_cast<const std::uint8_t*>(target.target_id.data()), target.target_id.size())) + i * 7919ULL;
            auto set = perturbation_candidates(state, vocab, vocab.decode(prompt), spec, k, probe, seed);
            if (!set) {
                spdlog::warn("PA skipped for {}: perturbed prompt exceeds the context", target.target_id);
                result.skipped = true;
                result.resistance = 1.0;
                result.effective_ranks.clear();
                return result;
            }
            sets.push_back(std::move(*set));
        }
        result.effective_ranks.push_back(sets.back().effective_ranks[0]);
    }
    result.resistance = attack_resistance_at_k(sets, k);
    return result;
}

std::vector<AttackSummary> run_attacks(const ModelState& state, const Vocabulary& vocab,
                                       std::span<const TargetSpec* const> forget, std::size_t k,
                                       const PerturbationSpec& spec) {
    require(!forget.empty(), ErrorKind::data, "attacks need at least one forget target");
    std::vector<AttackSummary> out;
    for (AttackKind kind : {AttackKind::lla, AttackKind::da, AttackKind::pa}) {
        AttackSummary s{to_string(kind), 0.0, {}};
        for (const TargetSpec* t : forget) {
            s.targets.push_back(attack_target(state, vocab, *t, kind, k, spec));
            s.resistance += s.targets.back().resistance;
        }
        s.resistance /= static_cast<double>(forget.size());
        out.push_back(std::move(s));
    }
    return out;
}

double resistance_score(std::span<const double> resistances) { return harmonic_mean(resistances); }

double resistance_score(const std::vector<AttackSummary>& attacks) {
    std::vector<double> r;
    for (const auto& a : attacks) r.push_back(a.resistance);
    return harmonic_mean(r);
}

}  // namespace revs
