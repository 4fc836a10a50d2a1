#include "revs/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace revs {

namespace {

constexpr std::string_view kGlueLeft = ",.;:)'-/?!%";
constexpr std::string_view kGlueRight = "('-/$#";

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool glues(std::string_view piece, std::string_view set) {
    return piece.size() == 1 && set.find(piece[0]) != std::string_view::npos;
}

const std::vector<std::string>& reserved_tokens() {
    static const std::vector<std::string> reserved{"<pad>", "<bos>", "<unk>"};
    return reserved;
}

}  // namespace

std::vector<Piece> split_pieces(std::string_view text) {
    std::vector<Piece> pieces;
    std::size_t spaces = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == ' ') {
            ++spaces;
            ++i;
            continue;
        }
        std::size_t end = i + 1;
        if (is_word_char(c))
            while (end < text.size() && is_word_char(text[end])) ++end;
        pieces.push_back({std::string(text.substr(i, end - i)), spaces});
        spaces = 0;
        i = end;
    }
    if (spaces > 0) pieces.push_back({std::string(), spaces});  // trailing whitespace
    return pieces;
}

bool implicit_space_between(std::string_view left, std::string_view right) {
    if (left.empty() || right.empty()) return false;
    return !(glues(right, kGlueLeft) || glues(left, kGlueRight));
}

void Vocabulary::index() {
    id_of_.clear();
    for (std::size_t i = 0; i < tokens_.size(); ++i) id_of_.emplace(tokens_[i], static_cast<TokenId>(i));
}

Vocabulary Vocabulary::build(std::span<const std::string> corpus) {
    require(!corpus.empty(), ErrorKind::domain, "build_vocabulary: empty corpus");

    std::map<std::string, std::uint64_t> counts;
    std::set<char> alphabet;
    for (const auto& sentence : corpus) {
        std::string prev;
        for (const auto& piece : split_pieces(sentence)) {
            const std::size_t expected = implicit_space_between(prev, piece.text) ? 1 : 0;
            if (piece.spaces_before > expected) counts[" "] += piece.spaces_before - expected;
            if (!piece.text.empty()) ++counts[piece.text];
            prev = piece.text;
        }
        alphabet.insert(sentence.begin(), sentence.end());
    }
    for (char c : alphabet) counts.try_emplace(std::string(1, c), 0);

    std::vector<std::pair<std::string, std::uint64_t>> ordered(counts.begin(), counts.end());
    // std::map iteration is already lexicographic; stable sort keeps that for ties.
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    Vocabulary vocab;
    for (const auto& r : reserved_tokens()) {
        vocab.tokens_.push_back(r);
        vocab.frequency_.push_back(0);
    }
    for (auto& [token, count] : ordered) {
        if (std::find(reserved_tokens().begin(), reserved_tokens().end(), token) != reserved_tokens().end())
            continue;
        vocab.tokens_.push_back(token);
        vocab.frequency_.push_back(count);
    }
    vocab.index();
    return vocab;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens,
                                   std::span<const std::vector<TokenId>> tokenized_corpus) {
    require(tokens.size() >= 3 && tokens[0] == reserved_tokens()[0] && tokens[1] == reserved_tokens()[1] &&
                tokens[2] == reserved_tokens()[2],
            ErrorKind::data, "vocabulary must start with the reserved tokens <pad>, <bos>, <unk>");
    Vocabulary vocab;
    vocab.tokens_ = std::move(tokens);
    vocab.frequency_.assign(vocab.tokens_.size(), 0);
    for (const auto& sentence : tokenized_corpus)
        for (TokenId id : sentence) {
            require(id >= 0 && static_cast<std::size_t>(id) < vocab.tokens_.size(), ErrorKind::data,
                    "token id " + std::to_string(id) + " outside vocabulary");
            if (id >= kFirstRegularId) ++vocab.frequency_[static_cast<std::size_t>(id)];
        }
    vocab.index();
    require(vocab.id_of_.size() == vocab.tokens_.size(), ErrorKind::data, "vocabulary has duplicate tokens");
    return vocab;
}

const std::string& Vocabulary::token(TokenId id) const {
    require(id >= 0 && static_cast<std::size_t>(id) < tokens_.size(), ErrorKind::domain,
            "token id " + std::to_string(id) + " outside vocabulary");
    return tokens_[static_cast<std::size_t>(id)];
}

TokenId Vocabulary::id_of(std::string_view token) const {
    auto it = id_of_.find(std::string(token));
    return it == id_of_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return id_of_.count(std::string(token)) > 0; }

std::vector<TokenId> Vocabulary::encode(std::string_view text) const {
    std::vector<TokenId> ids;
    const TokenId space = id_of(" ");
    std::string prev;
    for (const auto& piece : split_pieces(text)) {
        const std::size_t expected = implicit_space_between(prev, piece.text) ? 1 : 0;
        for (std::size_t s = expected; s < piece.spaces_before; ++s) ids.push_back(space);
        if (!piece.text.empty()) {
            const TokenId id = id_of(piece.text);
            if (id != kUnk) {
                ids.push_back(id);
            } else {
                for (char c : piece.text) ids.push_back(id_of(std::string_view(&c, 1)));
            }
        }
        prev = piece.text;
    }
    return ids;
}

std::string Vocabulary::decode(std::span<const TokenId> ids) const {
    // Explicit " " tokens are extra whitespace on top of the implicit single space.
    std::string out;
    std::string_view prev;
    std::size_t pending_spaces = 0;
    for (TokenId id : ids) {
        if (id < kFirstRegularId) continue;
        const std::string& tok = token(id);
        if (tok == " ") {
            ++pending_spaces;
            continue;
        }
        out.append(pending_spaces + (implicit_space_between(prev, tok) ? 1 : 0), ' ');
        pending_spaces = 0;
        out += tok;
        prev = tok;
    }
    out.append(pending_spaces, ' ');
    return out;
}

}  // namespace revs
