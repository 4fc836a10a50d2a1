#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "revs/linalg.hpp"

namespace revs {

inline constexpr TokenId kPad = 0;
inline constexpr TokenId kBos = 1;
inline constexpr TokenId kUnk = 2;
inline constexpr TokenId kFirstRegularId = 3;

/// Word-level vocabulary whose ids are ordered by corpus frequency, so a
/// larger id always means an equally common or rarer token.
///
/// Text is split into alphanumeric runs and single punctuation characters.
/// A single space between two pieces is implicit (punctuation such as
/// "-" , "." or "'" glues to its neighbours); any whitespace beyond that is
/// emitted as explicit " " tokens. Pieces missing from the vocabulary fall
/// back to single-character tokens.
class Vocabulary {
public:
    static Vocabulary build(std::span<const std::string> corpus);
    /// Rebuilds from an id-ordered token list and recounts frequencies from
    /// already-tokenized sentences.
    static Vocabulary from_tokens(std::vector<std::string> tokens,
                                  std::span<const std::vector<TokenId>> tokenized_corpus);

    std::size_t size() const noexcept { return tokens_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    const std::vector<std::uint64_t>& frequency() const noexcept { return frequency_; }

    const std::string& token(TokenId id) const;
    /// Id of an exact token string, or kUnk.
    TokenId id_of(std::string_view token) const;
    bool contains(std::string_view token) const;

    std::vector<TokenId> encode(std::string_view text) const;
    /// Inverse of encode for in-vocabulary text. Reserved tokens are skipped.
    std::string decode(std::span<const TokenId> ids) const;

private:
    std::vector<std::string> tokens_;
    std::vector<std::uint64_t> frequency_;
    std::unordered_map<std::string, TokenId> id_of_;

    void index();
};

/// A piece of pre-tokenized text with the number of spaces preceding it.
struct Piece {
    std::string text;
    std::size_t spaces_before = 0;
};

std::vector<Piece> split_pieces(std::string_view text);
/// Whether detokenization puts a single space between two adjacent pieces.
bool implicit_space_between(std::string_view left, std::string_view right);

}  // namespace revs
