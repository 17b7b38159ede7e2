#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cfx/programs.hpp"

namespace cfx {

/// Normalized token sequence: lowercase, punctuation removed, non-empty.
struct Sentence {
    std::vector<std::string> tokens;

    /// Normalizes free text. Throws ParseError (structural, position 0) when
    /// nothing but whitespace and punctuation remains.
    static Sentence from_text(std::string_view text);

    std::string text() const;

    friend bool operator==(const Sentence&, const Sentence&) = default;
};

/// True for words the command grammar knows.
bool is_terminal(std::string_view token);

/// BNF of the command grammar, identical to fixtures/grammar.bnf.
std::string_view grammar_bnf();

/// Canonical sentence for every program of enumerate_programs(depth_bound),
/// in the same order.
std::vector<Sentence> enumerate_sentences(int depth_bound);

/// Exact parser for the command grammar. Either article is accepted.
/// Throws ParseError: unknown_token for the first non-terminal word,
/// structural otherwise.
Program parse(const Sentence& s);

/// Canonical sentence ("the" articles, "then" between commands).
Sentence unparse(const Program& prog);

/// `n` (sentence, program) pairs drawn uniformly with replacement from the
/// programs of depth at most `depth_bound`. Articles are varied at random so
/// the pairs also exercise the non-canonical surface forms.
std::vector<std::pair<Sentence, Program>> training_corpus(int n, std::uint64_t seed,
                                                          int depth_bound = kDefaultDepth);

} // namespace cfx
