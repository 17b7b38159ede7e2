#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cfx/grammar.hpp"

namespace cfx {

inline constexpr std::size_t kDefaultEmbeddingDim = 16;
inline constexpr std::uint64_t kDefaultHashSeed = 0x5eed'c0de'2022ULL;

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dimension() const { return values.size(); }

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

/// Token vectors plus synonym groups whose members share one vector.
///
/// Text format, one entry per line:
///
///     #synonyms: ball circle sphere
///     ball<TAB>0.1 -0.2 ... (k values)
///
/// A group's vector comes from whichever members have vector lines; those
/// lines must agree exactly. Other lines starting with '#' are comments.
class Lexicon {
public:
    explicit Lexicon(std::size_t dimension = kDefaultEmbeddingDim, std::uint64_t oov_seed = kDefaultHashSeed);

    static Lexicon parse(std::istream& in, std::uint64_t oov_seed = kDefaultHashSeed);
    static Lexicon load(const std::string& path, std::uint64_t oov_seed = kDefaultHashSeed);

    /// Adds or replaces a vector. Throws DimensionMismatch.
    void add(const std::string& token, EmbeddingVector v);
    /// Copies the vector of the first member that has one onto every member.
    void add_synonym_group(const std::vector<std::string>& members);

    const EmbeddingVector* find(std::string_view token) const;
    bool contains(std::string_view token) const { return find(token) != nullptr; }

    /// Vector for `token`: its entry, or the seeded hash vector when absent.
    EmbeddingVector vector_for(std::string_view token) const;

    std::size_t dimension() const { return dimension_; }
    std::uint64_t oov_seed() const { return oov_seed_; }
    const std::vector<std::vector<std::string>>& synonym_groups() const { return groups_; }

    /// Grammar terminals without an entry; empty for a usable lexicon.
    std::vector<std::string> missing_terminals() const;

    void write(std::ostream& out) const;

private:
    std::size_t dimension_;
    std::uint64_t oov_seed_;
    std::map<std::string, EmbeddingVector, std::less<>> vectors_;
    std::vector<std::vector<std::string>> groups_;
};

/// Deterministic unit-norm vector for an out-of-vocabulary token.
EmbeddingVector hashed_vector(std::string_view token, std::size_t dimension, std::uint64_t seed);

/// Mean of the token vectors.
EmbeddingVector embed(const Sentence& s, const Lexicon& lex);

/// Cosine similarity clamped to [-1, 1]. Throws ZeroVector, DimensionMismatch.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// 1 - cosine similarity, in [0, 2].
double distance(const EmbeddingVector& a, const EmbeddingVector& b);

/// Anything that turns a sentence into an embedding.
class SentenceEncoder {
public:
    virtual ~SentenceEncoder() = default;
    virtual EmbeddingVector encode(const Sentence& s) const = 0;
};

class LexiconEncoder final : public SentenceEncoder {
public:
    explicit LexiconEncoder(const Lexicon& lex) : lex_(lex) {}
    EmbeddingVector encode(const Sentence& s) const override { return embed(s, lex_); }

private:
    const Lexicon& lex_;
};

/// Address of an external embedding service speaking
/// POST {"sentence": text} -> {"embedding": [k floats]}.
struct EmbeddingEndpoint {
    std::string host = "127.0.0.1";
    int port = 80;
    std::string path = "/embed";
    std::chrono::milliseconds timeout{5000};

    /// Accepts "http://host:port/path", "host:port/path" or "host:port".
    static EmbeddingEndpoint parse(std::string_view url);
};

/// Throws ServiceUnreachable, DimensionMismatch or MalformedResponse.
EmbeddingVector remote_embed(const Sentence& s, const EmbeddingEndpoint& endpoint,
                             std::size_t expected_dimension = kDefaultEmbeddingDim);

class RemoteEncoder final : public SentenceEncoder {
public:
    RemoteEncoder(EmbeddingEndpoint endpoint, std::size_t dimension)
        : endpoint_(std::move(endpoint)), dimension_(dimension) {}
    EmbeddingVector encode(const Sentence& s) const override {
        return remote_embed(s, endpoint_, dimension_);
    }

private:
    EmbeddingEndpoint endpoint_;
    std::size_t dimension_;
};

/// Add-one smoothed bigram model with <s> and </s> boundary markers.
class FluencyModel {
public:
    static FluencyModel train(const std::vector<Sentence>& corpus);
    static FluencyModel load(const std::string& path);

    /// P(next | prev) with add-one smoothing over the training vocabulary
    /// plus one slot for unseen words.
    double probability(std::string_view prev, std::string_view next) const;

    /// Geometric-mean inverse probability over all bigrams incl. boundaries.
    double perplexity(const Sentence& s) const;

    std::size_t vocabulary_size() const { return vocabulary_.size() + 1; }

private:
    std::unordered_map<std::string, std::unordered_map<std::string, int>> bigrams_;
    std::unordered_map<std::string, int> history_;
    std::set<std::string, std::less<>> vocabulary_;
};

inline double fluency(const Sentence& s, const FluencyModel& m) { return m.perplexity(s); }

} // namespace cfx
