#include "cfx/similarity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cfx/error.hpp"

namespace cfx {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, std::size_t line_no) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw Error("lexicon line " + std::to_string(line_no) + ": bad number \"" + s + "\"");
    }
    return v;
}

constexpr std::string_view kSynonymsHeader = "#synonyms:";

} // namespace

// ---------------------------------------------------------------------------
// Lexicon

Lexicon::Lexicon(std::size_t dimension, std::uint64_t oov_seed) : dimension_(dimension), oov_seed_(oov_seed) {
    if (dimension == 0) throw DimensionMismatch("embedding dimension must be positive");
}

void Lexicon::add(const std::string& token, EmbeddingVector v) {
    if (v.dimension() != dimension_) {
        throw DimensionMismatch("vector for \"" + token + "\" has dimension " + std::to_string(v.dimension()) +
                                ", lexicon uses " + std::to_string(dimension_));
    }
    vectors_[token] = std::move(v);
}

void Lexicon::add_synonym_group(const std::vector<std::string>& members) {
    const EmbeddingVector* shared = nullptr;
    for (const auto& m : members) {
        const EmbeddingVector* v = find(m);
        if (v == nullptr) continue;
        if (shared == nullptr) {
            shared = v;
        } else if (!(*v == *shared)) {
            throw Error("synonym group member \"" + m + "\" has a conflicting vector");
        }
    }
    if (shared == nullptr) throw Error("synonym group has no member with a vector");
    EmbeddingVector copy = *shared;
    for (const auto& m : members) vectors_[m] = copy;
    groups_.push_back(members);
}

const EmbeddingVector* Lexicon::find(std::string_view token) const {
    auto it = vectors_.find(token);
    return it == vectors_.end() ? nullptr : &it->second;
}

EmbeddingVector Lexicon::vector_for(std::string_view token) const {
    if (const EmbeddingVector* v = find(token)) return *v;
    return hashed_vector(token, dimension_, oov_seed_);
}

std::vector<std::string> Lexicon::missing_terminals() const {
    std::vector<std::string> words = {"go", "to", "pick", "up", "put", "next", "the", "a", "then"};
    for (Color c : kColors) words.emplace_back(to_string(c));
    for (ObjectKind k : kKinds) words.emplace_back(to_string(k));
    std::vector<std::string> missing;
    for (const auto& w : words) {
        if (!contains(w)) missing.push_back(w);
    }
    return missing;
}

Lexicon Lexicon::parse(std::istream& in, std::uint64_t oov_seed) {
    std::vector<std::vector<std::string>> groups;
    std::vector<std::pair<std::string, EmbeddingVector>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.starts_with(kSynonymsHeader)) {
            auto members = split_ws(std::string_view(line).substr(kSynonymsHeader.size()));
            if (!members.empty()) groups.push_back(std::move(members));
            continue;
        }
        if (line.front() == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw Error("lexicon line " + std::to_string(line_no) + ": expected token<TAB>values");
        }
        EmbeddingVector v;
        for (const auto& field : split_ws(std::string_view(line).substr(tab + 1))) {
            v.values.push_back(parse_double(field, line_no));
        }
        entries.emplace_back(line.substr(0, tab), std::move(v));
    }
    if (entries.empty()) throw Error("lexicon has no vectors");

    Lexicon lex(entries.front().second.dimension(), oov_seed);
    for (auto& [token, v] : entries) lex.add(token, std::move(v));
    for (const auto& g : groups) lex.add_synonym_group(g);
    return lex;
}

Lexicon Lexicon::load(const std::string& path, std::uint64_t oov_seed) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open lexicon " + path);
    return parse(in, oov_seed);
}

void Lexicon::write(std::ostream& out) const {
    for (const auto& g : groups_) {
        out << kSynonymsHeader;
        for (const auto& m : g) out << ' ' << m;
        out << '\n';
    }
    for (const auto& [token, v] : vectors_) {
        out << token << '\t';
        for (std::size_t i = 0; i < v.values.size(); ++i) {
            if (i) out << ' ';
            out << format_double(v.values[i]);
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Embeddings and distance

EmbeddingVector hashed_vector(std::string_view token, std::size_t dimension, std::uint64_t seed) {
    std::uint64_t state = fnv1a(token) ^ seed;
    EmbeddingVector v;
    v.values.resize(dimension);
    double norm2 = 0.0;
    for (auto& x : v.values) {
        // 53 random bits mapped onto [-1, 1).
        x = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
        norm2 += x * x;
    }
    if (norm2 == 0.0) {
        v.values[0] = 1.0;
        return v;
    }
    double norm = std::sqrt(norm2);
    for (auto& x : v.values) x /= norm;
    return v;
}

EmbeddingVector embed(const Sentence& s, const Lexicon& lex) {
    EmbeddingVector sum;
    sum.values.assign(lex.dimension(), 0.0);
    for (const auto& tok : s.tokens) {
        const EmbeddingVector* known = lex.find(tok);
        EmbeddingVector hashed;
        if (known == nullptr) {
            hashed = hashed_vector(tok, lex.dimension(), lex.oov_seed());
            known = &hashed;
        }
        for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += known->values[i];
    }
    if (!s.tokens.empty()) {
        auto n = static_cast<double>(s.tokens.size());
        for (auto& x : sum.values) x /= n;
    }
    return sum;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension()) {
        throw DimensionMismatch("cannot compare vectors of dimension " + std::to_string(a.dimension()) +
                                " and " + std::to_string(b.dimension()));
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine similarity of a zero vector");
    double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(c, -1.0, 1.0);
}

double distance(const EmbeddingVector& a, const EmbeddingVector& b) {
    return 1.0 - cosine_similarity(a, b);
}

// ---------------------------------------------------------------------------
// Fluency

namespace {
constexpr std::string_view kStart = "<s>";
constexpr std::string_view kEnd = "</s>";
} // namespace

FluencyModel FluencyModel::train(const std::vector<Sentence>& corpus) {
    FluencyModel m;
    for (const auto& s : corpus) {
        std::string prev(kStart);
        auto count = [&](const std::string& next) {
            ++m.bigrams_[prev][next];
            ++m.history_[prev];
            m.vocabulary_.insert(next);
            prev = next;
        };
        for (const auto& tok : s.tokens) count(tok);
        count(std::string(kEnd));
    }
    return m;
}

FluencyModel FluencyModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open fluency corpus " + path);
    std::vector<Sentence> corpus;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        try {
            corpus.push_back(Sentence::from_text(line));
        } catch (const ParseError&) {
            // blank after normalization
        }
    }
    return train(corpus);
}

double FluencyModel::probability(std::string_view prev, std::string_view next) const {
    double pair_count = 0.0;
    double hist_count = 0.0;
    if (auto h = history_.find(std::string(prev)); h != history_.end()) {
        hist_count = h->second;
        auto& row = bigrams_.at(h->first);
        if (auto b = row.find(std::string(next)); b != row.end()) pair_count = b->second;
    }
    return (pair_count + 1.0) / (hist_count + static_cast<double>(vocabulary_size()));
}

double FluencyModel::perplexity(const Sentence& s) const {
    double log_sum = 0.0;
    std::string_view prev = kStart;
    for (const auto& tok : s.tokens) {
        log_sum += std::log(probability(prev, tok));
        prev = tok;
    }
    log_sum += std::log(probability(prev, kEnd));
    auto n = static_cast<double>(s.tokens.size() + 1);
    return std::exp(-log_sum / n);
}

} // namespace cfx
