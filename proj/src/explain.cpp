#include "cfx/explain.hpp"

#include <algorithm>
#include <array>

#include "cfx/error.hpp"

namespace cfx {

namespace {

constexpr std::array<std::string_view, 3> kMethodNames = {"full", "no_demo", "no_utterance"};

bool same_denotation(const Program& prog, const Trajectory& demo) {
    try {
        return execute(prog, demo.initial).actions == demo.actions;
    } catch (const Unsatisfiable&) {
        return false;
    }
}

// Stable, so equal scores keep the canonical order the candidates arrived in.
void rank_by_similarity(std::vector<Candidate>& candidates) {
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return *a.similarity > *b.similarity;
    });
}

ExplanationResult result_from_ranking(std::vector<Candidate> ranked, Method method) {
    ExplanationResult out;
    out.explanation = ranked.front().sentence;
    out.program = ranked.front().program;
    out.similarity = ranked.front().similarity;
    out.perplexity = ranked.front().perplexity;
    out.candidates = std::move(ranked);
    out.method = method;
    return out;
}

[[noreturn]] void no_explanation(const ExplanationRequest& req) {
    throw NoValidExplanation("no sentence within depth " + std::to_string(req.depth_bound) +
                             " achieves the demonstrated goal");
}

} // namespace

std::string_view to_string(Method m) { return kMethodNames[static_cast<std::size_t>(m)]; }

std::optional<Method> method_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kMethodNames.size(); ++i) {
        if (kMethodNames[i] == s) return static_cast<Method>(i);
    }
    return std::nullopt;
}

ExplanationResult explain_naive(const ExplanationRequest& req, const SentenceEncoder& encoder) {
    auto states = replay(req.demonstration);
    const EmbeddingVector target = encoder.encode(req.utterance);
    std::vector<Candidate> kept;
    std::optional<std::size_t> best;
    double best_score = 0.0;

    for (const Sentence& s : enumerate_sentences(req.depth_bound)) {
        Program prog = parse(s);
        bool ok = req.constraint == ConstraintMode::exact_denotation ? same_denotation(prog, req.demonstration)
                                                                     : satisfied(prog, states);
        if (!ok) continue;
        double score = cosine_similarity(encoder.encode(s), target);
        if (!best || score > best_score) {
            best = kept.size();
            best_score = score;
        }
        kept.push_back({s, std::move(prog), score, std::nullopt});
    }
    if (!best) no_explanation(req);

    Candidate winner = kept[*best];
    rank_by_similarity(kept);
    ExplanationResult out = result_from_ranking(std::move(kept), Method::full);
    out.explanation = winner.sentence;
    out.program = winner.program;
    out.similarity = winner.similarity;
    return out;
}

ExplanationResult explain_naive(const ExplanationRequest& req, const Lexicon& lex) {
    return explain_naive(req, LexiconEncoder(lex));
}

ExplanationResult explain_pruned(const ExplanationRequest& req, const SentenceEncoder& encoder) {
    auto states = replay(req.demonstration);
    const EmbeddingVector target = encoder.encode(req.utterance);
    std::vector<Candidate> kept;
    for (std::size_t idx : consistent_indices(states, req.depth_bound)) {
        Program prog = program_at(idx);
        if (req.constraint == ConstraintMode::exact_denotation && !same_denotation(prog, req.demonstration)) {
            continue;
        }
        Sentence s = unparse(prog);
        double score = cosine_similarity(encoder.encode(s), target);
        kept.push_back({std::move(s), std::move(prog), score, std::nullopt});
    }
    if (kept.empty()) no_explanation(req);
    rank_by_similarity(kept);
    return result_from_ranking(std::move(kept), Method::full);
}

ExplanationResult explain_pruned(const ExplanationRequest& req, const Lexicon& lex) {
    return explain_pruned(req, LexiconEncoder(lex));
}

ExplanationResult explain_no_demo(const Sentence& utterance, int depth_bound, const SentenceEncoder& encoder) {
    const EmbeddingVector target = encoder.encode(utterance);
    std::vector<Candidate> all;
    all.reserve(program_count(depth_bound));
    std::size_t idx = 0;
    for (Sentence& s : enumerate_sentences(depth_bound)) {
        double score = cosine_similarity(encoder.encode(s), target);
        all.push_back({std::move(s), program_at(idx++), score, std::nullopt});
    }
    rank_by_similarity(all);
    return result_from_ranking(std::move(all), Method::no_demo);
}

ExplanationResult explain_no_demo(const Sentence& utterance, int depth_bound, const Lexicon& lex) {
    return explain_no_demo(utterance, depth_bound, LexiconEncoder(lex));
}

ExplanationResult explain_no_utterance(const Trajectory& demo, int depth_bound, const FluencyModel& model) {
    auto states = replay(demo);
    std::vector<Candidate> kept;
    for (std::size_t idx : consistent_indices(states, depth_bound)) {
        Program prog = program_at(idx);
        Sentence s = unparse(prog);
        double ppl = model.perplexity(s);
        kept.push_back({std::move(s), std::move(prog), std::nullopt, ppl});
    }
    if (kept.empty()) {
        throw NoValidExplanation("no sentence within depth " + std::to_string(depth_bound) +
                                 " achieves the demonstrated goal");
    }
    std::stable_sort(kept.begin(), kept.end(),
                     [](const Candidate& a, const Candidate& b) { return *a.perplexity < *b.perplexity; });
    return result_from_ranking(std::move(kept), Method::no_utterance);
}

bool check_success(const Sentence& s, const Trajectory& demo, int depth_bound) {
    Program prog;
    try {
        prog = parse(s);
    } catch (const ParseError&) {
        return false;
    }
    if (prog.depth() > static_cast<std::size_t>(clamp_depth(depth_bound))) return false;
    return satisfied(prog, replay(demo));
}

} // namespace cfx
